#include <doctest.h>

#include <cmath>
#include <random>

#include "relaytune/circuit.hpp"
#include "relaytune/error.hpp"

using namespace relaytune;

namespace {

const ParallelGains kTarget{3.99, 1.95, 2.03};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Independent table lookup: every E24 value over a wide range, nearest by ratio.
double nearest_by_table(double ohms, std::span<const int> bases) {
    double best = 0.0;
    double best_ratio = INFINITY;
    for (int e = -2; e <= 8; ++e)
        for (int b : bases) {
            const double v = b * std::pow(10.0, e);
            const double r = std::max(v / ohms, ohms / v);
            if (r < best_ratio) {
                best_ratio = r;
                best = v;
            }
        }
    return best;
}

}  // namespace

TEST_CASE("circuit_gains forward relations") {
    SUBCASE("as-printed component values") {
        const auto g = circuit_gains({45e3, 4.5e3, 1e3, 1.9e3, 220e-6, 22e-6});
        CHECK(g.kp == doctest::Approx(19.19).epsilon(1e-4));
        CHECK(g.ki == doctest::Approx(1.919).epsilon(1e-3));
        CHECK(g.kd == doctest::Approx(1.900).epsilon(1e-4));
    }
    SUBCASE("r2 = 0 is a PI controller") {
        const auto g = circuit_gains({10e3, 0.0, 1e3, 2e3, 1e-6, 1e-6});
        CHECK(g.kd == 0.0);
        CHECK(g.kp > 0.0);
    }
    SUBCASE("homogeneous in r4") {
        const CircuitDesign d{8e3, 4e3, 1e3, 400.0, 220e-6, 22e-6};
        auto scaled = d;
        scaled.r4 *= 3.5;
        const auto a = circuit_gains(d);
        const auto b = circuit_gains(scaled);
        CHECK(b.kp == doctest::Approx(3.5 * a.kp));
        CHECK(b.ki == doctest::Approx(3.5 * a.ki));
        CHECK(b.kd == doctest::Approx(3.5 * a.kd));
    }
    CHECK_THROWS_AS(circuit_gains({0.0, 1.0, 1.0, 1.0, 1.0, 1.0}), Error);
}

TEST_CASE("paper-mode synthesis") {
    const auto r = synthesize_paper_mode(kTarget, 1e3, 220e-6, 22e-6);
    CHECK(r.design.r1 == doctest::Approx(46.50e3).epsilon(1e-3));
    CHECK(r.design.r2 == doctest::Approx(4.650e3).epsilon(1e-3));
    CHECK(r.design.r4 == doctest::Approx(1.995e3).epsilon(1e-6));
    CHECK(r.design.r1 * r.design.c2 == doctest::Approx(r.design.r2 * r.design.c1));
    // Forward evaluation disagrees with the KP target.
    CHECK(r.report.achieved.kp == doctest::Approx(20.1495).epsilon(1e-6));
    CHECK(r.report.error_kp > 4.0);
    CHECK_FALSE(r.report.consistent());

    const auto unit = synthesize_paper_mode({1, 1, 7}, 1, 1, 1);
    CHECK(unit.design.r1 == 0.5);
    CHECK(unit.design.r2 == 0.5);
    CHECK(unit.design.r4 == 0.5);

    const auto other = synthesize_paper_mode({2, 1, 1}, 1e3, 100e-6, 100e-6);
    CHECK(other.design.r1 == doctest::Approx(10e3));
    CHECK(other.design.r2 == doctest::Approx(10e3));
    CHECK(other.design.r4 == doctest::Approx(1e3));

    try {
        synthesize_paper_mode({1, 0, 1}, 1e3, 1e-6, 1e-6);
        FAIL("expected InvalidTarget");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidTarget);
    }
}

TEST_CASE("exact synthesis") {
    const auto r = synthesize_exact(kTarget, 1e3, 220e-6, 22e-6);
    CHECK(r.design.r1 == doctest::Approx(8827.5).epsilon(1e-4));
    CHECK(r.design.r2 == doctest::Approx(4731.9).epsilon(1e-4));
    CHECK(r.design.r4 == doctest::Approx(378.7).epsilon(1e-4));
    CHECK(r.report.consistent(1e-9));
    const auto g = circuit_gains(r.design);
    CHECK(rel(g.kp, 3.99) < 1e-6);
    CHECK(rel(g.ki, 1.95) < 1e-6);
    CHECK(rel(g.kd, 2.03) < 1e-6);

    const auto pi = synthesize_exact({2.0, 0.5, 0.0}, 1e3, 10e-6, 10e-6);
    CHECK(pi.design.r2 == 0.0);
    CHECK(pi.design.r1 == doctest::Approx(2.0 / (0.5 * 10e-6)));

    try {
        synthesize_exact({1, 1, 10}, 1e3, 1, 1);
        FAIL("expected Infeasible");
    } catch (const InfeasibleError& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
        CHECK(e.min_c1() == doctest::Approx(10.0));
    }
}

TEST_CASE("exact synthesis round trip and scale properties") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> log_dist(-2.0, 2.0);
    auto draw = [&] { return std::pow(10.0, log_dist(rng)); };
    int checked = 0;
    while (checked < 1000) {
        const ParallelGains g{draw(), draw(), draw()};
        const double c1 = draw() * 1e-5, c2 = draw() * 1e-5, r3 = draw() * 1e3;
        if (g.kp * c1 <= g.kd * c2) continue;
        ++checked;
        const auto r = synthesize_exact(g, r3, c1, c2);
        const auto back = circuit_gains(r.design);
        CHECK(rel(back.kp, g.kp) < 1e-9);
        CHECK(rel(back.ki, g.ki) < 1e-9);
        CHECK(rel(back.kd, g.kd) < 1e-9);

        const auto wide = synthesize_exact(g, 7.0 * r3, c1, c2);
        CHECK(wide.design.r1 == r.design.r1);
        CHECK(wide.design.r2 == r.design.r2);
        CHECK(wide.design.r4 == doctest::Approx(7.0 * r.design.r4).epsilon(1e-12));

        const auto paper = synthesize_paper_mode(g, r3, c1, c2);
        CHECK(paper.design.r1 * c2 == doctest::Approx(paper.design.r2 * c1).epsilon(1e-12));
    }
}

TEST_CASE("snap to standard series") {
    CHECK(snap_resistor(46.50e3, ResistorSeries::E24) == doctest::Approx(47e3));
    CHECK(snap_resistor(4.650e3, ResistorSeries::E24) == doctest::Approx(4.7e3));
    CHECK(snap_resistor(46.50e3, ResistorSeries::None) == 46.50e3);
    CHECK(snap_resistor(0.0, ResistorSeries::E24) == 0.0);
    CHECK(snap_resistor(9.6e3, ResistorSeries::E24) == doctest::Approx(10e3));
    CHECK(snap_resistor(1.04e3, ResistorSeries::E12) == doctest::Approx(1e3));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> log_dist(0.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::pow(10.0, log_dist(rng));
        for (auto s : {ResistorSeries::E12, ResistorSeries::E24})
            CHECK(snap_resistor(v, s) == doctest::Approx(nearest_by_table(v, series_values(s))).epsilon(1e-12));
    }

    const auto exact = synthesize_exact(kTarget, 1e3, 220e-6, 22e-6);
    const auto snapped = snap_to_series(exact.design, ResistorSeries::E24);
    CHECK(snapped.design.c1 == exact.design.c1);
    CHECK(snapped.design.c2 == exact.design.c2);
    CHECK(snapped.design.r1 == doctest::Approx(9.1e3));
    CHECK(snapped.report.worst() > 0.0);
    CHECK(snapped.report.worst() < 0.1);
    const auto unchanged = snap_to_series(exact.design, ResistorSeries::None);
    CHECK(unchanged.design.r1 == exact.design.r1);
    CHECK(unchanged.report.worst() == 0.0);

    CHECK(parse_series("E24") == ResistorSeries::E24);
    CHECK_THROWS_AS(parse_series("e96"), Error);
}
