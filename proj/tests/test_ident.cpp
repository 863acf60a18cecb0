#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "relaytune/error.hpp"
#include "relaytune/ident.hpp"
#include "relaytune/sim.hpp"

using namespace relaytune;

namespace {

ResponseRecord step_record(const FopdtModel& model, double dt, double duration, double step_time,
                           double du = 1.0) {
    const SimConfig cfg{dt, duration, 0.0};
    std::vector<double> u(sample_count(cfg), 0.0);
    for (std::size_t k = 0; k < u.size(); ++k)
        if (static_cast<double>(k) * dt >= step_time - 1e-12) u[k] = du;
    return record_from_trace(simulate_open_loop(model, u, cfg), "synthetic");
}

ResponseRecord from_columns(const std::vector<double>& t, const std::vector<double>& u,
                            const std::vector<double>& y) {
    ResponseRecord r;
    for (std::size_t i = 0; i < t.size(); ++i) r.samples.push_back({t[i], u[i], y[i]});
    return r;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected relaytune::Error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("estimate_gain") {
    CHECK(estimate_gain(0.4895 - 0.1569, 1.033) == doctest::Approx(0.322).epsilon(0.001 / 0.322));
    CHECK(estimate_gain(0.0, 1.0) == 0.0);
    CHECK(estimate_gain(1.0, 2.0) == 0.5);
    CHECK(kind_of([] { estimate_gain(1.0, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("average_records") {
    std::vector<double> t(12);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 * static_cast<double>(i);

    SUBCASE("identical records") {
        const std::vector<double> y = {0, 1, 4, 9, 16, 25, 36, 49, 64, 81, 100, 121};
        const auto r = from_columns(t, std::vector<double>(12, 1.0), y);
        const std::vector<ResponseRecord> both = {r, r};
        const auto avg = average_records(both, 0.5);
        REQUIRE(avg.samples.size() == 12);
        for (std::size_t i = 0; i < 12; ++i) CHECK(avg.samples[i].output == doctest::Approx(y[i]));
    }
    SUBCASE("constant 0 and 2 average to 1") {
        const std::vector<ResponseRecord> rs = {
            from_columns(t, std::vector<double>(12, 0.0), std::vector<double>(12, 0.0)),
            from_columns(t, std::vector<double>(12, 2.0), std::vector<double>(12, 2.0))};
        for (const auto& s : average_records(rs, 0.25).samples) {
            CHECK(s.output == 1.0);
            CHECK(s.input == 1.0);
        }
    }
    SUBCASE("mirrored ramps average to a constant") {
        std::vector<double> up(12), down(12);
        for (std::size_t i = 0; i < 12; ++i) {
            up[i] = 1.0 + static_cast<double>(i);
            down[i] = 12.0 - static_cast<double>(i);
        }
        const std::vector<ResponseRecord> rs = {from_columns(t, up, up), from_columns(t, down, down)};
        for (const auto& s : average_records(rs, 0.5).samples) CHECK(s.output == doctest::Approx(6.5));
    }
    SUBCASE("grid covers only the intersection") {
        std::vector<double> t2(t);
        for (auto& v : t2) v += 1.0;
        const std::vector<ResponseRecord> rs = {
            from_columns(t, std::vector<double>(12, 0.0), t),
            from_columns(t2, std::vector<double>(12, 0.0), t2)};
        const auto avg = average_records(rs, 0.1);
        CHECK(avg.samples.front().time == 1.0);
        CHECK(avg.samples.back().time == doctest::Approx(5.5));
    }
    SUBCASE("disjoint records") {
        std::vector<double> later(t);
        for (auto& v : later) v += 100.0;
        const std::vector<ResponseRecord> rs = {
            from_columns(t, std::vector<double>(12, 0.0), t),
            from_columns(later, std::vector<double>(12, 0.0), later)};
        CHECK(kind_of([&] { average_records(rs, 0.1); }) == ErrorKind::NoOverlap);
    }
}

TEST_CASE("average_records: idempotent on one record, permutation invariant") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<ResponseRecord> rs;
    for (int r = 0; r < 5; ++r) {
        ResponseRecord rec;
        const double t0 = 0.01 * r;
        for (int i = 0; i < 400; ++i) rec.samples.push_back({t0 + 0.05 * i, val(rng), val(rng)});
        rs.push_back(rec);
    }

    const std::vector<ResponseRecord> single = {rs[0]};
    const auto same = average_records(single, 0.05);
    REQUIRE(same.samples.size() == rs[0].samples.size());
    for (std::size_t i = 0; i < same.samples.size(); ++i) {
        CHECK(same.samples[i].output == doctest::Approx(rs[0].samples[i].output).epsilon(1e-12));
        CHECK(same.samples[i].input == doctest::Approx(rs[0].samples[i].input).epsilon(1e-12));
    }

    const auto reference = average_records(rs, 0.02);
    std::vector<int> order = {0, 1, 2, 3, 4};
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<ResponseRecord> permuted;
        for (int i : order) permuted.push_back(rs[static_cast<std::size_t>(i)]);
        const auto avg = average_records(permuted, 0.02);
        REQUIRE(avg.samples.size() == reference.samples.size());
        for (std::size_t i = 0; i < avg.samples.size(); ++i)
            CHECK(std::abs(avg.samples[i].output - reference.samples[i].output) < 1e-12);
    }
}

TEST_CASE("identify_fopdt recovers the reference plant") {
    const auto record = step_record({0.322, 1.33, 1.3}, 0.01, 30.0, 1.0);
    const auto m = identify_fopdt(record);
    CHECK(m.gain_kp == doctest::Approx(0.322).epsilon(0.05));
    CHECK(m.tau == doctest::Approx(1.33).epsilon(0.05));
    CHECK(m.dead_time == doctest::Approx(1.3).epsilon(0.05));
    // Noise-free data recovers the model far more tightly than that.
    CHECK(m.gain_kp == doctest::Approx(0.322).epsilon(1e-4));
    CHECK(m.tau == doctest::Approx(1.33).epsilon(2e-3));
    CHECK(m.dead_time == doctest::Approx(1.3).epsilon(2e-3));
}

TEST_CASE("identify_fopdt on a pure first-order lag") {
    // Analytic crossings -tau ln(1 - f): t28 = 0.3327, t63 = 0.9997 -> tau = 1.0005.
    const auto record = step_record({1.0, 1.0, 0.0}, 0.001, 15.0, 0.5);
    const auto m = identify_fopdt(record);
    CHECK(m.gain_kp == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.tau == doctest::Approx(1.5 * (std::log(1 - 0.283) - std::log(1 - 0.632))).epsilon(1e-3));
    CHECK(m.tau == doctest::Approx(1.0009).epsilon(1e-3));
    CHECK(m.dead_time < 0.002);
}

TEST_CASE("identify_fopdt errors") {
    std::vector<double> t(50), flat(50, 0.3), zero(50, 0.0);
    for (std::size_t i = 0; i < 50; ++i) t[i] = 0.1 * static_cast<double>(i);
    CHECK(kind_of([&] { identify_fopdt(from_columns(t, zero, flat)); }) == ErrorKind::NoStep);

    std::vector<double> u(50, 0.0);
    for (std::size_t i = 10; i < 50; ++i) u[i] = 1.0;
    const auto k = kind_of([&] { identify_fopdt(from_columns(t, u, flat)); });
    CHECK((k == ErrorKind::NoStep || k == ErrorKind::InsufficientResponse));

    // Still rising at the end of the record.
    const auto unsettled = step_record({1.0, 10.0, 0.5}, 0.01, 5.0, 0.5);
    CHECK(kind_of([&] { identify_fopdt(unsettled); }) == ErrorKind::InsufficientResponse);

    // Input pulse that returns to zero is not a sustained step.
    std::vector<double> pulse(50, 0.0);
    for (std::size_t i = 10; i < 20; ++i) pulse[i] = 1.0;
    CHECK(kind_of([&] { identify_fopdt(from_columns(t, pulse, flat)); }) == ErrorKind::NoStep);

    // Output moves before the input step: both thresholds hit at the step instant.
    std::vector<double> jump(50, 0.0);
    for (std::size_t i = 5; i < 50; ++i) jump[i] = 1.0;
    CHECK(kind_of([&] { identify_fopdt(from_columns(t, u, jump)); }) == ErrorKind::IllConditioned);
}

TEST_CASE("identify_fopdt invariances") {
    const FopdtModel plant{0.322, 1.33, 1.3};
    const auto record = step_record(plant, 0.01, 30.0, 1.0);
    const auto base = identify_fopdt(record);

    SUBCASE("uniform time shift") {
        for (double shift : {-7.25, 3.0, 1000.0}) {
            auto shifted = record;
            for (auto& s : shifted.samples) s.time += shift;
            const auto m = identify_fopdt(shifted);
            CHECK(std::abs(m.gain_kp - base.gain_kp) < 1e-9);
            CHECK(std::abs(m.tau - base.tau) < 1e-9 * std::max(1.0, std::abs(shift)));
            CHECK(std::abs(m.dead_time - base.dead_time) < 1e-9 * std::max(1.0, std::abs(shift)));
        }
    }
    SUBCASE("output scaling") {
        for (double c : {-2.0, 0.1, 25.0}) {
            auto scaled = record;
            for (auto& s : scaled.samples) s.output *= c;
            const auto m = identify_fopdt(scaled);
            CHECK(m.gain_kp == doctest::Approx(c * base.gain_kp).epsilon(1e-12));
            CHECK(m.tau == doctest::Approx(base.tau).epsilon(1e-12));
            CHECK(m.dead_time == doctest::Approx(base.dead_time).epsilon(1e-12));
        }
    }
}

TEST_CASE("simulate then identify round trip within 2%") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> gain(-5.0, 5.0);
    std::uniform_real_distribution<double> log_tau(std::log(0.1), std::log(20.0));
    std::uniform_real_distribution<double> ratio(0.0, 3.0);
    for (int i = 0; i < 60; ++i) {
        double k = gain(rng);
        if (std::abs(k) < 0.05) k = 0.5;
        const double tau = std::exp(log_tau(rng));
        const double dt = std::min(tau / 10.0, 0.01);
        // The simulator quantizes dead time to whole samples.
        const double delay = std::round(std::max(5.0 * dt, ratio(rng) * tau) / dt) * dt;
        const FopdtModel plant{k, tau, delay};
        const double duration = 1.0 + delay + 12.0 * tau;
        const auto m = identify_fopdt(step_record(plant, dt, duration, 1.0, 2.0));
        CAPTURE(k);
        CAPTURE(tau);
        CAPTURE(delay);
        CHECK(m.gain_kp == doctest::Approx(k).epsilon(0.02));
        CHECK(m.tau == doctest::Approx(tau).epsilon(0.02));
        CHECK(m.dead_time == doctest::Approx(delay).epsilon(0.02));
    }
}
