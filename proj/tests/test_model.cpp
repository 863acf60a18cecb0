#include <doctest.h>

#include <random>

#include "relaytune/error.hpp"
#include "relaytune/model.hpp"

using namespace relaytune;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <typename F>
void expect_kind(ErrorKind kind, F&& f) {
    try {
        f();
        FAIL("expected relaytune::Error");
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
    }
}

}  // namespace

TEST_CASE("to_parallel converts time-constant gains") {
    SUBCASE("circuit example KC inputs") {
        const auto p = to_parallel({3.99, 2.04, 0.51});
        CHECK(p.kp == doctest::Approx(3.99));
        CHECK(p.ki == doctest::Approx(1.955882).epsilon(1e-6));
        CHECK(p.kd == doctest::Approx(2.0349).epsilon(1e-9));
        // Values printed with the worked circuit example.
        CHECK(p.ki == doctest::Approx(1.95).epsilon(0.005));
        CHECK(p.kd == doctest::Approx(2.03).epsilon(0.005));
    }
    SUBCASE("identity") {
        const auto p = to_parallel({1, 1, 1});
        CHECK(p.kp == 1.0);
        CHECK(p.ki == 1.0);
        CHECK(p.kd == 1.0);
    }
    SUBCASE("AH gains") {
        const auto p = to_parallel({3.726, 2.0, 0.5});
        CHECK(p.ki == doctest::Approx(1.863));
        CHECK(p.kd == doctest::Approx(1.863));
    }
    SUBCASE("PI controller allowed") { CHECK(to_parallel({2.0, 4.0, 0.0}).kd == 0.0); }
    SUBCASE("ti = 0 rejected") {
        expect_kind(ErrorKind::InvalidGains, [] { to_parallel({1.0, 0.0, 0.1}); });
    }
}

TEST_CASE("from_parallel inverts to_parallel") {
    const auto g = from_parallel({3.99, 1.956, 2.035});
    CHECK(g.kp == 3.99);
    CHECK(g.ti == doctest::Approx(2.0399).epsilon(1e-4));
    CHECK(g.td == doctest::Approx(0.51).epsilon(1e-3));

    const auto unit = from_parallel({1, 1, 1});
    CHECK(unit.ti == 1.0);
    CHECK(unit.td == 1.0);

    expect_kind(ErrorKind::InvalidGains, [] { from_parallel({2, 0, 1}); });
    expect_kind(ErrorKind::InvalidGains, [] { from_parallel({0, 1, 1}); });
}

TEST_CASE("gain-form round trips and homogeneity hold on random inputs") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> log_dist(-3.0, 3.0);
    auto draw = [&] { return std::pow(10.0, log_dist(rng)); };
    for (int i = 0; i < 2000; ++i) {
        const PidGains g{draw(), draw(), draw()};
        const auto back = from_parallel(to_parallel(g));
        CHECK(rel_err(back.kp, g.kp) < 1e-12);
        CHECK(rel_err(back.ti, g.ti) < 1e-12);
        CHECK(rel_err(back.td, g.td) < 1e-12);

        const ParallelGains p{draw(), draw(), draw()};
        const auto again = to_parallel(from_parallel(p));
        CHECK(rel_err(again.kp, p.kp) < 1e-12);
        CHECK(rel_err(again.ki, p.ki) < 1e-12);
        CHECK(rel_err(again.kd, p.kd) < 1e-12);

        const double c = draw();
        const auto base = to_parallel(g);
        const auto scaled = to_parallel({c * g.kp, g.ti, g.td});
        CHECK(rel_err(scaled.kp, c * base.kp) < 1e-12);
        CHECK(rel_err(scaled.ki, c * base.ki) < 1e-12);
        CHECK(rel_err(scaled.kd, c * base.kd) < 1e-12);
    }
}

TEST_CASE("validation rejects broken values") {
    expect_kind(ErrorKind::InvalidModel, [] { validate(FopdtModel{0.0, 1.0, 0.0}); });
    expect_kind(ErrorKind::InvalidModel, [] { validate(FopdtModel{1.0, 0.0, 0.0}); });
    expect_kind(ErrorKind::InvalidModel, [] { validate(FopdtModel{1.0, 1.0, -0.1}); });
    CHECK_NOTHROW(validate(FopdtModel{-2.0, 1.0, 0.0}));
    expect_kind(ErrorKind::InvalidGains, [] { validate(PidGains{1.0, 1.0, -1.0}); });
    expect_kind(ErrorKind::InvalidArgument, [] {
        validate(SimTrace{0.1, 0.0, {0.0}, {0.0}, {0.0}});
    });
}
