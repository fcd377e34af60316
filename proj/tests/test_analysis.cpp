#include "occulimits/analysis.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace occulimits;

namespace {

DualCertificate ex1_dual(const FiniteModel& model, double y0) {
    DualCertificate d;
    d.mu = -std::abs(y0) / 2.0;
    for (const auto& s : model.states()) {
        d.psi.push_back(oracle::ex1_psi(s.coords[0]));
        d.eta.push_back(oracle::ex1_eta(s.coords[0]));
    }
    return d;
}

}  // namespace

TEST_CASE("bounds report for example1") {
    const auto model = example1_model(0.5);
    const std::vector<std::size_t> ts{1, 10, 100, 1000};
    const std::vector<double> eps{0.5, 0.1, 0.01};
    const auto rep = bounds_report(model, 1, ts, eps);
    CHECK(rep.k_star_y0 == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(rep.d_star_y0 == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(rep.k_star == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(std::abs(rep.gap) <= 1e-12);
    CHECK(rep.strong_duality);
    CHECK(rep.sandwich_ok);
    REQUIRE(rep.vT_curve.size() == 4);
    for (const auto& p : rep.vT_curve) CHECK(p.value == doctest::Approx(-0.25 + 0.75 / p.parameter).epsilon(1e-12));
    for (const auto& p : rep.heps_curve) CHECK(p.value == doctest::Approx(-0.25 + 0.75 * p.parameter).epsilon(1e-9));
    // |v_1000 - k*| = 7.5e-4 and |h_0.01 - k*| = 7.5e-3.
    REQUIRE(rep.limits_ok.has_value());
    CHECK_FALSE(*rep.limits_ok);
    CHECK(rep.vT_limit_error == doctest::Approx(7.5e-4));
    const auto loose = bounds_report(model, 1, ts, eps, {.limit_slack = 1e-2});
    CHECK(*loose.limits_ok);
}

TEST_CASE("bounds report for a constant cost") {
    const auto model = constant_cost_model(4, -0.3);
    const std::vector<std::size_t> ts{1, 50};
    const std::vector<double> eps{0.2};
    const auto rep = bounds_report(model, 2, ts, eps);
    CHECK(rep.k_star_y0 == doctest::Approx(-0.3));
    CHECK(rep.d_star_y0 == doctest::Approx(-0.3));
    CHECK(rep.k_star == doctest::Approx(-0.3));
    CHECK(std::abs(rep.gap) <= 1e-12);
    CHECK(rep.sandwich_ok);
    for (const auto& p : rep.vT_curve) CHECK(p.value == doctest::Approx(-0.3));
}

TEST_CASE("bounds report argument checks") {
    const auto model = example1_model(0.5);
    const std::vector<std::size_t> bad_ts{10, 5};
    const std::vector<std::size_t> ts{5};
    const std::vector<double> bad_eps{0.1, 0.2};
    const std::vector<double> eps{0.1};
    CHECK_THROWS_AS(bounds_report(model, 0, bad_ts, eps), std::invalid_argument);
    CHECK_THROWS_AS(bounds_report(model, 0, ts, bad_eps), std::invalid_argument);
    CHECK_THROWS_AS(bounds_report(model, 4, ts, eps), std::out_of_range);
}

TEST_CASE("long-run optimality of the example1 feedback") {
    const auto model = example1_model(0.5);
    const auto dual = ex1_dual(model, 0.5);
    const auto v = verify_long_run_optimality(model, Plan::deterministic({1, 0}), dual, 1, 1, 100);
    CHECK(v.certificate_ok);
    CHECK(v.certified);
    CHECK(*v.cost_residual <= 1e-15);
    CHECK(*v.psi_residual <= 1e-15);

    // Flipped signs: at (0.5, +1) the gap is 0.5 + (3/4 * 0.75 - 1/4 * 0.25) - 0.75 + 0.25 = 0.5.
    const auto bad = verify_long_run_optimality(model, Plan::deterministic({0, 1}), dual, 1, 1, 100);
    CHECK(bad.certificate_ok);
    CHECK_FALSE(bad.certified);
    CHECK(*bad.cost_residual == doctest::Approx(0.5));

    auto broken = dual;
    broken.mu = 0.5;
    const auto rejected = verify_long_run_optimality(model, Plan::deterministic({1, 0}), broken, 1, 1, 100);
    CHECK_FALSE(rejected.certificate_ok);
    CHECK_FALSE(rejected.cost_residual.has_value());
    CHECK_FALSE(rejected.certified);
}

TEST_CASE("LP dual certifies the greedy feedback on a coarse example2 grid") {
    const auto model = example2_model(4, 1.0 / 16.0);
    const auto y0 = *model.find_state(-0.5);
    const auto r = augmented_lp(model, y0);
    CHECK(r.optimal_value == doctest::Approx(-0.625).epsilon(1e-9));
    const auto plan = greedy_feedback_from_eta(model, r.dual->eta);
    const auto v = verify_long_run_optimality(model, plan, *r.dual, y0, 1, 100);
    CHECK(v.certified);
}

TEST_CASE("dual from the value expansion") {
    const auto model = example1_model(0.5);
    const std::vector<std::size_t> ts{100, 200};
    const auto d = dual_from_expansion(model, ts);
    for (std::size_t y = 0; y < 2; ++y) {
        const double x = model.state(y).coords[0];
        CHECK(std::abs(d.psi[y] - oracle::ex1_psi(x)) <= 1e-9);
        CHECK(std::abs(d.eta[y] - oracle::ex1_eta(x)) <= 1e-9);
    }
    CHECK(d.residual <= 1e-9);

    const auto c = dual_from_expansion(constant_cost_model(3, 0.4), ts);
    for (std::size_t y = 0; y < 3; ++y) {
        CHECK(c.psi[y] == doctest::Approx(0.4));
        CHECK(std::abs(c.eta[y]) <= 1e-10);
    }
    CHECK(c.residual <= 1e-10);
    const std::vector<std::size_t> one{10};
    CHECK_THROWS_AS(dual_from_expansion(model, one), std::invalid_argument);
}

TEST_CASE("abel window") {
    SUBCASE("constant sequence") {
        const auto w = abel_window([](std::size_t) { return 0.3; }, 1.0, 0.1, 0.5);
        CHECK(w.sigma == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(w.horizon == w.lower_bound);
    }
    SUBCASE("alternating sequence") {
        auto g = [](std::size_t t) { return t % 2 == 0 ? 1.0 : -1.0; };
        const auto w = abel_window(g, 1.0, 0.1, 0.5);
        CHECK(w.sigma == doctest::Approx(oracle::discounted_mean(g, 0.1)).epsilon(1e-12));
        CHECK(w.horizon >= w.lower_bound);
        CHECK(oracle::abel_holds(g, 1.0, w.sigma, 0.5, w.horizon));
    }
    SUBCASE("lower bound formula") {
        // delta / ((4M + 4|sigma| + delta)(-ln(1-eps))) with sigma = 0.
        const auto w = abel_window([](std::size_t) { return 0.0; }, 1.0, 0.01, 0.1);
        CHECK(w.lower_bound == static_cast<std::size_t>(std::ceil(0.1 / (4.1 * -std::log(0.99)))));
    }
    CHECK_THROWS_AS(abel_window([](std::size_t) { return 0.0; }, 1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(abel_window([](std::size_t) { return 0.0; }, 1.0, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("cesaro window") {
    CHECK(cesaro_window(std::vector<double>(10, 0.7), 10, 0.01) == 0);
    // Means are 0; only windows starting at 1 stay below 0.1.
    CHECK(cesaro_window(std::vector<double>{2, -2, 0, 0, 0, 0, 0, 0}, 8, 0.1) == 1);
    CHECK(cesaro_window(std::vector<double>{1, 1, -1, -1, 0, 0, 0, 0}, 8, 0.1) == 2);
    CHECK_THROWS_AS(cesaro_window(std::vector<double>(3, 0.0), 5, 0.1), std::invalid_argument);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> g(60);
        for (auto& v : g) v = unit(rng);
        const auto start = cesaro_window(g, 60, 0.05);
        CHECK(oracle::cesaro_holds(g, 60, 0.05, start));
        for (std::size_t s = 0; s < start; ++s) CHECK_FALSE(oracle::cesaro_holds(g, 60, 0.05, s));
    }
}
