#include "occulimits/programs.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace occulimits;

namespace {

/// Long-run average of every deterministic stationary policy of a model
/// whose rows have full support (so each policy has one recurrent class);
/// returns the smallest.
double best_policy_average(const FiniteModel& model) {
    const auto p = oracle::dense_transition(model);
    const std::size_t n = model.num_states();
    std::vector<std::size_t> sel(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        // pi (P - I) = 0 with the last equation replaced by sum pi = 1.
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        std::vector<double> r(n, 0.0);
        for (std::size_t y = 0; y < n; ++y) {
            const auto& row = p[oracle::first_pair(model, y) + sel[y]];
            for (std::size_t z = 0; z < n; ++z) m[z][y] += row[z];
            m[y][y] -= 1.0;
        }
        for (std::size_t y = 0; y < n; ++y) m[n - 1][y] = 1.0;
        r[n - 1] = 1.0;
        const auto pi = oracle::gauss_solve(m, r);
        REQUIRE(pi.has_value());
        double avg = 0.0;
        for (std::size_t y = 0; y < n; ++y) avg += (*pi)[y] * model.data().cost[oracle::first_pair(model, y) + sel[y]];
        best = std::min(best, avg);
        std::size_t i = 0;
        while (i < n && ++sel[i] == model.num_controls(i)) sel[i++] = 0;
        if (i == n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("example1 augmented program: values, measures and dual") {
    for (double y0 : {0.25, 0.5, 1.0, -0.5}) {
        CAPTURE(y0);
        const auto model = example1_model(y0);
        const std::size_t start = *model.initial_state();
        const auto r = augmented_lp(model, start);
        CHECK(r.status == LpStatus::optimal);
        CHECK(r.optimal_value == doctest::Approx(-std::abs(y0) / 2.0).epsilon(1e-12));
        REQUIRE(r.dual.has_value());
        CHECK(r.dual->mu == doctest::Approx(-std::abs(y0) / 2.0).epsilon(1e-12));
        CHECK(certificate_violation(model, start, *r.dual) <= 1e-9);

        // gamma = 3/4 at (-|y0|, +1) and 1/4 at (|y0|, -1).
        CHECK(r.gamma.weights[model.pair_index(0, 1)] == doctest::Approx(0.75));
        CHECK(r.gamma.weights[model.pair_index(1, 0)] == doctest::Approx(0.25));
        CHECK(r.gamma.weights[model.pair_index(0, 0)] == doctest::Approx(0.0));
        CHECK(r.gamma.weights[model.pair_index(1, 1)] == doctest::Approx(0.0));
        REQUIRE(r.xi.has_value());
        CHECK(membership_residuals(model, r.gamma, AugmentedSet{*r.xi, start}) <= 1e-10);
    }
}

TEST_CASE("closed-form dual of example1 is a feasible certificate") {
    const auto model = example1_model(0.5);
    DualCertificate dual;
    dual.mu = -0.25;
    for (const auto& s : model.states()) {
        dual.psi.push_back(oracle::ex1_psi(s.coords[0]));
        dual.eta.push_back(oracle::ex1_eta(s.coords[0]));
    }
    CHECK(certificate_violation(model, 1, dual) <= 1e-15);
    CHECK(certificate_lower_bound(model, 1, dual) == doctest::Approx(-0.25));
    // Raising mu breaks the first inequality by exactly the increase.
    dual.mu = 0.0;
    CHECK(certificate_violation(model, 1, dual) == doctest::Approx(0.25));
}

TEST_CASE("discounted program equals the example1 discounted value") {
    for (double y0 : {0.25, 0.5, 1.0})
        for (double eps : {0.5, 0.1, 0.01}) {
            const auto model = example1_model(y0);
            const auto r = discounted_stationary_lp(model, eps, 1);
            CHECK(r.optimal_value == doctest::Approx(oracle::ex1_heps(y0, eps)).epsilon(1e-10));
            CHECK(membership_residuals(model, r.gamma, DiscountedSet{eps, 1}) <= 1e-10);
        }
}

TEST_CASE("stationary program matches policy enumeration") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        CAPTURE(seed);
        const auto model = random_model({.seed = seed, .max_states = 4, .max_controls = 3});
        const auto r = stationary_lp(model);
        CHECK(r.optimal_value == doctest::Approx(best_policy_average(model)).epsilon(1e-9));
        CHECK(membership_residuals(model, r.gamma, StationarySet{}) <= 1e-10);
    }
}

TEST_CASE("three-state file: stationary optimum over the four policies") {
    // Every policy of this file is irreducible through state 1.
    const auto model = load_model(std::string(OCCULIMITS_TEST_DATA) + "/three_state.json");
    const auto r = stationary_lp(model);
    CHECK(r.optimal_value == doctest::Approx(best_policy_average(model)).epsilon(1e-10));
}

TEST_CASE("augmented value with a deviation cost is not smaller") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = random_model({.seed = seed, .min_transition_prob = 0.0});
        std::vector<double> theta(model.num_pairs(), 0.3);
        for (std::size_t y0 = 0; y0 < model.num_states(); ++y0) {
            const auto plain = augmented_lp(model, y0);
            const auto with = augmented_lp(model, y0, std::span<const double>(theta));
            CHECK(with.optimal_value >= plain.optimal_value - 1e-9);
            CHECK(certificate_violation(model, y0, *with.dual, std::span<const double>(theta)) <= 1e-8);
            CHECK(with.dual->mu == doctest::Approx(with.optimal_value).epsilon(1e-8));
        }
    }
}

TEST_CASE("constant cost: every program returns the constant") {
    const auto model = constant_cost_model(5, 0.7);
    CHECK(stationary_lp(model).optimal_value == doctest::Approx(0.7));
    CHECK(discounted_stationary_lp(model, 0.2, 3).optimal_value == doctest::Approx(0.7));
    const auto r = augmented_lp(model, 2);
    CHECK(r.optimal_value == doctest::Approx(0.7));
    CHECK(r.dual->mu == doctest::Approx(0.7));
}

TEST_CASE("argument errors") {
    const auto model = example1_model(0.5);
    CHECK_THROWS_AS(discounted_stationary_lp(model, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(discounted_stationary_lp(model, 0.5, 2), std::out_of_range);
    CHECK_THROWS_AS(augmented_lp(model, 9), std::out_of_range);
    const std::vector<double> short_theta(1, 0.0);
    CHECK_THROWS_AS(augmented_lp(model, 0, std::span<const double>(short_theta)), std::invalid_argument);
    GMeasure g;
    g.weights = {1.0};
    CHECK_THROWS_AS(membership_residuals(model, g, StationarySet{}), std::invalid_argument);
}

TEST_CASE("membership residual detects a defect") {
    const auto model = example1_model(0.5);
    GMeasure g;
    g.weights = {0.0, 0.75, 0.25, 0.0};
    CHECK(membership_residuals(model, g, StationarySet{}) <= 1e-15);
    g.weights = {0.0, 0.5, 0.5, 0.0};
    CHECK(membership_residuals(model, g, StationarySet{}) == doctest::Approx(0.25));
}
