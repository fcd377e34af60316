#include "occulimits/dp.hpp"
#include "occulimits/measures.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace occulimits;

namespace {

FiniteModel three_cycle() {
    ModelData d;
    d.name = "cycle";
    d.states = {{{0.0}, 0}, {{1.0}, 1}, {{2.0}, 2}};
    d.controls = {{{0.0}}, {{0.0}}, {{0.0}}};
    d.noise = {{0, 1.0}};
    d.dynamics = {1, 2, 0};
    d.cost = {1.0, 0.0, 0.0};
    return FiniteModel(std::move(d));
}

const Plan kEx1Optimal = Plan::deterministic({1, 0});

}  // namespace

TEST_CASE("example1 occupation measures by hand") {
    const auto model = example1_model(0.5);
    const auto g1 = occupation_measure(model, kEx1Optimal, 1, 1);
    CHECK(g1.weights == std::vector<double>{0.0, 0.0, 1.0, 0.0});
    const auto g2 = occupation_measure(model, kEx1Optimal, 1, 2);
    CHECK(g2.weights[model.pair_index(0, 1)] == doctest::Approx(0.375));
    CHECK(g2.weights[model.pair_index(1, 0)] == doctest::Approx(0.625));
    CHECK(g2.total_mass() == doctest::Approx(1.0));
    // The occupation measure integrates k to the plan's average cost.
    CHECK(g2.integrate(model.cost()) == doctest::Approx(evaluate_plan_average(model, kEx1Optimal, 1, 2)));
    CHECK(g2.state_marginal(model) == std::vector<double>{0.375, 0.625});
}

TEST_CASE("distribution propagation") {
    const auto model = example1_model(0.5);
    const auto path = propagate(model, kEx1Optimal, 1, 3);
    REQUIRE(path.mu.size() == 4);
    CHECK(path.mu[0] == std::vector<double>{0.0, 1.0});
    for (std::size_t t = 1; t <= 3; ++t) {
        CHECK(path.mu[t][0] == doctest::Approx(0.75));
        CHECK(path.mu[t][1] == doctest::Approx(0.25));
    }
    const auto laws = joint_laws(model, kEx1Optimal, 1, 3);
    REQUIRE(laws.size() == 3);
    CHECK(laws[2][model.pair_index(0, 1)] == doctest::Approx(0.75));
    CHECK_THROWS_AS(propagate(model, Plan::staged({{0, 0}}), 0, 2), std::invalid_argument);
}

TEST_CASE("occupation measures are nearly stationary") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto m = random_model({.seed = seed, .min_transition_prob = 0.0});
        const auto plan = discounted_values(m, 0.2).plan;
        for (std::size_t t : {10u, 100u}) {
            const auto g = occupation_measure(m, plan, 0, t);
            // The balance defect telescopes to (mu_0 - mu_T) / T.
            CHECK(membership_residuals(m, g, StationarySet{}) <= 1.0 / static_cast<double>(t) + 1e-12);
            CHECK(g.integrate(m.cost()) == doctest::Approx(evaluate_plan_average(m, plan, 0, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("discounted occupation lies in the discounted set and prices the plan") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto m = random_model({.seed = seed});
        const auto plan = discounted_values(m, 0.1).plan;
        for (double eps : {0.5, 0.05}) {
            const auto g = discounted_occupation(m, plan, 1, eps);
            CHECK(membership_residuals(m, g, DiscountedSet{eps, 1}) <= 1e-8);
            CHECK(g.integrate(m.cost()) == doctest::Approx(evaluate_plan_discounted(m, plan, eps)[1]).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(discounted_occupation(example1_model(0.5), kEx1Optimal, 0, 0.0), std::invalid_argument);
}

TEST_CASE("rho and hausdorff on hand values") {
    TestFamily fam;
    fam.tables = {{1.0, 1.0}, {1.0, -1.0}};
    GMeasure a, b, c;
    a.weights = {1.0, 0.0};
    b.weights = {0.0, 1.0};
    c.weights = {0.5, 0.5};
    // |<q1,a-b>| = 0, |<q2,a-b>| = 2.
    CHECK(rho(a, b, fam) == doctest::Approx(0.5));
    CHECK(rho(a, c, fam) == doctest::Approx(0.25));
    CHECK(rho(a, a, fam) == 0.0);
    CHECK(hausdorff({a}, {b, c}, fam) == doctest::Approx(0.5));
    CHECK(hausdorff({a, b}, {a, b}, fam) == 0.0);
    CHECK_THROWS_AS(rho(a, b, TestFamily{}), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff({}, {a}, fam), std::invalid_argument);
}

TEST_CASE("canonical test family on example1") {
    const auto model = example1_model(0.5);
    const auto fam = canonical_test_family(model, 2);
    // 1, y, u, y^2, y u, u^2 in (y, u); all nonzero on the pairs.
    REQUIRE(fam.tables.size() == 6);
    CHECK(fam.tables[0] == std::vector<double>{1, 1, 1, 1});
    CHECK(fam.tables[1] == std::vector<double>{-1, -1, 1, 1});
    CHECK(fam.tables[2] == std::vector<double>{-1, 1, -1, 1});
    CHECK(fam.tables[4] == std::vector<double>{1, -1, -1, 1});
    for (const auto& t : fam.tables) {
        double sup = 0.0;
        for (double v : t) sup = std::max(sup, std::abs(v));
        CHECK(sup == 1.0);
    }
    CHECK(canonical_test_family(model, 3, 4).tables.size() == 4);
}

TEST_CASE("periodic regime detection") {
    const auto model = example1_model(0.5);
    auto r = prg_detect(model, kEx1Optimal, 1, 20);
    REQUIRE(r.has_value());
    CHECK(r->t0 == 1);
    CHECK(r->period == 1);

    const auto cyc = three_cycle();
    r = prg_detect(cyc, Plan::deterministic({0, 0, 0}), 0, 12);
    REQUIRE(r.has_value());
    CHECK(r->t0 == 0);
    CHECK(r->period == 3);

    // The orbit y0 4^-k never repeats its law before the last level.
    const auto orbit = example2_orbit_model(0.5, 80);
    CHECK_FALSE(prg_detect(orbit, Plan::deterministic(std::vector<std::size_t>(81, 0)), 0, 40).has_value());
    CHECK_THROWS_AS(prg_detect(model, kEx1Optimal, 1, 1), std::invalid_argument);
}
