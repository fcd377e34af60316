#include "occulimits/lp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace occulimits;

namespace {

LinearProgram dense(const oracle::DenseLp& d) { return LinearProgram::from_dense(d.c, d.a, d.b); }

void check_invariants(const LinearProgram& lp, const LpSolution& sol) {
    REQUIRE(sol.status == LpStatus::optimal);
    const auto chk = check_solution(lp, sol);
    double bnorm = 0.0;
    for (double v : lp.b()) bnorm = std::max(bnorm, std::abs(v));
    CHECK(chk.primal_residual <= 1e-8 * (1.0 + bnorm));
    CHECK(chk.min_x >= -1e-10);
    CHECK(chk.duality_gap <= 1e-7 * (1.0 + std::abs(sol.objective)));
    CHECK(chk.min_reduced_cost >= -1e-8);
    CHECK(chk.complementarity <= 1e-7);
}

}  // namespace

TEST_CASE("small hand LP") {
    // min -x1 - 2 x2  s.t.  x1 + x2 + s1 = 4,  x2 + s2 = 3
    const std::vector<double> c{-1, -2, 0, 0};
    const std::vector<std::vector<double>> a{{1, 1, 1, 0}, {0, 1, 0, 1}};
    const std::vector<double> b{4, 3};
    const auto lp = LinearProgram::from_dense(c, a, b);
    const auto sol = solve_lp(lp);
    check_invariants(lp, sol);
    CHECK(sol.objective == doctest::Approx(-7.0).epsilon(1e-14));
    CHECK(sol.x[0] == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(3.0));
    CHECK(sol.y_dual[0] == doctest::Approx(-1.0));
    CHECK(sol.y_dual[1] == doctest::Approx(-1.0));
}

TEST_CASE("negative right-hand sides are handled by row sign flips") {
    // -x1 - x2 = -2, x1 - x2 = 0, min x1 + 3 x2
    const auto lp = LinearProgram::from_dense(std::vector<double>{1, 3}, {{-1, -1}, {1, -1}}, std::vector<double>{-2, 0});
    const auto sol = solve_lp(lp);
    check_invariants(lp, sol);
    CHECK(sol.objective == doctest::Approx(4.0));
}

TEST_CASE("infeasible program returns a Farkas certificate") {
    // x1 + x2 = 1 and x1 + x2 = 2
    const auto lp = LinearProgram::from_dense(std::vector<double>{1, 1}, {{1, 1}, {1, 1}}, std::vector<double>{1, 2});
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::infeasible);
    const auto aty = lp.multiply_transpose(sol.y_dual);
    double by = 0.0;
    for (std::size_t i = 0; i < 2; ++i) by += lp.b()[i] * sol.y_dual[i];
    for (double v : aty) CHECK(v <= 1e-9);
    CHECK(by > 1e-9);
}

TEST_CASE("unbounded program") {
    // x1 - x2 = 0, min -x1
    const auto lp = LinearProgram::from_dense(std::vector<double>{-1, 0}, {{1, -1}}, std::vector<double>{0});
    CHECK(solve_lp(lp).status == LpStatus::unbounded);
}

TEST_CASE("redundant rows leave an artificial basic at zero") {
    // Second row duplicates the first.
    const auto lp = LinearProgram::from_dense(std::vector<double>{1, 2, 0}, {{1, 1, 1}, {2, 2, 2}, {0, 1, 0}},
                                              std::vector<double>{3, 6, 1});
    const auto sol = solve_lp(lp);
    check_invariants(lp, sol);
    CHECK(sol.objective == doctest::Approx(2.0));
}

TEST_CASE("sparse columns sum duplicate rows and keep names") {
    LinearProgram lp(2);
    lp.set_rhs(0, 1.0);
    lp.set_rhs(1, 0.0);
    lp.set_row_name(0, "mass");
    const auto j = lp.add_variable(1.0, {{0, 0.5}, {0, 0.5}, {1, 1.0}}, "x");
    lp.add_variable(0.0, {{1, -1.0}}, "slack");
    CHECK(j == 0);
    CHECK(lp.column(0).size() == 2);
    CHECK(lp.col_name(0) == "x");
    CHECK(lp.row_name(0) == "mass");
    const auto sol = solve_lp(lp);
    check_invariants(lp, sol);
    CHECK(sol.objective == doctest::Approx(1.0));
    std::ostringstream os;
    dump_lp(lp, os);
    CHECK(os.str().find("mass") != std::string::npos);
}

TEST_CASE("random dense LPs agree with vertex enumeration") {
    for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
        CAPTURE(seed);
        const auto d = oracle::random_dense_lp(seed);
        const auto lp = dense(d);
        const auto sol = solve_lp(lp);
        check_invariants(lp, sol);
        CHECK(sol.objective == doctest::Approx(oracle::vertex_enumeration(d.c, d.a, d.b)).epsilon(1e-9));
    }
}

TEST_CASE("least-index regime from the first degenerate pivot still reaches the optimum") {
    SimplexOptions opt;
    opt.degenerate_streak = 1;
    opt.refactor_interval = 3;
    opt.pricing_window = 1;
    for (std::uint64_t seed = 2000; seed < 2040; ++seed) {
        CAPTURE(seed);
        const auto d = oracle::random_dense_lp(seed);
        const auto lp = dense(d);
        const auto sol = solve_lp(lp, opt);
        check_invariants(lp, sol);
        CHECK(sol.objective == doctest::Approx(oracle::vertex_enumeration(d.c, d.a, d.b)).epsilon(1e-9));
    }
}

TEST_CASE("solves are deterministic") {
    const auto d = oracle::random_dense_lp(77);
    const auto lp = dense(d);
    const auto a = solve_lp(lp), b = solve_lp(lp);
    CHECK(a.x == b.x);
    CHECK(a.y_dual == b.y_dual);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("iteration limit raises") {
    SimplexOptions opt;
    opt.max_iterations = 1;
    const auto lp = LinearProgram::from_dense(std::vector<double>{-1, -2, 0, 0}, {{1, 1, 1, 0}, {0, 1, 0, 1}},
                                              std::vector<double>{4, 3});
    CHECK_THROWS_AS(solve_lp(lp, opt), std::runtime_error);
}
