#pragma once

#include "occulimits/model.hpp"
#include "occulimits/plan.hpp"
#include "occulimits/programs.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace occulimits {

/// Law of y(t) for t = 0..T; mu[0] is the point mass at y0.
struct DistributionPath {
    std::vector<std::vector<double>> mu;
};

DistributionPath propagate(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon);

/// Joint state-control laws mu_t(y) pi_t(u|y) for t = 0..T-1, pair-indexed.
std::vector<std::vector<double>> joint_laws(const FiniteModel& model, const Plan& plan, std::size_t y0,
                                            std::size_t horizon);

/// gamma(y,u) = (1/T) sum_{t<T} mu_t(y) pi_t(u|y).
GMeasure occupation_measure(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon);

/// eps sum_t (1-eps)^t mu_t (x) pi_t, truncated once the geometric tail mass
/// drops below tail_tol and renormalized to mass 1.
GMeasure discounted_occupation(const FiniteModel& model, const Plan& plan, std::size_t y0, double eps,
                               double tail_tol = 1e-12);

/// Functions on the admissible pairs, each with sup-norm <= 1.
struct TestFamily {
    std::vector<std::vector<double>> tables;
};

/// Monomials in (state coords, control coords) of total degree <= max_degree,
/// graded lexicographic order, each scaled to unit sup-norm over the pairs;
/// monomials vanishing on every pair are skipped. Truncated at max_size.
TestFamily canonical_test_family(const FiniteModel& model, int max_degree = 3, std::size_t max_size = 32);

/// sum_j 2^-j |<q_j, g1> - <q_j, g2>|, j = 1..J.
double rho(const GMeasure& g1, const GMeasure& g2, const TestFamily& family);

/// Hausdorff distance between finite sets of measures under rho.
double hausdorff(const std::vector<GMeasure>& a, const std::vector<GMeasure>& b, const TestFamily& family);

struct PrgResult {
    std::size_t t0 = 0;
    std::size_t period = 0;
};

/// Smallest (T0, period), T0 first, with T0 + 2 period <= t_max such that the
/// joint law satisfies ||law_{t+period} - law_t||_inf <= tol for every
/// T0 <= t <= t_max - period. nullopt when no such pair exists.
std::optional<PrgResult> prg_detect(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t t_max,
                                    double tol = 1e-10);

}  // namespace occulimits
