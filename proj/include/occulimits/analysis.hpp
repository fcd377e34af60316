#pragma once

#include "occulimits/dp.hpp"
#include "occulimits/measures.hpp"
#include "occulimits/model.hpp"
#include "occulimits/programs.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace occulimits {

struct CurvePoint {
    double parameter = 0.0;  ///< T for v_T points, eps for h_eps points
    double value = 0.0;
    double slack = 0.0;
    bool in_sandwich = false;
};

/**
 * Upper/lower bound report for one initial state.
 *
 * Every v_T point must lie in [d*(y0) - s, k*(y0) + s] with
 * s = 2M (1 + mass(xi*)) / T + 1e-6, and every h_eps point likewise with
 * s = 2M eps (1 + mass(xi*)) + 1e-6, where xi* is the optimal deviation
 * measure of the augmented program.
 */
struct BoundsReport {
    std::size_t y0 = 0;
    std::vector<CurvePoint> vT_curve;
    std::vector<CurvePoint> heps_curve;
    double k_star_y0 = 0.0;
    double d_star_y0 = 0.0;
    double k_star = 0.0;
    double gap = 0.0;
    double xi_mass = 0.0;
    double cost_bound = 0.0;
    double certificate_violation = 0.0;
    bool sandwich_ok = false;
    /// gap <= 1e-6
    bool strong_duality = false;
    /// Under strong duality: |v_Tmax - k*(y0)| and |h_eps_min - k*(y0)| against the user slack.
    std::optional<bool> limits_ok;
    double vT_limit_error = 0.0;
    double heps_limit_error = 0.0;
};

struct BoundsOptions {
    double limit_slack = 5e-3;
    double value_tol = 1e-10;
};

BoundsReport bounds_report(const FiniteModel& model, std::size_t y0, std::span<const std::size_t> horizons,
                           std::span<const double> discounts, const BoundsOptions& options = {});

struct OptimalityVerdict {
    double certificate_violation = 0.0;
    bool certificate_ok = false;
    /// max |k + psi(y0) - psi(y) + E[eta(f)] - eta(y) - mu| over t in [T0, t_max]
    /// and pairs carrying law mass > tol. Absent when the certificate is invalid.
    std::optional<double> cost_residual;
    /// max |E[psi(y(t))] - psi(y0)| over t in [T0, t_max].
    std::optional<double> psi_residual;
    bool certified = false;
};

OptimalityVerdict verify_long_run_optimality(const FiniteModel& model, const Plan& plan, const DualCertificate& dual,
                                             std::size_t y0, std::size_t t0, std::size_t t_max, double tol = 1e-8);

struct ExpansionDual {
    std::vector<double> psi;  ///< extrapolated v
    std::vector<double> eta;  ///< T (v_T - v) at the largest T
    double residual = 0.0;    ///< |inf over pairs of k - v + E[eta(f)] - eta|
};

/// Reads a dual pair off v_T = v + eta_T / T using the two largest horizons.
ExpansionDual dual_from_expansion(const FiniteModel& model, std::span<const std::size_t> horizons);

struct AbelWindow {
    double sigma = 0.0;
    std::size_t lower_bound = 1;
    std::size_t horizon = 0;
    double average = 0.0;
};

/// First T >= ceil(delta / ((4M + 4|sigma| + delta)(-ln(1-eps)))) with
/// (1/T) sum_{t<T} g(t) < sigma + delta + 2M/T, sigma the discounted mean of g.
AbelWindow abel_window(const std::function<double(std::size_t)>& g, double bound, double eps, double delta,
                       std::size_t search_cap = 100'000'000);

/// Smallest T* in [0, T) such that every window average of g starting at T*
/// of length S <= T - T* is at most mean(g[0..T)) + delta.
std::size_t cesaro_window(std::span<const double> g, std::size_t horizon, double delta);

}  // namespace occulimits
