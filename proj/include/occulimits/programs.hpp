#pragma once

#include "occulimits/lp.hpp"
#include "occulimits/model.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace occulimits {

/// Nonnegative measure on the admissible pairs of a model (one weight per pair).
struct GMeasure {
    std::vector<double> weights;

    double total_mass() const noexcept {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    /// Integral of a pair-indexed table.
    double integrate(std::span<const double> table) const;
    /// Marginal on states.
    std::vector<double> state_marginal(const FiniteModel& model) const;
};

/**
 * Dual triple (mu, psi, eta) of the augmented program. Feasible when, for
 * every admissible pair,
 *
 *   k(y,u) + psi(y0) - psi(y) + E[eta(f(y,u,s))] - eta(y) - mu >= 0
 *   E[psi(f(y,u,s))] - psi(y) >= -theta(y,u)
 *
 * mu equals the dual objective and therefore the program value.
 */
struct DualCertificate {
    double mu = 0.0;
    std::vector<double> psi;
    std::vector<double> eta;
};

struct ProgramResult {
    LpStatus status = LpStatus::optimal;
    double optimal_value = 0.0;
    GMeasure gamma;
    std::optional<GMeasure> xi;
    std::optional<DualCertificate> dual;
    /// Raw multipliers (for the augmented program: the Farkas ray when infeasible).
    std::vector<double> multipliers;
    std::size_t iterations = 0;
};

/// Raised when a program that must be solvable is reported otherwise.
class ProgramError : public std::runtime_error {
  public:
    ProgramError(const std::string& what, ProgramResult partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const ProgramResult& partial() const noexcept { return partial_; }

  private:
    ProgramResult partial_;
};

/// min over gamma in W of the integral of k: stationary measures.
ProgramResult stationary_lp(const FiniteModel& model);

/// min over gamma in W(eps, y0); equals the discounted value h_eps(y0).
ProgramResult discounted_stationary_lp(const FiniteModel& model, double eps, std::size_t y0);

/// min over (gamma, xi) in Omega(y0) of k.gamma (+ theta.xi). Throws ProgramError
/// with the Farkas certificate in partial().multipliers when infeasible.
ProgramResult augmented_lp(const FiniteModel& model, std::size_t y0,
                           std::optional<std::span<const double>> theta = std::nullopt);

/// Largest violation of the two certificate inequality families (0 when feasible).
double certificate_violation(const FiniteModel& model, std::size_t y0, const DualCertificate& dual,
                             std::optional<std::span<const double>> theta = std::nullopt);

/// Value of min over pairs of the first certificate expression without mu.
double certificate_lower_bound(const FiniteModel& model, std::size_t y0, const DualCertificate& dual);

struct StationarySet {};
struct DiscountedSet {
    double eps = 0.0;
    std::size_t y0 = 0;
};
struct AugmentedSet {
    GMeasure xi;
    std::size_t y0 = 0;
};
using MembershipSet = std::variant<StationarySet, DiscountedSet, AugmentedSet>;

/// Sup-norm of the balance-equation defects of gamma (and xi) in the set.
/// The normalization defect |mass(gamma) - 1| is included. Throws
/// std::invalid_argument on dimension mismatch.
double membership_residuals(const FiniteModel& model, const GMeasure& gamma, const MembershipSet& which);

}  // namespace occulimits
