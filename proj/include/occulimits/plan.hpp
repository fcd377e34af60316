#pragma once

#include "occulimits/model.hpp"

#include <cstddef>
#include <vector>

namespace occulimits {

/**
 * Control plan. Stationary plans apply the same selector at every stage;
 * staged plans carry one deterministic selector per stage t = 0..T-1.
 */
class Plan {
  public:
    enum class Kind { stationary_deterministic, stationary_randomized, staged };

    static Plan deterministic(std::vector<std::size_t> selector);
    static Plan randomized(std::vector<std::vector<double>> kernel);
    static Plan staged(std::vector<std::vector<std::size_t>> stages);

    Kind kind() const noexcept { return kind_; }
    bool stationary() const noexcept { return kind_ != Kind::staged; }
    /// Number of stages for staged plans; stationary plans are unbounded.
    std::size_t horizon() const noexcept;

    const std::vector<std::size_t>& selector() const noexcept { return selector_; }
    const std::vector<std::vector<double>>& kernel() const noexcept { return kernel_; }
    const std::vector<std::vector<std::size_t>>& stages() const noexcept { return stages_; }

    /// pi_t(u|y) as a pair-indexed table. Throws when the plan does not fit
    /// the model or t is beyond a staged plan's horizon.
    std::vector<double> pair_weights(const FiniteModel& model, std::size_t t) const;

    /// Throws std::invalid_argument if the plan is inconsistent with the model.
    void check(const FiniteModel& model) const;

  private:
    Kind kind_ = Kind::stationary_deterministic;
    std::vector<std::size_t> selector_;
    std::vector<std::vector<double>> kernel_;
    std::vector<std::vector<std::size_t>> stages_;
};

}  // namespace occulimits
