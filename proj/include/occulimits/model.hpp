#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace occulimits {

/// A point of the finite state grid.
struct StatePoint {
    std::vector<double> coords;
    std::size_t index = 0;
};

/// One atom of the finite-support noise distribution.
struct NoiseAtom {
    int id = 0;
    double prob = 0.0;
};

/// Raised when a model cannot be constructed or fails validation.
class ModelError : public std::runtime_error {
  public:
    explicit ModelError(const std::string& what,
                        std::vector<std::string> violations = {})
        : std::runtime_error(what), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/// Sparse probability row over next states, stored for one admissible pair.
struct TransitionEntry {
    std::size_t state = 0;
    double prob = 0.0;
};

/**
 * Transition law P(.|y,u) for every admissible (state, control) pair.
 *
 * Rows are kept in compressed form: the entries of pair p live in
 * [row_start[p], row_start[p+1]) and are sorted by state index with no
 * duplicates.
 */
class TransitionTensor {
  public:
    TransitionTensor() = default;
    TransitionTensor(std::size_t num_states, std::vector<std::size_t> row_start,
                     std::vector<TransitionEntry> entries);

    std::size_t num_pairs() const noexcept {
        return row_start_.empty() ? 0 : row_start_.size() - 1;
    }
    std::size_t num_states() const noexcept { return num_states_; }

    std::span<const TransitionEntry> row(std::size_t pair) const {
        return {entries_.data() + row_start_[pair], row_start_[pair + 1] - row_start_[pair]};
    }

    /// P(next | pair); zero when next is not in the row's support.
    double prob(std::size_t pair, std::size_t next) const;

    /// E[phi(f(y,u,s))] for the given pair.
    double expect(std::size_t pair, std::span<const double> phi) const {
        double acc = 0.0;
        for (const auto& e : row(pair)) acc += e.prob * phi[e.state];
        return acc;
    }

  private:
    std::size_t num_states_ = 0;
    std::vector<std::size_t> row_start_;
    std::vector<TransitionEntry> entries_;
};

/// Raw model content as read from a file or produced by a builder.
struct ModelData {
    std::string name;
    std::vector<StatePoint> states;
    /// control_values[y][j] is the value vector of control j at state y.
    std::vector<std::vector<std::vector<double>>> controls;
    std::vector<NoiseAtom> noise;
    /// dynamics[pair * noise.size() + atom] = next state index; empty when
    /// an explicit transition is supplied instead.
    std::vector<std::int64_t> dynamics;
    /// Explicit transition rows per pair (dense over states); empty when
    /// dynamics is used.
    std::vector<std::vector<double>> transition;
    /// cost[pair]
    std::vector<double> cost;
    std::optional<std::size_t> initial_state;
};

/**
 * Finite controlled stochastic recursion y(t+1) = f(y(t), u(t), s(t)).
 *
 * Admissible (state, control) pairs are numbered contiguously: the pairs of
 * state y occupy [pair_begin(y), pair_end(y)) in control-index order. All
 * pair-indexed tables (cost, measures, transition rows) use this numbering.
 * Immutable after construction.
 */
class FiniteModel {
  public:
    /// Validates and builds. Throws ModelError listing every violation.
    explicit FiniteModel(ModelData data);

    const std::string& name() const noexcept { return data_.name; }
    std::size_t num_states() const noexcept { return data_.states.size(); }
    std::size_t num_pairs() const noexcept { return pair_state_.size(); }
    std::size_t num_controls(std::size_t state) const {
        return data_.controls[state].size();
    }

    std::size_t pair_begin(std::size_t state) const { return pair_offset_[state]; }
    std::size_t pair_end(std::size_t state) const { return pair_offset_[state + 1]; }
    std::size_t pair_index(std::size_t state, std::size_t control) const {
        return pair_offset_[state] + control;
    }
    std::size_t pair_state(std::size_t pair) const { return pair_state_[pair]; }
    std::size_t pair_control(std::size_t pair) const {
        return pair - pair_offset_[pair_state_[pair]];
    }

    const std::vector<StatePoint>& states() const noexcept { return data_.states; }
    const StatePoint& state(std::size_t y) const { return data_.states[y]; }
    const std::vector<double>& control_value(std::size_t state, std::size_t control) const {
        return data_.controls[state][control];
    }
    const std::vector<NoiseAtom>& noise() const noexcept { return data_.noise; }
    bool has_dynamics() const noexcept { return !data_.dynamics.empty(); }
    std::size_t next_state(std::size_t pair, std::size_t atom) const {
        return static_cast<std::size_t>(data_.dynamics[pair * data_.noise.size() + atom]);
    }

    std::span<const double> cost() const noexcept { return data_.cost; }
    double cost(std::size_t pair) const { return data_.cost[pair]; }
    /// M = max |k(y,u)| over admissible pairs.
    double cost_bound() const noexcept { return cost_bound_; }

    std::optional<std::size_t> initial_state() const noexcept { return data_.initial_state; }

    const TransitionTensor& transition() const noexcept { return transition_; }
    const ModelData& data() const noexcept { return data_; }

    /// Index of the state whose first coordinate equals x within tol.
    std::optional<std::size_t> find_state(double x, double tol = 1e-12) const;

  private:
    ModelData data_;
    std::vector<std::size_t> pair_offset_;
    std::vector<std::size_t> pair_state_;
    double cost_bound_ = 0.0;
    TransitionTensor transition_;
};

/// Validation report; empty violations means valid.
struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const ModelData& data);
inline ValidationReport validate(const FiniteModel& model) { return validate(model.data()); }

/// P[(y,u)][y'] = sum of prob(s) over atoms with f(y,u,s) = y'.
/// Throws ModelError naming the offending (state, control, noise) triple.
TransitionTensor build_transition_tensor(const ModelData& data);
inline const TransitionTensor& build_transition_tensor(const FiniteModel& model) {
    return model.transition();
}

/// y(t+1) = y u s on the two-state class {-|y0|, |y0|}, U = {-1, 1},
/// s = 1 w.p. 3/4 and -1 w.p. 1/4, k(y,u) = y.
FiniteModel example1_model(double y0);

/// Union of the Example-1 classes {-a, a} for every magnitude a, states sorted
/// ascending. Includes the absorbing state 0 when with_zero is set.
FiniteModel example1_family_model(const std::vector<double>& magnitudes, bool with_zero = false);

/**
 * y(t+1) = u s on the dyadic grid of step 2^-m over [-1, 1], with
 * U(y) = [-1, y] for y < 0, [-1, 1] at 0 and [y, 1] for y > 0 sampled at
 * control_step, s in {1, 1/4} with equal probability, k(y,u) = y.
 *
 * Images u*s are snapped to the nearest grid point with ties toward 0, except
 * that a nonzero image never snaps onto 0 (it goes to +-2^-m instead).
 */
FiniteModel example2_model(int m, double control_step);

/// Example 2 restricted to the exact positive orbit {y0 4^-k : k <= depth}
/// under the plan u = y; the deepest level maps to itself.
FiniteModel example2_orbit_model(double y0, int depth);

/// Cyclic two-control model on num_states states with k identically c.
FiniteModel constant_cost_model(std::size_t num_states, double c);

struct RandomModelOptions {
    std::uint64_t seed = 0;
    std::size_t max_states = 8;
    std::size_t max_controls = 4;
    std::size_t max_atoms = 3;
    /// When positive, transition rows are explicit with every entry >= this
    /// floor. Otherwise dynamics are drawn per atom (possibly multichain).
    double min_transition_prob = 0.05;
    double cost_bound = 1.0;
};

FiniteModel random_model(const RandomModelOptions& options);

FiniteModel load_model(const std::filesystem::path& path);
FiniteModel parse_model(const std::string& json_text);
std::string model_to_json(const FiniteModel& model);

}  // namespace occulimits
