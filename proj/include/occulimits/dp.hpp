#pragma once

#include "occulimits/model.hpp"
#include "occulimits/plan.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace occulimits {

struct ValueFunction {
    std::vector<double> values;
};

struct FiniteHorizonResult {
    /// v[t-1] holds v_t for t = 1..T.
    std::vector<ValueFunction> v;
    /// Optimal staged plan for horizon T; stage t uses the argmin of the
    /// (T - t)-step problem.
    Plan plan;

    const ValueFunction& at(std::size_t t) const { return v.at(t - 1); }
};

/// Backward recursion T v_T(y) = min_u { k(y,u) + (T-1) E[v_{T-1}(f)] }, v_0 = 0.
/// Argmins break ties toward the lowest control index.
FiniteHorizonResult finite_horizon_values(const FiniteModel& model, std::size_t horizon);

struct DiscountedResult {
    ValueFunction h;
    Plan plan;
    std::size_t iterations = 0;
};

/// Value iteration on h(y) = min_u { eps k(y,u) + (1-eps) E[h(f)] }, stopped
/// once the sup-norm change is <= tol * eps so that the fixed-point error is <= tol.
DiscountedResult discounted_values(const FiniteModel& model, double eps, double tol = 1e-10);

/// u(y) = argmin_u { k(y,u) + E[eta(f(y,u,s))] }, lowest index on ties.
Plan greedy_feedback_from_eta(const FiniteModel& model, std::span<const double> eta);

/// (1/T) E[sum_{t<T} k(y(t), u(t))] from y0, by exact distribution propagation.
double evaluate_plan_average(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon);

/// eps sum_t (1-eps)^t E[k] for every initial state, for a stationary plan
/// (direct linear solve).
std::vector<double> evaluate_plan_discounted(const FiniteModel& model, const Plan& plan, double eps);

}  // namespace occulimits
