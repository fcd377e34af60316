#include "occulimits/dp.hpp"

#include "occulimits/measures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace occulimits {

namespace {

// Candidates within this relative band of the running minimum count as ties.
constexpr double kTieTol = 1e-13;

bool strictly_better(double candidate, double best) {
    if (std::isinf(best)) return candidate < best;
    return candidate < best - kTieTol * (1.0 + std::abs(best));
}

}  // namespace

FiniteHorizonResult finite_horizon_values(const FiniteModel& model, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("finite_horizon_values: T must be positive");
    const std::size_t n = model.num_states();
    const auto& tr = model.transition();

    FiniteHorizonResult out;
    out.v.reserve(horizon);
    std::vector<std::vector<std::size_t>> stages(horizon, std::vector<std::size_t>(n, 0));

    // total[y] = t v_t(y)
    std::vector<double> prev(n, 0.0), total(n, 0.0);
    for (std::size_t t = 1; t <= horizon; ++t) {
        auto& argmin = stages[horizon - t];
        for (std::size_t y = 0; y < n; ++y) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_u = 0;
            for (std::size_t p = model.pair_begin(y); p < model.pair_end(y); ++p) {
                const double q = model.cost(p) + tr.expect(p, prev);
                if (strictly_better(q, best)) {
                    best = q;
                    best_u = p - model.pair_begin(y);
                }
            }
            total[y] = best;
            argmin[y] = best_u;
        }
        ValueFunction vf;
        vf.values.resize(n);
        for (std::size_t y = 0; y < n; ++y) vf.values[y] = total[y] / static_cast<double>(t);
        out.v.push_back(std::move(vf));
        std::swap(prev, total);
    }
    out.plan = Plan::staged(std::move(stages));
    return out;
}

DiscountedResult discounted_values(const FiniteModel& model, double eps, double tol) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("discounted_values: eps must lie in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("discounted_values: tol must be positive");
    const std::size_t n = model.num_states();
    const auto& tr = model.transition();
    const double keep = 1.0 - eps;

    std::vector<double> scaled_cost(model.num_pairs());
    for (std::size_t p = 0; p < model.num_pairs(); ++p) scaled_cost[p] = eps * model.cost(p);

    const double bound = model.cost_bound() + 1.0;
    const auto max_iter = static_cast<std::size_t>(2.0 * std::log(bound / (tol * eps)) / eps) + 1000;

    std::vector<double> h(n, 0.0), next(n, 0.0);
    DiscountedResult out;
    const double stop = tol * eps;
    for (std::size_t it = 1;; ++it) {
        if (it > max_iter) throw std::runtime_error("discounted_values: value iteration did not converge");
        double change = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t p = model.pair_begin(y); p < model.pair_end(y); ++p)
                best = std::min(best, scaled_cost[p] + keep * tr.expect(p, h));
            next[y] = best;
            change = std::max(change, std::abs(best - h[y]));
        }
        std::swap(h, next);
        if (change <= stop) {
            out.iterations = it;
            break;
        }
    }

    std::vector<std::size_t> selector(n, 0);
    for (std::size_t y = 0; y < n; ++y) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = model.pair_begin(y); p < model.pair_end(y); ++p) {
            const double q = scaled_cost[p] + keep * tr.expect(p, h);
            if (strictly_better(q, best)) {
                best = q;
                selector[y] = p - model.pair_begin(y);
            }
        }
    }
    out.h.values = std::move(h);
    out.plan = Plan::deterministic(std::move(selector));
    return out;
}

Plan greedy_feedback_from_eta(const FiniteModel& model, std::span<const double> eta) {
    if (eta.size() != model.num_states()) throw std::invalid_argument("greedy_feedback_from_eta: eta size mismatch");
    for (double e : eta)
        if (!std::isfinite(e)) throw std::invalid_argument("greedy_feedback_from_eta: eta must be finite");
    const auto& tr = model.transition();
    std::vector<std::size_t> selector(model.num_states(), 0);
    for (std::size_t y = 0; y < model.num_states(); ++y) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = model.pair_begin(y); p < model.pair_end(y); ++p) {
            const double q = model.cost(p) + tr.expect(p, eta);
            if (strictly_better(q, best)) {
                best = q;
                selector[y] = p - model.pair_begin(y);
            }
        }
    }
    return Plan::deterministic(std::move(selector));
}

double evaluate_plan_average(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("evaluate_plan_average: T must be positive");
    const auto path = propagate(model, plan, y0, horizon);
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto w = plan.pair_weights(model, t);
        double stage = 0.0;
        for (std::size_t p = 0; p < model.num_pairs(); ++p)
            stage += path.mu[t][model.pair_state(p)] * w[p] * model.cost(p);
        total += stage;
    }
    return total / static_cast<double>(horizon);
}

std::vector<double> evaluate_plan_discounted(const FiniteModel& model, const Plan& plan, double eps) {
    if (!plan.stationary()) throw std::invalid_argument("evaluate_plan_discounted: plan must be stationary");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("evaluate_plan_discounted: eps must lie in (0,1)");
    plan.check(model);
    const auto n = static_cast<Eigen::Index>(model.num_states());
    const auto w = plan.pair_weights(model, 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        if (w[p] == 0.0) continue;
        const auto y = static_cast<Eigen::Index>(model.pair_state(p));
        rhs(y) += eps * w[p] * model.cost(p);
        for (const auto& e : model.transition().row(p))
            a(y, static_cast<Eigen::Index>(e.state)) -= (1.0 - eps) * w[p] * e.prob;
    }
    const Eigen::VectorXd h = a.partialPivLu().solve(rhs);
    return {h.data(), h.data() + n};
}

}  // namespace occulimits
