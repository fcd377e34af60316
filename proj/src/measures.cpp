#include "occulimits/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace occulimits {

namespace {

void check_inputs(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon) {
    if (y0 >= model.num_states()) throw std::out_of_range("initial state index out of range");
    plan.check(model);
    if (!plan.stationary() && plan.horizon() < horizon)
        throw std::invalid_argument("staged plan has " + std::to_string(plan.horizon()) + " stages, need " +
                                    std::to_string(horizon));
}

/// One propagation step: law of y(t+1) from the law of y(t) and pi_t.
void step(const FiniteModel& model, const std::vector<double>& mu, const std::vector<double>& weights,
          std::vector<double>& next) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const double mass = mu[model.pair_state(p)] * weights[p];
        if (mass == 0.0) continue;
        for (const auto& e : model.transition().row(p)) next[e.state] += mass * e.prob;
    }
}

}  // namespace

DistributionPath propagate(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon) {
    check_inputs(model, plan, y0, horizon);
    DistributionPath path;
    path.mu.reserve(horizon + 1);
    std::vector<double> mu(model.num_states(), 0.0);
    mu[y0] = 1.0;
    path.mu.push_back(mu);
    std::vector<double> weights = plan.stationary() ? plan.pair_weights(model, 0) : std::vector<double>{};
    std::vector<double> next(model.num_states());
    for (std::size_t t = 0; t < horizon; ++t) {
        if (!plan.stationary()) weights = plan.pair_weights(model, t);
        step(model, path.mu.back(), weights, next);
        path.mu.push_back(next);
    }
    return path;
}

std::vector<std::vector<double>> joint_laws(const FiniteModel& model, const Plan& plan, std::size_t y0,
                                            std::size_t horizon) {
    const auto path = propagate(model, plan, y0, horizon > 0 ? horizon - 1 : 0);
    std::vector<std::vector<double>> laws;
    laws.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        auto w = plan.pair_weights(model, t);
        for (std::size_t p = 0; p < w.size(); ++p) w[p] *= path.mu[t][model.pair_state(p)];
        laws.push_back(std::move(w));
    }
    return laws;
}

GMeasure occupation_measure(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("occupation_measure: T must be positive");
    check_inputs(model, plan, y0, horizon);
    GMeasure g;
    g.weights.assign(model.num_pairs(), 0.0);
    std::vector<double> mu(model.num_states(), 0.0), next(model.num_states());
    mu[y0] = 1.0;
    std::vector<double> weights = plan.stationary() ? plan.pair_weights(model, 0) : std::vector<double>{};
    for (std::size_t t = 0; t < horizon; ++t) {
        if (!plan.stationary()) weights = plan.pair_weights(model, t);
        for (std::size_t p = 0; p < model.num_pairs(); ++p) g.weights[p] += mu[model.pair_state(p)] * weights[p];
        if (t + 1 < horizon) {
            step(model, mu, weights, next);
            std::swap(mu, next);
        }
    }
    for (auto& w : g.weights) w /= static_cast<double>(horizon);
    return g;
}

GMeasure discounted_occupation(const FiniteModel& model, const Plan& plan, std::size_t y0, double eps,
                               double tail_tol) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("discounted_occupation: eps must lie in (0,1)");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("discounted_occupation: tail_tol must be positive");
    // Stages needed so that (1-eps)^T < tail_tol.
    const auto stages = static_cast<std::size_t>(std::ceil(std::log(tail_tol) / std::log1p(-eps))) + 1;
    check_inputs(model, plan, y0, stages);

    GMeasure g;
    g.weights.assign(model.num_pairs(), 0.0);
    std::vector<double> mu(model.num_states(), 0.0), next(model.num_states());
    mu[y0] = 1.0;
    std::vector<double> weights = plan.stationary() ? plan.pair_weights(model, 0) : std::vector<double>{};
    double discount = eps;
    for (std::size_t t = 0; t < stages; ++t) {
        if (!plan.stationary()) weights = plan.pair_weights(model, t);
        for (std::size_t p = 0; p < model.num_pairs(); ++p)
            g.weights[p] += discount * mu[model.pair_state(p)] * weights[p];
        step(model, mu, weights, next);
        std::swap(mu, next);
        discount *= 1.0 - eps;
    }
    const double mass = g.total_mass();
    for (auto& w : g.weights) w /= mass;
    return g;
}

TestFamily canonical_test_family(const FiniteModel& model, int max_degree, std::size_t max_size) {
    if (max_degree < 0) throw std::invalid_argument("canonical_test_family: negative degree");
    // Coordinates z = (state coords, control coords) per pair.
    std::vector<std::vector<double>> z(model.num_pairs());
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        z[p] = model.state(model.pair_state(p)).coords;
        const auto& u = model.control_value(model.pair_state(p), model.pair_control(p));
        z[p].insert(z[p].end(), u.begin(), u.end());
    }
    std::size_t dim = 0;
    for (const auto& v : z) dim = std::max(dim, v.size());
    for (auto& v : z) v.resize(dim, 0.0);

    // Exponent vectors of total degree d in lexicographically descending order.
    std::vector<std::vector<int>> exponents;
    std::vector<int> e(dim, 0);
    auto emit = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i + 1 == dim) {
            e[i] = remaining;
            exponents.push_back(e);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            e[i] = k;
            self(self, i + 1, remaining - k);
        }
    };
    for (int d = 0; d <= max_degree; ++d) {
        if (dim == 0) {
            if (d == 0) exponents.emplace_back();
            continue;
        }
        emit(emit, 0, d);
    }

    TestFamily fam;
    for (const auto& ex : exponents) {
        if (fam.tables.size() >= max_size) break;
        std::vector<double> table(model.num_pairs());
        double sup = 0.0;
        for (std::size_t p = 0; p < model.num_pairs(); ++p) {
            double v = 1.0;
            for (std::size_t i = 0; i < dim; ++i) v *= std::pow(z[p][i], ex[i]);
            table[p] = v;
            sup = std::max(sup, std::abs(v));
        }
        if (sup == 0.0) continue;
        for (auto& v : table) v /= sup;
        fam.tables.push_back(std::move(table));
    }
    return fam;
}

double rho(const GMeasure& g1, const GMeasure& g2, const TestFamily& family) {
    if (family.tables.empty()) throw std::invalid_argument("rho: empty test family");
    if (g1.weights.size() != g2.weights.size()) throw std::invalid_argument("rho: measures live on different models");
    double acc = 0.0, weight = 0.5;
    for (const auto& q : family.tables) {
        acc += weight * std::abs(g1.integrate(q) - g2.integrate(q));
        weight *= 0.5;
    }
    return acc;
}

double hausdorff(const std::vector<GMeasure>& a, const std::vector<GMeasure>& b, const TestFamily& family) {
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty set");
    auto directed = [&](const std::vector<GMeasure>& from, const std::vector<GMeasure>& to) {
        double worst = 0.0;
        for (const auto& g : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& h : to) nearest = std::min(nearest, rho(g, h, family));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::optional<PrgResult> prg_detect(const FiniteModel& model, const Plan& plan, std::size_t y0, std::size_t t_max,
                                    double tol) {
    if (t_max < 2) throw std::invalid_argument("prg_detect: t_max must be at least 2");
    const auto laws = joint_laws(model, plan, y0, t_max + 1);

    // last_fail[p] = largest t <= t_max - p with ||law_{t+p} - law_t|| > tol, or -1.
    std::vector<std::ptrdiff_t> last_fail(t_max / 2 + 1, -1);
    for (std::size_t period = 1; period <= t_max / 2; ++period) {
        for (std::size_t t = t_max - period + 1; t-- > 0;) {
            const auto& a = laws[t];
            const auto& b = laws[t + period];
            bool close = true;
            for (std::size_t p = 0; p < a.size() && close; ++p) close = std::abs(a[p] - b[p]) <= tol;
            if (!close) {
                last_fail[period] = static_cast<std::ptrdiff_t>(t);
                break;
            }
        }
    }
    for (std::size_t t0 = 0; t0 + 2 <= t_max; ++t0)
        for (std::size_t period = 1; t0 + 2 * period <= t_max; ++period)
            if (last_fail[period] < static_cast<std::ptrdiff_t>(t0)) return PrgResult{t0, period};
    return std::nullopt;
}

}  // namespace occulimits
