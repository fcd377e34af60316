#include "occulimits/programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace occulimits {

double GMeasure::integrate(std::span<const double> table) const {
    if (table.size() != weights.size()) throw std::invalid_argument("integrate: table size mismatch");
    double acc = 0.0;
    for (std::size_t p = 0; p < weights.size(); ++p) acc += weights[p] * table[p];
    return acc;
}

std::vector<double> GMeasure::state_marginal(const FiniteModel& model) const {
    std::vector<double> out(model.num_states(), 0.0);
    for (std::size_t p = 0; p < weights.size(); ++p) out[model.pair_state(p)] += weights[p];
    return out;
}

namespace {

/// Column of the balance operator gamma_1(y') - sum P(y'|y,u) gamma(y,u),
/// scaled by `scale` on the transition part, offset into row block `base`.
void balance_column(const FiniteModel& model, std::size_t pair, std::size_t base, double scale,
                    std::vector<ColumnEntry>& out) {
    out.push_back({base + model.pair_state(pair), 1.0});
    for (const auto& e : model.transition().row(pair)) out.push_back({base + e.state, -scale * e.prob});
}

std::string pair_label(const char* var, const FiniteModel& model, std::size_t p) {
    return std::string(var) + "(" + std::to_string(model.pair_state(p)) + "," + std::to_string(model.pair_control(p)) + ")";
}

void check_state(const FiniteModel& model, std::size_t y0) {
    if (y0 >= model.num_states()) throw std::out_of_range("initial state index out of range");
}

GMeasure slice(const std::vector<double>& x, std::size_t begin, std::size_t count) {
    GMeasure g;
    g.weights.assign(x.begin() + static_cast<std::ptrdiff_t>(begin),
                     x.begin() + static_cast<std::ptrdiff_t>(begin + count));
    return g;
}

}  // namespace

ProgramResult stationary_lp(const FiniteModel& model) {
    const std::size_t n = model.num_states();
    LinearProgram lp(n + 1);
    lp.set_rhs(n, 1.0);
    std::vector<ColumnEntry> col;
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        col.clear();
        balance_column(model, p, 0, 1.0, col);
        col.push_back({n, 1.0});
        lp.add_variable(model.cost(p), col, pair_label("gamma", model, p));
    }
    const auto sol = solve_lp(lp);
    ProgramResult r;
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.multipliers = sol.y_dual;
    if (sol.status != LpStatus::optimal)
        throw ProgramError(std::string("stationary program reported ") + to_string(sol.status), r);
    r.optimal_value = sol.objective;
    r.gamma = slice(sol.x, 0, model.num_pairs());
    return r;
}

ProgramResult discounted_stationary_lp(const FiniteModel& model, double eps, std::size_t y0) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("discounted_stationary_lp: eps must lie in (0,1)");
    check_state(model, y0);
    const std::size_t n = model.num_states();
    LinearProgram lp(n);
    lp.set_rhs(y0, eps);
    std::vector<ColumnEntry> col;
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        col.clear();
        balance_column(model, p, 0, 1.0 - eps, col);
        lp.add_variable(model.cost(p), col, pair_label("gamma", model, p));
    }
    const auto sol = solve_lp(lp);
    ProgramResult r;
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.multipliers = sol.y_dual;
    if (sol.status != LpStatus::optimal)
        throw ProgramError(std::string("discounted program reported ") + to_string(sol.status), r);
    r.optimal_value = sol.objective;
    r.gamma = slice(sol.x, 0, model.num_pairs());
    return r;
}

ProgramResult augmented_lp(const FiniteModel& model, std::size_t y0, std::optional<std::span<const double>> theta) {
    check_state(model, y0);
    const std::size_t n = model.num_states();
    const std::size_t pairs = model.num_pairs();
    if (theta) {
        if (theta->size() != pairs) throw std::invalid_argument("augmented_lp: theta size mismatch");
        for (double t : *theta)
            if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("augmented_lp: theta must be finite and nonnegative");
    }
    // Rows: [0, n) gamma stationarity, n normalization, [n+1, 2n+1) xi block.
    const std::size_t norm = n, xi_base = n + 1;
    LinearProgram lp(2 * n + 1);
    lp.set_rhs(norm, 1.0);
    lp.set_rhs(xi_base + y0, 1.0);
    std::vector<ColumnEntry> col;
    for (std::size_t p = 0; p < pairs; ++p) {
        col.clear();
        balance_column(model, p, 0, 1.0, col);
        col.push_back({norm, 1.0});
        col.push_back({xi_base + model.pair_state(p), 1.0});
        lp.add_variable(model.cost(p), col, pair_label("gamma", model, p));
    }
    for (std::size_t p = 0; p < pairs; ++p) {
        col.clear();
        balance_column(model, p, xi_base, 1.0, col);
        lp.add_variable(theta ? (*theta)[p] : 0.0, col, pair_label("xi", model, p));
    }
    const auto sol = solve_lp(lp);
    ProgramResult r;
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.multipliers = sol.y_dual;
    if (sol.status != LpStatus::optimal)
        throw ProgramError(std::string("augmented program reported ") + to_string(sol.status) +
                               " (initial state cannot reach a recurrent class)",
                           r);
    r.optimal_value = sol.objective;
    r.gamma = slice(sol.x, 0, pairs);
    r.xi = slice(sol.x, pairs, pairs);

    DualCertificate dual;
    dual.eta.assign(sol.y_dual.begin(), sol.y_dual.begin() + static_cast<std::ptrdiff_t>(n));
    dual.psi.assign(sol.y_dual.begin() + static_cast<std::ptrdiff_t>(xi_base),
                    sol.y_dual.begin() + static_cast<std::ptrdiff_t>(xi_base + n));
    // Normalization multiplier plus psi(y0) is the dual objective b^T y.
    dual.mu = sol.y_dual[norm] + dual.psi[y0];
    r.dual = std::move(dual);
    return r;
}

double certificate_violation(const FiniteModel& model, std::size_t y0, const DualCertificate& dual,
                             std::optional<std::span<const double>> theta) {
    check_state(model, y0);
    if (dual.psi.size() != model.num_states() || dual.eta.size() != model.num_states())
        throw std::invalid_argument("certificate_violation: dual size mismatch");
    const auto& tr = model.transition();
    double worst = 0.0;
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const std::size_t y = model.pair_state(p);
        const double first = model.cost(p) + dual.psi[y0] - dual.psi[y] + tr.expect(p, dual.eta) - dual.eta[y] - dual.mu;
        const double second = tr.expect(p, dual.psi) - dual.psi[y] + (theta ? (*theta)[p] : 0.0);
        worst = std::max({worst, -first, -second});
    }
    return worst;
}

double certificate_lower_bound(const FiniteModel& model, std::size_t y0, const DualCertificate& dual) {
    const auto& tr = model.transition();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const std::size_t y = model.pair_state(p);
        lo = std::min(lo, model.cost(p) + dual.psi[y0] - dual.psi[y] + tr.expect(p, dual.eta) - dual.eta[y]);
    }
    return lo;
}

namespace {

/// gamma_1 - scale * P^T gamma, per state.
std::vector<double> balance_defect(const FiniteModel& model, const GMeasure& g, double scale) {
    std::vector<double> out(model.num_states(), 0.0);
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const double w = g.weights[p];
        if (w == 0.0) continue;
        out[model.pair_state(p)] += w;
        for (const auto& e : model.transition().row(p)) out[e.state] -= scale * e.prob * w;
    }
    return out;
}

double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

double membership_residuals(const FiniteModel& model, const GMeasure& gamma, const MembershipSet& which) {
    if (gamma.weights.size() != model.num_pairs())
        throw std::invalid_argument("membership_residuals: measure has " + std::to_string(gamma.weights.size()) +
                                    " weights, model has " + std::to_string(model.num_pairs()) + " pairs");
    const double norm_defect = std::abs(gamma.total_mass() - 1.0);
    return std::visit(
        [&](const auto& set) -> double {
            using T = std::decay_t<decltype(set)>;
            if constexpr (std::is_same_v<T, StationarySet>) {
                return std::max(norm_defect, sup_norm(balance_defect(model, gamma, 1.0)));
            } else if constexpr (std::is_same_v<T, DiscountedSet>) {
                check_state(model, set.y0);
                auto d = balance_defect(model, gamma, 1.0 - set.eps);
                d[set.y0] -= set.eps;
                return std::max(norm_defect, sup_norm(d));
            } else {
                check_state(model, set.y0);
                if (set.xi.weights.size() != model.num_pairs())
                    throw std::invalid_argument("membership_residuals: xi dimension mismatch");
                const double w = sup_norm(balance_defect(model, gamma, 1.0));
                auto d = balance_defect(model, set.xi, 1.0);
                const auto marginal = gamma.state_marginal(model);
                for (std::size_t y = 0; y < d.size(); ++y) d[y] += marginal[y];
                d[set.y0] -= 1.0;
                return std::max({norm_defect, w, sup_norm(d)});
            }
        },
        which);
}

}  // namespace occulimits
