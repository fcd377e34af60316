#include "occulimits/analysis.hpp"

#include "occulimits/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace occulimits {

namespace {

void check_horizons(std::span<const std::size_t> horizons) {
    if (horizons.empty()) throw std::invalid_argument("horizon list is empty");
    if (horizons.front() == 0) throw std::invalid_argument("horizons must be positive");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1]) throw std::invalid_argument("horizons must be strictly increasing");
}

void check_discounts(std::span<const double> discounts) {
    if (discounts.empty()) throw std::invalid_argument("discount list is empty");
    for (std::size_t i = 0; i < discounts.size(); ++i) {
        if (!(discounts[i] > 0.0 && discounts[i] < 1.0))
            throw std::invalid_argument("discount factors must lie in (0,1)");
        if (i > 0 && discounts[i] >= discounts[i - 1])
            throw std::invalid_argument("discount factors must be strictly decreasing");
    }
}

}  // namespace

BoundsReport bounds_report(const FiniteModel& model, std::size_t y0, std::span<const std::size_t> horizons,
                           std::span<const double> discounts, const BoundsOptions& options) {
    if (y0 >= model.num_states()) throw std::out_of_range("initial state index out of range");
    check_horizons(horizons);
    check_discounts(discounts);

    BoundsReport rep;
    rep.y0 = y0;
    rep.cost_bound = model.cost_bound();

    const auto aug = augmented_lp(model, y0);
    rep.k_star_y0 = aug.optimal_value;
    rep.d_star_y0 = aug.dual ? aug.dual->mu : aug.optimal_value;
    rep.xi_mass = aug.xi ? aug.xi->total_mass() : 0.0;
    rep.certificate_violation = aug.dual ? certificate_violation(model, y0, *aug.dual) : 0.0;
    rep.k_star = stationary_lp(model).optimal_value;
    rep.gap = rep.k_star_y0 - rep.d_star_y0;
    rep.strong_duality = std::abs(rep.gap) <= 1e-6;

    const double m = model.cost_bound();
    const double spread = 1.0 + rep.xi_mass;
    auto inside = [&](double value, double slack) {
        return value >= rep.d_star_y0 - slack && value <= rep.k_star_y0 + slack;
    };

    const auto fh = finite_horizon_values(model, horizons.back());
    for (std::size_t t : horizons) {
        CurvePoint pt;
        pt.parameter = static_cast<double>(t);
        pt.value = fh.at(t).values[y0];
        pt.slack = 2.0 * m * spread / static_cast<double>(t) + 1e-6;
        pt.in_sandwich = inside(pt.value, pt.slack);
        rep.vT_curve.push_back(pt);
    }

    rep.heps_curve.resize(discounts.size());
    parallel_for(discounts.size(), [&](std::size_t i) {
        const double eps = discounts[i];
        CurvePoint pt;
        pt.parameter = eps;
        pt.value = discounted_values(model, eps, options.value_tol).h.values[y0];
        pt.slack = 2.0 * m * eps * spread + 1e-6;
        pt.in_sandwich = inside(pt.value, pt.slack);
        rep.heps_curve[i] = pt;
    });

    rep.sandwich_ok = std::all_of(rep.vT_curve.begin(), rep.vT_curve.end(), [](auto& p) { return p.in_sandwich; }) &&
                      std::all_of(rep.heps_curve.begin(), rep.heps_curve.end(), [](auto& p) { return p.in_sandwich; });
    rep.vT_limit_error = std::abs(rep.vT_curve.back().value - rep.k_star_y0);
    rep.heps_limit_error = std::abs(rep.heps_curve.back().value - rep.k_star_y0);
    if (rep.strong_duality)
        rep.limits_ok = rep.vT_limit_error <= options.limit_slack && rep.heps_limit_error <= options.limit_slack;
    return rep;
}

OptimalityVerdict verify_long_run_optimality(const FiniteModel& model, const Plan& plan, const DualCertificate& dual,
                                             std::size_t y0, std::size_t t0, std::size_t t_max, double tol) {
    if (y0 >= model.num_states()) throw std::out_of_range("initial state index out of range");
    if (t0 > t_max) throw std::invalid_argument("verify_long_run_optimality: T0 exceeds t_max");
    if (dual.psi.size() != model.num_states() || dual.eta.size() != model.num_states())
        throw std::invalid_argument("verify_long_run_optimality: certificate size mismatch");

    OptimalityVerdict out;
    out.certificate_violation = certificate_violation(model, y0, dual);
    out.certificate_ok = out.certificate_violation <= tol;
    if (!out.certificate_ok) return out;

    const auto& tr = model.transition();
    std::vector<double> gap(model.num_pairs());
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const std::size_t y = model.pair_state(p);
        gap[p] = model.cost(p) + dual.psi[y0] - dual.psi[y] + tr.expect(p, dual.eta) - dual.eta[y] - dual.mu;
    }

    const auto path = propagate(model, plan, y0, t_max);
    double cost_res = 0.0, psi_res = 0.0;
    for (std::size_t t = t0; t <= t_max; ++t) {
        const auto& mu = path.mu[t];
        const auto w = plan.pair_weights(model, t);
        for (std::size_t p = 0; p < model.num_pairs(); ++p)
            if (mu[model.pair_state(p)] * w[p] > tol) cost_res = std::max(cost_res, std::abs(gap[p]));
        double mean_psi = 0.0;
        for (std::size_t y = 0; y < model.num_states(); ++y) mean_psi += mu[y] * dual.psi[y];
        psi_res = std::max(psi_res, std::abs(mean_psi - dual.psi[y0]));
    }
    out.cost_residual = cost_res;
    out.psi_residual = psi_res;
    out.certified = cost_res <= tol && psi_res <= tol;
    return out;
}

ExpansionDual dual_from_expansion(const FiniteModel& model, std::span<const std::size_t> horizons) {
    check_horizons(horizons);
    if (horizons.size() < 2) throw std::invalid_argument("dual_from_expansion: need at least two horizons");
    const std::size_t t2 = horizons.back();
    const std::size_t t1 = horizons[horizons.size() - 2];
    const auto fh = finite_horizon_values(model, t2);
    const auto& v1 = fh.at(t1).values;
    const auto& v2 = fh.at(t2).values;
    const double a = static_cast<double>(t1), b = static_cast<double>(t2);

    ExpansionDual out;
    const std::size_t n = model.num_states();
    out.psi.resize(n);
    out.eta.resize(n);
    for (std::size_t y = 0; y < n; ++y) {
        out.psi[y] = (b * v2[y] - a * v1[y]) / (b - a);
        out.eta[y] = b * (v2[y] - out.psi[y]);
    }
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < model.num_pairs(); ++p) {
        const std::size_t y = model.pair_state(p);
        inf = std::min(inf, model.cost(p) - out.psi[y] + model.transition().expect(p, out.eta) - out.eta[y]);
    }
    out.residual = std::abs(inf);
    return out;
}

AbelWindow abel_window(const std::function<double(std::size_t)>& g, double bound, double eps, double delta,
                       std::size_t search_cap) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("abel_window: eps must lie in (0,1)");
    if (!(delta > 0.0)) throw std::invalid_argument("abel_window: delta must be positive");
    if (!(bound >= 0.0)) throw std::invalid_argument("abel_window: bound must be nonnegative");

    AbelWindow out;
    double weight = eps, sigma = 0.0;
    for (std::size_t t = 0; weight / eps >= 1e-14; ++t) {
        sigma += weight * g(t);
        weight *= 1.0 - eps;
    }
    out.sigma = sigma;

    const double denom = (4.0 * bound + 4.0 * std::abs(sigma) + delta) * (-std::log1p(-eps));
    out.lower_bound = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(delta / denom)));

    double sum = 0.0;
    for (std::size_t t = 0; t + 1 < out.lower_bound; ++t) sum += g(t);
    for (std::size_t horizon = out.lower_bound; horizon <= search_cap; ++horizon) {
        sum += g(horizon - 1);
        const double h = static_cast<double>(horizon);
        if (sum / h < sigma + delta + 2.0 * bound / h) {
            out.horizon = horizon;
            out.average = sum / h;
            return out;
        }
    }
    throw std::runtime_error("abel_window: no horizon found below the search cap of " + std::to_string(search_cap));
}

std::size_t cesaro_window(std::span<const double> g, std::size_t horizon, double delta) {
    if (horizon == 0) throw std::invalid_argument("cesaro_window: T must be positive");
    if (g.size() < horizon) throw std::invalid_argument("cesaro_window: sequence shorter than T");
    if (!(delta > 0.0)) throw std::invalid_argument("cesaro_window: delta must be positive");

    double sigma = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) sigma += g[t];
    sigma /= static_cast<double>(horizon);

    for (std::size_t start = 0; start < horizon; ++start) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t s = 1; start + s <= horizon && ok; ++s) {
            sum += g[start + s - 1];
            ok = sum / static_cast<double>(s) <= sigma + delta;
        }
        if (ok) return start;
    }
    throw std::logic_error("cesaro_window: no admissible start found");
}

}  // namespace occulimits
