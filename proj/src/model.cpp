#include "occulimits/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace occulimits {

namespace {

constexpr double kProbTol = 1e-12;

std::string triple_name(std::size_t state, std::size_t control, std::size_t atom) {
    std::ostringstream os;
    os << "(state " << state << ", control " << control << ", noise " << atom << ")";
    return os.str();
}

std::size_t count_pairs(const ModelData& data) {
    std::size_t n = 0;
    for (const auto& c : data.controls) n += c.size();
    return n;
}

}  // namespace

TransitionTensor::TransitionTensor(std::size_t num_states, std::vector<std::size_t> row_start,
                                   std::vector<TransitionEntry> entries)
    : num_states_(num_states), row_start_(std::move(row_start)), entries_(std::move(entries)) {}

double TransitionTensor::prob(std::size_t pair, std::size_t next) const {
    for (const auto& e : row(pair))
        if (e.state == next) return e.prob;
    return 0.0;
}

ValidationReport validate(const ModelData& data) {
    ValidationReport report;
    auto& v = report.violations;
    const std::size_t n = data.states.size();
    if (n == 0) {
        v.emplace_back("model has no states");
        return report;
    }
    for (std::size_t y = 0; y < n; ++y) {
        if (data.states[y].index != y)
            v.push_back("state " + std::to_string(y) + " has index " +
                        std::to_string(data.states[y].index));
        for (double c : data.states[y].coords)
            if (!std::isfinite(c)) v.push_back("state " + std::to_string(y) + " has non-finite coordinate");
    }
    if (data.controls.size() != n) {
        v.push_back("controls given for " + std::to_string(data.controls.size()) + " states, expected " +
                    std::to_string(n));
        return report;
    }
    for (std::size_t y = 0; y < n; ++y)
        if (data.controls[y].empty()) v.push_back("empty U(y) at state " + std::to_string(y));

    const std::size_t pairs = count_pairs(data);
    if (data.cost.size() != pairs)
        v.push_back("cost table has " + std::to_string(data.cost.size()) + " entries, expected " +
                    std::to_string(pairs));
    for (double k : data.cost)
        if (!std::isfinite(k)) {
            v.emplace_back("non-finite cost");
            break;
        }

    if (data.initial_state && *data.initial_state >= n)
        v.push_back("initial state " + std::to_string(*data.initial_state) + " out of range");

    if (!data.dynamics.empty() && !data.transition.empty()) {
        v.emplace_back("both dynamics and transition given");
        return report;
    }

    if (data.transition.empty()) {
        if (data.noise.empty()) {
            v.emplace_back("noise not normalized (no atoms)");
            return report;
        }
        double total = 0.0;
        std::vector<int> ids;
        for (const auto& a : data.noise) {
            if (!(a.prob > 0.0 && a.prob <= 1.0))
                v.push_back("noise atom " + std::to_string(a.id) + " has probability outside (0,1]");
            total += a.prob;
            ids.push_back(a.id);
        }
        if (std::abs(total - 1.0) > kProbTol) v.emplace_back("noise not normalized");
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            v.emplace_back("duplicate noise id");

        const std::size_t atoms = data.noise.size();
        if (data.dynamics.size() != pairs * atoms) {
            v.push_back("dynamics table has " + std::to_string(data.dynamics.size()) +
                        " entries, expected " + std::to_string(pairs * atoms));
            return report;
        }
        std::size_t p = 0;
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t u = 0; u < data.controls[y].size(); ++u, ++p)
                for (std::size_t a = 0; a < atoms; ++a) {
                    const auto next = data.dynamics[p * atoms + a];
                    if (next < 0 || static_cast<std::size_t>(next) >= n)
                        v.push_back("dynamics image out of range at " + triple_name(y, u, a));
                }
    } else {
        if (data.transition.size() != pairs) {
            v.push_back("transition has " + std::to_string(data.transition.size()) + " rows, expected " +
                        std::to_string(pairs));
            return report;
        }
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto& row = data.transition[p];
            if (row.size() != n) {
                v.push_back("transition row " + std::to_string(p) + " has wrong length");
                continue;
            }
            double total = 0.0;
            bool negative = false;
            for (double q : row) {
                if (!(q >= 0.0)) negative = true;
                total += q;
            }
            if (negative) v.push_back("transition row " + std::to_string(p) + " has negative entries");
            if (std::abs(total - 1.0) > kProbTol)
                v.push_back("transition row " + std::to_string(p) + " not normalized");
        }
    }
    return report;
}

TransitionTensor build_transition_tensor(const ModelData& data) {
    const std::size_t n = data.states.size();
    const std::size_t pairs = count_pairs(data);
    std::vector<std::size_t> row_start(pairs + 1, 0);
    std::vector<TransitionEntry> entries;

    if (!data.transition.empty()) {
        for (std::size_t p = 0; p < pairs; ++p) {
            for (std::size_t y = 0; y < n; ++y)
                if (data.transition[p][y] > 0.0) entries.push_back({y, data.transition[p][y]});
            row_start[p + 1] = entries.size();
        }
        return {n, std::move(row_start), std::move(entries)};
    }

    const std::size_t atoms = data.noise.size();
    std::map<std::size_t, double> row;
    std::size_t p = 0;
    for (std::size_t y = 0; y < data.controls.size(); ++y) {
        for (std::size_t u = 0; u < data.controls[y].size(); ++u, ++p) {
            row.clear();
            for (std::size_t a = 0; a < atoms; ++a) {
                const auto next = data.dynamics.at(p * atoms + a);
                if (next < 0 || static_cast<std::size_t>(next) >= n)
                    throw ModelError("dynamics maps outside the state list at " + triple_name(y, u, a));
                row[static_cast<std::size_t>(next)] += data.noise[a].prob;
            }
            for (const auto& [s, q] : row) entries.push_back({s, q});
            row_start[p + 1] = entries.size();
        }
    }
    return {n, std::move(row_start), std::move(entries)};
}

FiniteModel::FiniteModel(ModelData data) : data_(std::move(data)) {
    auto report = validate(data_);
    if (!report.ok()) {
        std::string what = "invalid model";
        if (!data_.name.empty()) what += " '" + data_.name + "'";
        what += ": " + report.violations.front();
        throw ModelError(what, std::move(report.violations));
    }
    pair_offset_.assign(num_states() + 1, 0);
    for (std::size_t y = 0; y < num_states(); ++y) {
        pair_offset_[y + 1] = pair_offset_[y] + data_.controls[y].size();
        for (std::size_t u = 0; u < data_.controls[y].size(); ++u) pair_state_.push_back(y);
    }
    for (double k : data_.cost) cost_bound_ = std::max(cost_bound_, std::abs(k));
    transition_ = build_transition_tensor(data_);
}

std::optional<std::size_t> FiniteModel::find_state(double x, double tol) const {
    for (const auto& s : data_.states)
        if (!s.coords.empty() && std::abs(s.coords[0] - x) <= tol) return s.index;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Builders

FiniteModel example1_family_model(const std::vector<double>& magnitudes, bool with_zero) {
    std::vector<double> values;
    for (double a : magnitudes) {
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("Example 1 magnitudes must lie in (0, 1]");
        values.push_back(-a);
        values.push_back(a);
    }
    if (with_zero) values.push_back(0.0);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    auto index_of = [&](double x) {
        auto it = std::lower_bound(values.begin(), values.end(), x);
        return static_cast<std::int64_t>(it - values.begin());
    };

    ModelData d;
    d.name = "example1";
    d.noise = {{0, 0.75}, {1, 0.25}};
    const double noise_values[2] = {1.0, -1.0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        d.states.push_back({{values[i]}, i});
        d.controls.push_back({{-1.0}, {1.0}});
        for (double u : {-1.0, 1.0}) {
            d.cost.push_back(values[i]);
            for (double s : noise_values) d.dynamics.push_back(index_of(values[i] * u * s));
        }
    }
    return FiniteModel(std::move(d));
}

FiniteModel example1_model(double y0) {
    if (!(y0 >= -1.0 && y0 <= 1.0)) throw std::invalid_argument("example1_model: y0 must lie in [-1, 1]");
    if (y0 == 0.0) throw std::invalid_argument("example1_model: y0 must be nonzero");
    ModelData d = example1_family_model({std::abs(y0)}).data();
    d.initial_state = y0 < 0.0 ? 0 : 1;
    return FiniteModel(std::move(d));
}

FiniteModel example2_model(int m, double control_step) {
    if (m < 2) throw std::invalid_argument("example2_model: m must be at least 2");
    if (m > 20) throw std::invalid_argument("example2_model: m too large");
    const std::int64_t half = std::int64_t{1} << m;
    const double h = std::ldexp(1.0, -m);
    const double ratio = h / control_step;
    if (!(control_step > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
        throw std::invalid_argument("example2_model: control_step must divide the grid step");
    const std::int64_t sub = static_cast<std::int64_t>(std::round(ratio));
    const double cs = h / static_cast<double>(sub);

    // Nearest grid index of v, ties toward 0, never onto 0 from a nonzero v.
    auto snap = [&](double v) -> std::int64_t {
        const double a = std::abs(v) / h;
        const double fl = std::floor(a);
        std::int64_t k = static_cast<std::int64_t>(fl) + ((a - fl) > 0.5 ? 1 : 0);
        if (v != 0.0 && k == 0) k = 1;
        k = std::min(k, half);
        return v < 0.0 ? -k : k;
    };

    ModelData d;
    d.name = "example2";
    d.noise = {{0, 0.5}, {1, 0.5}};
    const double noise_values[2] = {1.0, 0.25};
    for (std::int64_t j = -half; j <= half; ++j) {
        const double y = static_cast<double>(j) * h;
        d.states.push_back({{y}, static_cast<std::size_t>(j + half)});
        // U(y) on the control lattice, in units of cs.
        std::int64_t lo = 0, hi = 0;
        if (j < 0) {
            lo = -half * sub;
            hi = j * sub;
        } else if (j == 0) {
            lo = -half * sub;
            hi = half * sub;
        } else {
            lo = j * sub;
            hi = half * sub;
        }
        std::vector<std::vector<double>> controls;
        for (std::int64_t c = lo; c <= hi; ++c) {
            const double u = static_cast<double>(c) * cs;
            controls.push_back({u});
            d.cost.push_back(y);
            for (double s : noise_values) d.dynamics.push_back(snap(u * s) + half);
        }
        d.controls.push_back(std::move(controls));
    }
    return FiniteModel(std::move(d));
}

FiniteModel example2_orbit_model(double y0, int depth) {
    if (!(y0 > 0.0 && y0 <= 1.0)) throw std::invalid_argument("example2_orbit_model: y0 must lie in (0, 1]");
    if (depth < 1) throw std::invalid_argument("example2_orbit_model: depth must be positive");
    ModelData d;
    d.name = "example2-orbit";
    d.noise = {{0, 0.5}, {1, 0.5}};
    double y = y0;
    for (int k = 0; k <= depth; ++k, y *= 0.25) {
        d.states.push_back({{y}, static_cast<std::size_t>(k)});
        d.controls.push_back({{y}});
        d.cost.push_back(y);
        d.dynamics.push_back(k);
        d.dynamics.push_back(std::min(k + 1, depth));
    }
    d.initial_state = 0;
    return FiniteModel(std::move(d));
}

FiniteModel constant_cost_model(std::size_t num_states, double c) {
    if (num_states == 0) throw std::invalid_argument("constant_cost_model: need at least one state");
    ModelData d;
    d.name = "constant";
    d.noise = {{0, 0.5}, {1, 0.5}};
    const auto n = static_cast<std::int64_t>(num_states);
    for (std::int64_t y = 0; y < n; ++y) {
        d.states.push_back({{static_cast<double>(y)}, static_cast<std::size_t>(y)});
        d.controls.push_back({{0.0}, {1.0}});
        for (std::int64_t u = 0; u < 2; ++u) {
            d.cost.push_back(c);
            for (std::int64_t s = 0; s < 2; ++s) d.dynamics.push_back((y + u + s) % n);
        }
    }
    return FiniteModel(std::move(d));
}

FiniteModel random_model(const RandomModelOptions& o) {
    if (o.max_states < 1 || o.max_controls < 1 || o.max_atoms < 1)
        throw std::invalid_argument("random_model: sizes must be positive");
    std::mt19937_64 rng(o.seed);
    auto uniform_int = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    // Nonnegative weights with the given floor summing to one.
    auto simplex_point = [&](std::size_t len, double floor) {
        std::vector<double> w(len);
        double total = 0.0;
        for (auto& x : w) total += (x = expo(rng));
        const double free = 1.0 - floor * static_cast<double>(len);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < len; ++i) acc += (w[i] = floor + free * w[i] / total);
        w[len - 1] = 1.0 - acc;
        return w;
    };

    const std::size_t n = uniform_int(std::min<std::size_t>(2, o.max_states), o.max_states);
    const bool explicit_rows = o.min_transition_prob > 0.0;
    if (explicit_rows && o.min_transition_prob * static_cast<double>(n) > 1.0)
        throw std::invalid_argument("random_model: transition floor too large for the state count");

    ModelData d;
    d.name = "random-" + std::to_string(o.seed);
    std::size_t atoms = 0;
    if (!explicit_rows) {
        atoms = uniform_int(1, o.max_atoms);
        const auto probs = simplex_point(atoms, atoms > 1 ? 0.05 : 0.0);
        for (std::size_t a = 0; a < atoms; ++a) d.noise.push_back({static_cast<int>(a), probs[a]});
    }
    for (std::size_t y = 0; y < n; ++y) {
        d.states.push_back({{static_cast<double>(y)}, y});
        const std::size_t nc = uniform_int(1, o.max_controls);
        std::vector<std::vector<double>> controls;
        for (std::size_t u = 0; u < nc; ++u) {
            controls.push_back({static_cast<double>(u)});
            d.cost.push_back(o.cost_bound * (2.0 * unit(rng) - 1.0));
            if (explicit_rows) {
                d.transition.push_back(simplex_point(n, o.min_transition_prob));
            } else {
                for (std::size_t a = 0; a < atoms; ++a)
                    d.dynamics.push_back(static_cast<std::int64_t>(uniform_int(0, n - 1)));
            }
        }
        d.controls.push_back(std::move(controls));
    }
    return FiniteModel(std::move(d));
}

}  // namespace occulimits
