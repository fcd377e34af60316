#include "occulimits/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace occulimits {

namespace {

using nlohmann::json;

json coords(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round12(x));
    return a;
}

json numbers(const std::vector<double>& v) { return coords(v); }

json curve(const std::vector<CurvePoint>& pts) {
    json a = json::array();
    for (const auto& p : pts)
        a.push_back({{"parameter", round12(p.parameter)},
                     {"value", round12(p.value)},
                     {"slack", round12(p.slack)},
                     {"in_sandwich", p.in_sandwich}});
    return a;
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

double round12(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_number(x).c_str(), nullptr);
}

json to_json(const GMeasure& g, const FiniteModel& model) {
    json a = json::array();
    for (std::size_t p = 0; p < g.weights.size(); ++p) {
        if (g.weights[p] == 0.0) continue;
        a.push_back({{"state", model.pair_state(p)},
                     {"control", model.pair_control(p)},
                     {"weight", round12(g.weights[p])}});
    }
    return a;
}

json to_json(const DualCertificate& dual, const FiniteModel&) {
    return {{"mu", round12(dual.mu)}, {"psi", numbers(dual.psi)}, {"eta", numbers(dual.eta)}};
}

json to_json(const ProgramResult& r, const FiniteModel& model) {
    json j{{"status", to_string(r.status)},
           {"optimal_value", round12(r.optimal_value)},
           {"iterations", r.iterations},
           {"gamma", to_json(r.gamma, model)}};
    if (r.xi) j["xi"] = to_json(*r.xi, model);
    if (r.dual) j["dual"] = to_json(*r.dual, model);
    return j;
}

json to_json(const Plan& plan, const FiniteModel& model) {
    json j;
    switch (plan.kind()) {
    case Plan::Kind::stationary_deterministic: {
        j["kind"] = "deterministic";
        json rows = json::array();
        for (std::size_t y = 0; y < plan.selector().size(); ++y) {
            const std::size_t u = plan.selector()[y];
            rows.push_back({{"state", y},
                            {"coords", coords(model.state(y).coords)},
                            {"control", u},
                            {"value", coords(model.control_value(y, u))}});
        }
        j["rows"] = std::move(rows);
        break;
    }
    case Plan::Kind::stationary_randomized: {
        j["kind"] = "randomized";
        json rows = json::array();
        for (const auto& row : plan.kernel()) rows.push_back(numbers(row));
        j["kernel"] = std::move(rows);
        break;
    }
    case Plan::Kind::staged:
        j["kind"] = "staged";
        j["stages"] = plan.stages();
        break;
    }
    return j;
}

json to_json(const BoundsReport& rep, const FiniteModel& model) {
    json j{{"y0", rep.y0},
           {"y0_coords", coords(model.state(rep.y0).coords)},
           {"k_star_y0", round12(rep.k_star_y0)},
           {"d_star_y0", round12(rep.d_star_y0)},
           {"k_star", round12(rep.k_star)},
           {"gap", round12(rep.gap)},
           {"xi_mass", round12(rep.xi_mass)},
           {"cost_bound", round12(rep.cost_bound)},
           {"certificate_violation", round12(rep.certificate_violation)},
           {"sandwich_ok", rep.sandwich_ok},
           {"strong_duality", rep.strong_duality},
           {"vT_curve", curve(rep.vT_curve)},
           {"heps_curve", curve(rep.heps_curve)},
           {"vT_limit_error", round12(rep.vT_limit_error)},
           {"heps_limit_error", round12(rep.heps_limit_error)}};
    j["limits_ok"] = rep.limits_ok ? json(*rep.limits_ok) : json(nullptr);
    return j;
}

json to_json(const OptimalityVerdict& v) {
    json j{{"certificate_violation", round12(v.certificate_violation)},
           {"certificate_ok", v.certificate_ok},
           {"certified", v.certified}};
    j["cost_residual"] = v.cost_residual ? json(round12(*v.cost_residual)) : json(nullptr);
    j["psi_residual"] = v.psi_residual ? json(round12(*v.psi_residual)) : json(nullptr);
    return j;
}

std::string bounds_csv(const BoundsReport& rep) {
    std::ostringstream os;
    os << "kind,parameter,value,k_star_y0,d_star_y0,in_sandwich\n";
    auto emit = [&](const char* kind, const std::vector<CurvePoint>& pts) {
        for (const auto& p : pts)
            os << kind << ',' << format_number(p.parameter) << ',' << format_number(p.value) << ','
               << format_number(rep.k_star_y0) << ',' << format_number(rep.d_star_y0) << ','
               << (p.in_sandwich ? "true" : "false") << '\n';
    };
    emit("vT", rep.vT_curve);
    emit("heps", rep.heps_curve);
    return os.str();
}

}  // namespace occulimits
