#include "occulimits/cli.hpp"

#include "occulimits/analysis.hpp"
#include "occulimits/dp.hpp"
#include "occulimits/measures.hpp"
#include "occulimits/parallel.hpp"
#include "occulimits/programs.hpp"
#include "occulimits/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace occulimits {

namespace {

using nlohmann::json;

/// Input problems detected after parsing (exit code 2).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelSource {
    std::string path;
    std::string builtin;
    std::optional<double> y0;
    std::optional<std::size_t> y0_index;
    int m = 8;
    std::optional<double> control_step;
    std::vector<double> magnitudes{0.25, 0.5, 0.75, 1.0};
    bool with_zero = false;
    std::size_t states = 4;
    double cost = 1.0;
    std::uint64_t seed = 0;
    std::size_t max_states = 8;
    std::size_t max_controls = 4;
};

struct RunConfig {
    ModelSource source;
    std::vector<std::size_t> horizons{1, 10, 100, 1000};
    std::vector<double> discounts{0.5, 0.1, 0.01, 0.001};
    std::string format = "json";
    std::string output;
    double limit_slack = 5e-3;
    double value_tol = 1e-10;
    std::size_t t0 = 1;
    std::size_t t_max = 200;
    double tol = 1e-8;
};

void add_source_options(CLI::App* cmd, ModelSource& s) {
    auto* file = cmd->add_option("--model", s.path, "Model JSON file");
    auto* builtin = cmd->add_option("--builtin", s.builtin, "Builtin model")
                        ->check(CLI::IsMember({"example1", "example1-family", "example2", "constant", "random"}));
    file->excludes(builtin);
    cmd->add_option("--y0", s.y0, "Initial state coordinate (also parameterizes example1)");
    cmd->add_option("--y0-index", s.y0_index, "Initial state index");
    cmd->add_option("--m", s.m, "example2 grid refinement (step 2^-m)")->check(CLI::Range(1, 12));
    cmd->add_option("--control-step", s.control_step, "example2 control sampling step (default 2^-m)");
    cmd->add_option("--magnitudes", s.magnitudes, "example1-family class magnitudes")->delimiter(',');
    cmd->add_flag("--with-zero", s.with_zero, "example1-family: include the absorbing state 0");
    cmd->add_option("--states", s.states, "constant: number of states")->check(CLI::PositiveNumber);
    cmd->add_option("--cost", s.cost, "constant: cost value");
    cmd->add_option("--seed", s.seed, "random: seed");
    cmd->add_option("--max-states", s.max_states, "random: state count bound")->check(CLI::Range(2, 64));
    cmd->add_option("--max-controls", s.max_controls, "random: controls per state bound")->check(CLI::Range(1, 16));
}

void add_output_options(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", c.output, "Write the report here instead of stdout");
}

void add_curve_options(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--T", c.horizons, "Horizons, increasing")->delimiter(',');
    cmd->add_option("--eps", c.discounts, "Discount rates in (0,1), decreasing")->delimiter(',');
    cmd->add_option("--value-tol", c.value_tol, "Value iteration tolerance")->check(CLI::PositiveNumber);
}

FiniteModel build_model(const ModelSource& s) {
    if (!s.path.empty()) return load_model(s.path);
    if (s.builtin.empty()) throw InputError("one of --model or --builtin is required");
    if (s.builtin == "example1") return example1_model(s.y0.value_or(0.5));
    if (s.builtin == "example1-family") return example1_family_model(s.magnitudes, s.with_zero);
    if (s.builtin == "example2") return example2_model(s.m, s.control_step.value_or(std::ldexp(1.0, -s.m)));
    if (s.builtin == "constant") return constant_cost_model(s.states, s.cost);
    RandomModelOptions opt;
    opt.seed = s.seed;
    opt.max_states = s.max_states;
    opt.max_controls = s.max_controls;
    return random_model(opt);
}

std::size_t select_state(const FiniteModel& model, const ModelSource& s) {
    if (s.y0_index) {
        if (*s.y0_index >= model.num_states())
            throw InputError("--y0-index " + std::to_string(*s.y0_index) + " out of range (model has " +
                             std::to_string(model.num_states()) + " states)");
        return *s.y0_index;
    }
    if (s.y0) {
        if (auto y = model.find_state(*s.y0, 1e-9)) return *y;
        throw InputError("--y0 " + format_number(*s.y0) + " is not a state of the model");
    }
    return model.initial_state().value_or(0);
}

void check_curves(const RunConfig& c) {
    if (c.horizons.empty()) throw InputError("--T must list at least one horizon");
    for (std::size_t i = 0; i < c.horizons.size(); ++i)
        if (c.horizons[i] == 0 || (i > 0 && c.horizons[i] <= c.horizons[i - 1]))
            throw InputError("--T must be positive and strictly increasing");
    if (c.discounts.empty()) throw InputError("--eps must list at least one rate");
    for (std::size_t i = 0; i < c.discounts.size(); ++i)
        if (!(c.discounts[i] > 0.0 && c.discounts[i] < 1.0) || (i > 0 && c.discounts[i] >= c.discounts[i - 1]))
            throw InputError("--eps values must lie in (0,1) and be strictly decreasing");
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (c.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.output);
    if (!f) throw InputError("cannot open output file " + c.output);
    f << text;
}

std::string coords_text(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
    return s;
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::optional<FiniteModel> model;
    try {
        model.emplace(build_model(c.source));
    } catch (const ModelError& e) {
        err << "invalid model: " << e.what() << '\n';
        for (const auto& v : e.violations()) err << "  " << v << '\n';
        return exit_input_error;
    }
    std::size_t atoms = model->noise().size();
    if (c.format == "json") {
        json j{{"valid", true},
               {"name", model->name()},
               {"states", model->num_states()},
               {"pairs", model->num_pairs()},
               {"noise_atoms", atoms},
               {"cost_bound", round12(model->cost_bound())}};
        emit(c, j.dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        os << "name,states,pairs,noise_atoms,cost_bound\n"
           << model->name() << ',' << model->num_states() << ',' << model->num_pairs() << ',' << atoms << ','
           << format_number(model->cost_bound()) << '\n';
        emit(c, os.str(), out);
    }
    return exit_ok;
}

int cmd_bounds(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_curves(c);
    const auto model = build_model(c.source);
    const std::size_t y0 = select_state(model, c.source);
    BoundsOptions opt;
    opt.limit_slack = c.limit_slack;
    opt.value_tol = c.value_tol;
    const auto rep = bounds_report(model, y0, c.horizons, c.discounts, opt);
    emit(c, c.format == "json" ? to_json(rep, model).dump(2) + "\n" : bounds_csv(rep), out);
    if (!rep.sandwich_ok) {
        err << "sandwich violated at y0 = " << coords_text(model.state(y0).coords) << '\n';
        return exit_sandwich_violation;
    }
    return exit_ok;
}

int cmd_ergodic(const RunConfig& c, std::ostream& out, std::ostream&) {
    check_curves(c);
    const auto model = build_model(c.source);
    const double k_star = stationary_lp(model).optimal_value;

    struct Row {
        const char* kind;
        double parameter;
        double value;
    };
    std::vector<Row> rows;
    const auto fh = finite_horizon_values(model, c.horizons.back());
    for (std::size_t t : c.horizons) {
        const auto& v = fh.at(t).values;
        rows.push_back({"vT", static_cast<double>(t), *std::min_element(v.begin(), v.end())});
    }
    std::vector<double> heps(c.discounts.size());
    parallel_for(c.discounts.size(), [&](std::size_t i) {
        const auto h = discounted_values(model, c.discounts[i], c.value_tol).h.values;
        heps[i] = *std::min_element(h.begin(), h.end());
    });
    for (std::size_t i = 0; i < heps.size(); ++i) rows.push_back({"heps", c.discounts[i], heps[i]});

    if (c.format == "json") {
        json table = json::array();
        for (const auto& r : rows)
            table.push_back({{"kind", r.kind},
                             {"parameter", round12(r.parameter)},
                             {"min_value", round12(r.value)},
                             {"deviation", round12(std::abs(r.value - k_star))}});
        emit(c, json{{"k_star", round12(k_star)}, {"rows", table}}.dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        os << "kind,parameter,min_value,k_star,deviation\n";
        for (const auto& r : rows)
            os << r.kind << ',' << format_number(r.parameter) << ',' << format_number(r.value) << ','
               << format_number(k_star) << ',' << format_number(std::abs(r.value - k_star)) << '\n';
        emit(c, os.str(), out);
    }
    return exit_ok;
}

int cmd_policy(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.t0 > c.t_max) throw InputError("--t0 must not exceed --t-max");
    if (c.t_max < 2) throw InputError("--t-max must be at least 2");
    const auto model = build_model(c.source);
    const std::size_t y0 = select_state(model, c.source);
    const auto aug = augmented_lp(model, y0);
    const auto& dual = *aug.dual;
    const Plan plan = greedy_feedback_from_eta(model, dual.eta);
    const auto verdict = verify_long_run_optimality(model, plan, dual, y0, c.t0, c.t_max, c.tol);
    const auto prg = prg_detect(model, plan, y0, c.t_max);

    if (c.format == "json") {
        json j{{"y0", y0},
               {"k_star_y0", round12(aug.optimal_value)},
               {"mu", round12(dual.mu)},
               {"plan", to_json(plan, model)},
               {"verdict", to_json(verdict)}};
        j["prg"] = prg ? json{{"t0", prg->t0}, {"period", prg->period}} : json(nullptr);
        emit(c, j.dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        os << "state,coords,control,value\n";
        for (std::size_t y = 0; y < model.num_states(); ++y) {
            const std::size_t u = plan.selector()[y];
            os << y << ',' << coords_text(model.state(y).coords) << ',' << u << ','
               << coords_text(model.control_value(y, u)) << '\n';
        }
        os << "\nkey,value\n"
           << "k_star_y0," << format_number(aug.optimal_value) << '\n'
           << "mu," << format_number(dual.mu) << '\n'
           << "certificate_violation," << format_number(verdict.certificate_violation) << '\n'
           << "cost_residual," << (verdict.cost_residual ? format_number(*verdict.cost_residual) : "") << '\n'
           << "psi_residual," << (verdict.psi_residual ? format_number(*verdict.psi_residual) : "") << '\n'
           << "certified," << (verdict.certified ? "true" : "false") << '\n'
           << "prg_t0," << (prg ? std::to_string(prg->t0) : "") << '\n'
           << "prg_period," << (prg ? std::to_string(prg->period) : "") << '\n';
        emit(c, os.str(), out);
    }
    if (!verdict.certified) {
        err << "plan not certified optimal\n";
        return exit_certification_failure;
    }
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Occupational-measure bounds for long-run average and discounted control"};
    app.name(args.empty() ? "occulimits" : args.front());
    app.require_subcommand(1);

    RunConfig cfg;
    auto* validate_cmd = app.add_subcommand("validate", "Load a model and check it");
    auto* bounds_cmd = app.add_subcommand("bounds", "LP bounds and value curves for one initial state");
    auto* ergodic_cmd = app.add_subcommand("ergodic", "min over states of v_T and h_eps against k*");
    auto* policy_cmd = app.add_subcommand("policy", "Feedback plan from the LP dual and its certification");
    for (auto* cmd : {validate_cmd, bounds_cmd, ergodic_cmd, policy_cmd}) {
        add_source_options(cmd, cfg.source);
        add_output_options(cmd, cfg);
    }
    for (auto* cmd : {bounds_cmd, ergodic_cmd}) add_curve_options(cmd, cfg);
    bounds_cmd->add_option("--limit-slack", cfg.limit_slack, "Tolerance for the limit checks")
        ->check(CLI::NonNegativeNumber);
    policy_cmd->add_option("--t0", cfg.t0, "First stage checked");
    policy_cmd->add_option("--t-max", cfg.t_max, "Last stage checked");
    policy_cmd->add_option("--tol", cfg.tol, "Residual tolerance")->check(CLI::PositiveNumber);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(cfg, out, err);
        if (bounds_cmd->parsed()) return cmd_bounds(cfg, out, err);
        if (ergodic_cmd->parsed()) return cmd_ergodic(cfg, out, err);
        return cmd_policy(cfg, out, err);
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        for (const auto& v : e.violations()) err << "  " << v << '\n';
        return exit_input_error;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::out_of_range& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const ProgramError& e) {
        err << "solver error: " << e.what() << '\n';
        return exit_solver_error;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << '\n';
        return exit_solver_error;
    }
}

}  // namespace occulimits
