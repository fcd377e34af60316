#include "occulimits/analysis.hpp"
#include "occulimits/cli.hpp"
#include "occulimits/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace occulimits;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_occulimits, m) {
    m.doc() = "Occupational-measure LP bounds for long-run average control";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

    py::class_<FiniteModel>(m, "FiniteModel")
        .def_property_readonly("name", &FiniteModel::name)
        .def_property_readonly("num_states", &FiniteModel::num_states)
        .def_property_readonly("num_pairs", &FiniteModel::num_pairs)
        .def_property_readonly("cost_bound", &FiniteModel::cost_bound)
        .def_property_readonly("initial_state", &FiniteModel::initial_state)
        .def("num_controls", &FiniteModel::num_controls, py::arg("state"))
        .def("state_coords", [](const FiniteModel& self, std::size_t y) { return self.state(y).coords; },
             py::arg("state"))
        .def("find_state", &FiniteModel::find_state, py::arg("coord"), py::arg("tol") = 1e-9)
        .def("to_json", &model_to_json);

    m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
    m.def("parse_model", &parse_model, py::arg("text"));
    m.def("example1_model", &example1_model, py::arg("y0"));
    m.def("example1_family_model", &example1_family_model, py::arg("magnitudes"), py::arg("with_zero") = false);
    m.def("example2_model", &example2_model, py::arg("m"), py::arg("control_step"));
    m.def("constant_cost_model", &constant_cost_model, py::arg("states"), py::arg("cost"));
    m.def(
        "random_model",
        [](std::uint64_t seed, std::size_t max_states, std::size_t max_controls, double min_transition_prob) {
            RandomModelOptions o;
            o.seed = seed;
            o.max_states = max_states;
            o.max_controls = max_controls;
            o.min_transition_prob = min_transition_prob;
            return random_model(o);
        },
        py::arg("seed"), py::arg("max_states") = 8, py::arg("max_controls") = 4, py::arg("min_transition_prob") = 0.05);

    m.def(
        "finite_horizon_values",
        [](const FiniteModel& model, std::size_t horizon) {
            const auto fh = finite_horizon_values(model, horizon);
            std::vector<std::vector<double>> out;
            for (std::size_t t = 1; t <= horizon; ++t) out.push_back(fh.at(t).values);
            return out;
        },
        py::arg("model"), py::arg("horizon"), "Rows t = 1..T of v_t over the states.");
    m.def(
        "discounted_values",
        [](const FiniteModel& model, double eps, double tol) {
            const auto r = discounted_values(model, eps, tol);
            return py::make_tuple(r.h.values, r.plan.selector());
        },
        py::arg("model"), py::arg("eps"), py::arg("tol") = 1e-10, "(h_eps over the states, greedy selector)");

    m.def(
        "stationary_lp", [](const FiniteModel& model) { return to_python(to_json(stationary_lp(model), model)); },
        py::arg("model"));
    m.def(
        "augmented_lp",
        [](const FiniteModel& model, std::size_t y0) { return to_python(to_json(augmented_lp(model, y0), model)); },
        py::arg("model"), py::arg("y0"));
    m.def(
        "bounds_report",
        [](const FiniteModel& model, std::size_t y0, const std::vector<std::size_t>& horizons,
           const std::vector<double>& discounts, double limit_slack) {
            BoundsOptions o;
            o.limit_slack = limit_slack;
            BoundsReport rep;
            {
                py::gil_scoped_release release;
                rep = bounds_report(model, y0, horizons, discounts, o);
            }
            return to_python(to_json(rep, model));
        },
        py::arg("model"), py::arg("y0"), py::arg("horizons"), py::arg("discounts"), py::arg("limit_slack") = 5e-3);
    m.def(
        "certify_feedback",
        [](const FiniteModel& model, std::size_t y0, std::size_t t0, std::size_t t_max, double tol) {
            const auto r = augmented_lp(model, y0);
            const auto plan = greedy_feedback_from_eta(model, r.dual->eta);
            const auto v = verify_long_run_optimality(model, plan, *r.dual, y0, t0, t_max, tol);
            nlohmann::json j{{"plan", to_json(plan, model)}, {"verdict", to_json(v)}, {"mu", round12(r.dual->mu)}};
            return to_python(j);
        },
        py::arg("model"), py::arg("y0"), py::arg("t0") = 1, py::arg("t_max") = 200, py::arg("tol") = 1e-8,
        "Greedy feedback from the augmented LP dual and its certification verdict.");

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "occulimits");
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in process; returns (exit code, stdout, stderr).");
}
