#include "occulimits/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace occulimits {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& msg) {
    throw ModelError("schema error at " + (where.empty() ? std::string("/") : where) + ": " + msg);
}

void check_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) schema_error(where, "unknown field '" + key + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where, "expected a number");
    return v.get<double>();
}

std::int64_t index_at(const json& v, const std::string& where) {
    if (!v.is_number_integer()) schema_error(where, "expected an integer index");
    return v.get<std::int64_t>();
}

std::vector<double> vector_at(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], where + "/" + std::to_string(i)));
    return out;
}

const json& array_at(const json& obj, const char* key, const std::string& where) {
    const auto& v = require(obj, key, where);
    if (!v.is_array()) schema_error(where + "/" + key, "expected an array");
    return v;
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

FiniteModel parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError("malformed JSON at line " + std::to_string(line_of_offset(text, e.byte)) + ": " +
                         e.what());
    }
    check_fields(doc, "", {"name", "states", "controls", "control_values", "noise", "dynamics", "transition",
                           "cost", "initial_state"});

    ModelData d;
    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string()) schema_error("/name", "expected a string");
        d.name = it->get<std::string>();
    }

    const auto& states = array_at(doc, "states", "");
    for (std::size_t i = 0; i < states.size(); ++i)
        d.states.push_back({vector_at(states[i], "/states/" + std::to_string(i)), i});
    const std::size_t n = d.states.size();

    const auto& controls = require(doc, "controls", "");
    check_fields(controls, "/controls", {"shared", "per_state", "control_values"});
    const bool shared = controls.contains("shared");
    const bool per_state = controls.contains("per_state");
    if (shared == per_state) schema_error("/controls", "exactly one of 'shared' or 'per_state' is required");
    if (shared) {
        const auto& list = array_at(controls, "shared", "/controls");
        std::vector<std::vector<double>> values;
        for (std::size_t j = 0; j < list.size(); ++j)
            values.push_back(vector_at(list[j], "/controls/shared/" + std::to_string(j)));
        d.controls.assign(n, values);
    } else {
        const json* values_json = nullptr;
        std::string values_where;
        if (controls.contains("control_values")) {
            values_json = &controls["control_values"];
            values_where = "/controls/control_values";
        } else if (doc.contains("control_values")) {
            values_json = &doc["control_values"];
            values_where = "/control_values";
        } else {
            schema_error("/controls", "'per_state' requires a 'control_values' list");
        }
        if (!values_json->is_array()) schema_error(values_where, "expected an array");
        std::vector<std::vector<double>> values;
        for (std::size_t j = 0; j < values_json->size(); ++j)
            values.push_back(vector_at((*values_json)[j], values_where + "/" + std::to_string(j)));
        const auto& lists = array_at(controls, "per_state", "/controls");
        if (lists.size() != n)
            schema_error("/controls/per_state", "expected " + std::to_string(n) + " entries, got " +
                                                    std::to_string(lists.size()));
        for (std::size_t y = 0; y < n; ++y) {
            const std::string where = "/controls/per_state/" + std::to_string(y);
            if (!lists[y].is_array()) schema_error(where, "expected an array of indices");
            std::vector<std::vector<double>> cs;
            for (std::size_t j = 0; j < lists[y].size(); ++j) {
                const auto idx = index_at(lists[y][j], where + "/" + std::to_string(j));
                if (idx < 0 || static_cast<std::size_t>(idx) >= values.size())
                    schema_error(where + "/" + std::to_string(j), "control index out of range");
                cs.push_back(values[static_cast<std::size_t>(idx)]);
            }
            d.controls.push_back(std::move(cs));
        }
    }

    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t y = 0; y < n; ++y) offset[y + 1] = offset[y] + d.controls[y].size();
    const std::size_t pairs = offset[n];

    auto pair_of = [&](const json& row, const std::string& where) {
        const auto y = index_at(require(row, "state", where), where + "/state");
        const auto u = index_at(require(row, "control", where), where + "/control");
        if (y < 0 || static_cast<std::size_t>(y) >= n) schema_error(where + "/state", "state index out of range");
        if (u < 0 || static_cast<std::size_t>(u) >= d.controls[static_cast<std::size_t>(y)].size())
            schema_error(where + "/control", "control index out of range");
        return offset[static_cast<std::size_t>(y)] + static_cast<std::size_t>(u);
    };

    if (doc.contains("noise")) {
        const auto& noise = array_at(doc, "noise", "");
        for (std::size_t a = 0; a < noise.size(); ++a) {
            const std::string where = "/noise/" + std::to_string(a);
            check_fields(noise[a], where, {"id", "prob"});
            d.noise.push_back({static_cast<int>(index_at(require(noise[a], "id", where), where + "/id")),
                               number_at(require(noise[a], "prob", where), where + "/prob")});
        }
    }

    const bool has_dyn = doc.contains("dynamics");
    const bool has_tr = doc.contains("transition");
    if (has_dyn == has_tr) schema_error("", "exactly one of 'dynamics' or 'transition' is required");
    if (has_dyn) {
        if (d.noise.empty()) schema_error("/noise", "'dynamics' requires a nonempty noise list");
        std::map<int, std::size_t> atom_of;
        for (std::size_t a = 0; a < d.noise.size(); ++a) atom_of[d.noise[a].id] = a;
        const std::size_t atoms = d.noise.size();
        d.dynamics.assign(pairs * atoms, -1);
        const auto& rows = array_at(doc, "dynamics", "");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string where = "/dynamics/" + std::to_string(r);
            check_fields(rows[r], where, {"state", "control", "noise_id", "next_state"});
            const auto p = pair_of(rows[r], where);
            const auto id = index_at(require(rows[r], "noise_id", where), where + "/noise_id");
            auto it = atom_of.find(static_cast<int>(id));
            if (it == atom_of.end()) schema_error(where + "/noise_id", "unknown noise id");
            auto& slot = d.dynamics[p * atoms + it->second];
            if (slot != -1) schema_error(where, "duplicate dynamics row");
            slot = index_at(require(rows[r], "next_state", where), where + "/next_state");
            if (slot < 0) schema_error(where + "/next_state", "negative state index");
        }
        for (std::size_t i = 0; i < d.dynamics.size(); ++i)
            if (d.dynamics[i] == -1)
                schema_error("/dynamics", "missing row for pair " + std::to_string(i / atoms) + ", noise index " +
                                              std::to_string(i % atoms));
    } else {
        const auto& tr = array_at(doc, "transition", "");
        if (tr.size() != n) schema_error("/transition", "expected one entry per state");
        for (std::size_t y = 0; y < n; ++y) {
            const std::string wy = "/transition/" + std::to_string(y);
            if (!tr[y].is_array() || tr[y].size() != d.controls[y].size())
                schema_error(wy, "expected one row per admissible control");
            for (std::size_t u = 0; u < tr[y].size(); ++u) {
                auto row = vector_at(tr[y][u], wy + "/" + std::to_string(u));
                if (row.size() != n) schema_error(wy + "/" + std::to_string(u), "expected one entry per state");
                d.transition.push_back(std::move(row));
            }
        }
    }

    std::vector<bool> seen(pairs, false);
    d.cost.assign(pairs, 0.0);
    const auto& cost = array_at(doc, "cost", "");
    for (std::size_t r = 0; r < cost.size(); ++r) {
        const std::string where = "/cost/" + std::to_string(r);
        check_fields(cost[r], where, {"state", "control", "value"});
        const auto p = pair_of(cost[r], where);
        if (seen[p]) schema_error(where, "duplicate cost entry");
        seen[p] = true;
        d.cost[p] = number_at(require(cost[r], "value", where), where + "/value");
    }
    for (std::size_t p = 0; p < pairs; ++p)
        if (!seen[p]) schema_error("/cost", "missing cost for pair " + std::to_string(p));

    if (doc.contains("initial_state")) {
        const auto s = index_at(doc["initial_state"], "/initial_state");
        if (s < 0) schema_error("/initial_state", "negative state index");
        d.initial_state = static_cast<std::size_t>(s);
    }
    return FiniteModel(std::move(d));
}

FiniteModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string model_to_json(const FiniteModel& model) {
    json doc;
    if (!model.name().empty()) doc["name"] = model.name();
    json states = json::array();
    for (const auto& s : model.states()) states.push_back(s.coords);
    doc["states"] = std::move(states);

    std::vector<std::vector<double>> values;
    std::map<std::vector<double>, std::size_t> value_index;
    json per_state = json::array();
    for (std::size_t y = 0; y < model.num_states(); ++y) {
        json list = json::array();
        for (std::size_t u = 0; u < model.num_controls(y); ++u) {
            const auto& cv = model.control_value(y, u);
            auto [it, inserted] = value_index.emplace(cv, values.size());
            if (inserted) values.push_back(cv);
            list.push_back(it->second);
        }
        per_state.push_back(std::move(list));
    }
    doc["controls"] = {{"per_state", std::move(per_state)}, {"control_values", values}};

    json cost = json::array();
    for (std::size_t p = 0; p < model.num_pairs(); ++p)
        cost.push_back({{"state", model.pair_state(p)}, {"control", model.pair_control(p)}, {"value", model.cost(p)}});
    doc["cost"] = std::move(cost);

    if (model.has_dynamics()) {
        json noise = json::array();
        for (const auto& a : model.noise()) noise.push_back({{"id", a.id}, {"prob", a.prob}});
        doc["noise"] = std::move(noise);
        json dyn = json::array();
        for (std::size_t p = 0; p < model.num_pairs(); ++p)
            for (std::size_t a = 0; a < model.noise().size(); ++a)
                dyn.push_back({{"state", model.pair_state(p)},
                               {"control", model.pair_control(p)},
                               {"noise_id", model.noise()[a].id},
                               {"next_state", model.next_state(p, a)}});
        doc["dynamics"] = std::move(dyn);
    } else {
        json tr = json::array();
        for (std::size_t y = 0; y < model.num_states(); ++y) {
            json rows = json::array();
            for (std::size_t p = model.pair_begin(y); p < model.pair_end(y); ++p)
                rows.push_back(model.data().transition[p]);
            tr.push_back(std::move(rows));
        }
        doc["transition"] = std::move(tr);
    }
    if (model.initial_state()) doc["initial_state"] = *model.initial_state();
    return doc.dump(2);
}

}  // namespace occulimits
