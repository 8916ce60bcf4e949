#pragma once

#include "sigref/game.hpp"
#include "sigref/rational.hpp"

#include "json.hpp"

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sigref {

using ordered_json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, std::string reason)
        : std::runtime_error(path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) {}
    const std::string& path() const { return path_; }
    const std::string& reason() const { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

// Parametric monotone signaling game: ascending type values, full-support
// prior, quasilinear cost, message interval [lo, hi]. The receiver's best
// response is the posterior mean.
struct SpenceSpec {
    std::string name;
    std::vector<rat> values;
    std::vector<rat> prior;
    QuasilinearCost cost;
    std::optional<rat> lo;
    std::optional<rat> hi;
};

namespace jsondetail {

inline rat number_at(const ordered_json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return rat_from_string(j.get<std::string>());
        } catch (const std::exception& e) {
            throw SchemaError(path, e.what());
        }
    }
    if (j.is_number_integer()) return rat(static_cast<long long>(j.get<long long>()));
    if (j.is_number()) return rat_from_double(j.get<double>());
    throw SchemaError(path, "expected a number or numeric string");
}

inline const ordered_json& field(const ordered_json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + "." + key, "missing required field");
    return *it;
}

inline std::string string_at(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

inline QuasilinearCost parse_cost(const ordered_json& j, const std::string& path, std::size_t n_types) {
    QuasilinearCost cost;
    const std::string kind = string_at(field(j, "kind", path), path + ".kind");
    if (kind == "ratio") {
        cost.kind = CostKind::Ratio;
    } else if (kind == "linear") {
        cost.kind = CostKind::Linear;
        const auto& coeffs = field(j, "coefficients", path);
        if (!coeffs.is_array() || coeffs.size() != n_types)
            throw SchemaError(path + ".coefficients", "expected one coefficient per type");
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            cost.coefficients.push_back(number_at(coeffs[i], path + ".coefficients[" + std::to_string(i) + "]"));
    } else {
        throw SchemaError(path + ".kind", "unknown cost kind '" + kind + "' (want ratio|linear)");
    }
    return cost;
}

} // namespace jsondetail

inline Game parse_game(const ordered_json& j) {
    using namespace jsondetail;
    Game g;
    if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
    if (auto it = j.find("name"); it != j.end()) g.name = string_at(*it, "$.name");

    const auto& types = field(j, "types", "$");
    if (!types.is_array() || types.empty()) throw SchemaError("$.types", "expected a non-empty array");
    for (std::size_t i = 0; i < types.size(); ++i) {
        const std::string path = "$.types[" + std::to_string(i) + "]";
        if (!types[i].is_object()) throw SchemaError(path, "expected {label, value}");
        TypeInfo info;
        info.label = string_at(field(types[i], "label", path), path + ".label");
        info.value = number_at(field(types[i], "value", path), path + ".value");
        g.types.push_back(std::move(info));
    }

    const auto& prior = field(j, "prior", "$");
    if (!prior.is_array()) throw SchemaError("$.prior", "expected an array");
    for (std::size_t i = 0; i < prior.size(); ++i)
        g.prior.push_back(number_at(prior[i], "$.prior[" + std::to_string(i) + "]"));

    const auto& messages = field(j, "messages", "$");
    if (!messages.is_array() || messages.empty()) throw SchemaError("$.messages", "expected a non-empty array");
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const std::string path = "$.messages[" + std::to_string(i) + "]";
        if (!messages[i].is_object()) throw SchemaError(path, "expected {label, level?, terminal?}");
        MessageInfo info;
        info.label = string_at(field(messages[i], "label", path), path + ".label");
        if (auto it = messages[i].find("level"); it != messages[i].end())
            info.level = number_at(*it, path + ".level");
        if (auto it = messages[i].find("terminal"); it != messages[i].end()) {
            if (!it->is_boolean()) throw SchemaError(path + ".terminal", "expected a boolean");
            info.terminal = it->get<bool>();
        }
        g.messages.push_back(std::move(info));
    }

    const std::string model = string_at(field(j, "action_model", "$"), "$.action_model");
    if (model == "finite")
        g.action_model = ActionModel::FiniteActions;
    else if (model == "mean")
        g.action_model = ActionModel::MeanAction;
    else
        throw SchemaError("$.action_model", "unknown model '" + model + "' (want finite|mean)");

    auto type_index = [&](const std::string& label, const std::string& path) {
        for (std::size_t t = 0; t < g.n_types(); ++t)
            if (g.types[t].label == label) return t;
        throw SchemaError(path, "unknown type label '" + label + "'");
    };
    auto message_index = [&](const std::string& label, const std::string& path) {
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (g.messages[m].label == label) return m;
        throw SchemaError(path, "unknown message label '" + label + "'");
    };

    g.terminal_payoffs.assign(g.n_types(), std::vector<std::optional<std::pair<rat, rat>>>(g.n_messages()));
    if (auto it = j.find("terminal_payoffs"); it != j.end()) {
        if (!it->is_array()) throw SchemaError("$.terminal_payoffs", "expected an array of rows");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.terminal_payoffs[" + std::to_string(i) + "]";
            const auto& row = (*it)[i];
            if (!row.is_array() || row.size() != 4) throw SchemaError(path, "expected [type, message, uS, uR]");
            const std::size_t t = type_index(string_at(row[0], path + "[0]"), path + "[0]");
            const std::size_t m = message_index(string_at(row[1], path + "[1]"), path + "[1]");
            if (!g.is_terminal(m)) throw SchemaError(path, "message " + g.messages[m].label + " is not terminal");
            g.terminal_payoffs[t][m] = std::make_pair(number_at(row[2], path + "[2]"), number_at(row[3], path + "[3]"));
        }
    }

    if (g.action_model == ActionModel::FiniteActions) {
        const auto& actions = field(j, "actions", "$");
        if (!actions.is_array() || actions.empty()) throw SchemaError("$.actions", "expected a non-empty array");
        for (std::size_t i = 0; i < actions.size(); ++i)
            g.actions.push_back(string_at(actions[i], "$.actions[" + std::to_string(i) + "]"));
        auto action_index = [&](const std::string& label, const std::string& path) {
            for (std::size_t a = 0; a < g.n_actions(); ++a)
                if (g.actions[a] == label) return a;
            throw SchemaError(path, "unknown action label '" + label + "'");
        };
        g.sender_table.assign(g.n_types(), std::vector<std::vector<rat>>(g.n_messages()));
        g.receiver_table.assign(g.n_types(), std::vector<std::vector<rat>>(g.n_messages()));
        for (std::size_t t = 0; t < g.n_types(); ++t)
            for (std::size_t m = 0; m < g.n_messages(); ++m)
                if (!g.is_terminal(m)) {
                    g.sender_table[t][m].assign(g.n_actions(), rat(0));
                    g.receiver_table[t][m].assign(g.n_actions(), rat(0));
                }
        auto load_rows = [&](const char* key, std::vector<std::vector<std::vector<rat>>>& table) {
            const auto& rows = field(j, key, "$");
            const std::string base = std::string("$.") + key;
            if (!rows.is_array()) throw SchemaError(base, "expected an array of rows");
            std::vector<char> seen(g.n_types() * g.n_messages() * g.n_actions(), 0);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const std::string path = base + "[" + std::to_string(i) + "]";
                const auto& row = rows[i];
                if (!row.is_array() || row.size() != 4) throw SchemaError(path, "expected [type, message, action, value]");
                const std::size_t t = type_index(string_at(row[0], path + "[0]"), path + "[0]");
                const std::size_t m = message_index(string_at(row[1], path + "[1]"), path + "[1]");
                if (g.is_terminal(m)) throw SchemaError(path, "message " + g.messages[m].label + " is terminal");
                const std::size_t a = action_index(string_at(row[2], path + "[2]"), path + "[2]");
                table[t][m][a] = number_at(row[3], path + "[3]");
                seen[(t * g.n_messages() + m) * g.n_actions() + a] = 1;
            }
            std::vector<ValidationIssue> missing;
            for (std::size_t t = 0; t < g.n_types(); ++t)
                for (std::size_t m = 0; m < g.n_messages(); ++m) {
                    if (g.is_terminal(m)) continue;
                    for (std::size_t a = 0; a < g.n_actions(); ++a)
                        if (!seen[(t * g.n_messages() + m) * g.n_actions() + a])
                            missing.push_back({"MissingPayoffEntry", std::string(key) + " row missing for (" +
                                                                         g.types[t].label + ", " + g.messages[m].label +
                                                                         ", " + g.actions[a] + ")"});
                }
            if (!missing.empty()) throw ValidationError(std::move(missing));
        };
        load_rows("sender_payoff", g.sender_table);
        load_rows("receiver_payoff", g.receiver_table);
    } else {
        const auto& sp = field(j, "sender_payoff", "$");
        if (!sp.is_object() || jsondetail::string_at(field(sp, "form", "$.sender_payoff"), "$.sender_payoff.form") != "quasilinear")
            throw SchemaError("$.sender_payoff", "mean-action games need {\"form\":\"quasilinear\",\"cost\":{...}}");
        g.cost = parse_cost(field(sp, "cost", "$.sender_payoff"), "$.sender_payoff.cost", g.n_types());
    }
    validate_game(g);
    return g;
}

inline SpenceSpec parse_spence_spec(const ordered_json& j) {
    using namespace jsondetail;
    SpenceSpec spec;
    if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
    if (auto it = j.find("name"); it != j.end()) spec.name = string_at(*it, "$.name");
    const auto& types = field(j, "types", "$");
    if (!types.is_array() || types.empty()) throw SchemaError("$.types", "expected a non-empty array of values");
    for (std::size_t i = 0; i < types.size(); ++i)
        spec.values.push_back(number_at(types[i], "$.types[" + std::to_string(i) + "]"));
    const auto& prior = field(j, "prior", "$");
    if (!prior.is_array() || prior.size() != spec.values.size())
        throw SchemaError("$.prior", "expected one entry per type");
    for (std::size_t i = 0; i < prior.size(); ++i)
        spec.prior.push_back(number_at(prior[i], "$.prior[" + std::to_string(i) + "]"));
    spec.cost = parse_cost(field(j, "cost", "$"), "$.cost", spec.values.size());
    if (auto it = j.find("bounds"); it != j.end()) {
        if (!it->is_array() || it->size() != 2) throw SchemaError("$.bounds", "expected [low, high]");
        spec.lo = number_at((*it)[0], "$.bounds[0]");
        spec.hi = number_at((*it)[1], "$.bounds[1]");
    }
    return spec;
}

using ParsedSpec = std::variant<Game, SpenceSpec>;

// A document with an action_model is a full game; one with a top-level cost
// is a parametric Spence spec.
inline ParsedSpec parse_game_spec(const ordered_json& j) {
    if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
    if (j.contains("action_model")) return parse_game(j);
    if (j.contains("cost")) return parse_spence_spec(j);
    throw SchemaError("$", "cannot classify document: need action_model (game) or cost (spence spec)");
}

inline ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("$", "cannot open file " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("$", std::string("JSON parse failure: ") + e.what());
    }
    return j;
}

inline ParsedSpec parse_game_spec_file(const std::string& path) { return parse_game_spec(load_json_file(path)); }

inline ordered_json game_to_json(const Game& g) {
    ordered_json j;
    j["name"] = g.name;
    j["types"] = ordered_json::array();
    for (const auto& t : g.types)
        j["types"].push_back({{"label", t.label}, {"value", rat_to_fraction_string(t.value)}});
    j["prior"] = ordered_json::array();
    for (const auto& p : g.prior) j["prior"].push_back(rat_to_fraction_string(p));
    j["messages"] = ordered_json::array();
    for (const auto& m : g.messages) {
        ordered_json row{{"label", m.label}};
        if (m.level) row["level"] = rat_to_fraction_string(*m.level);
        if (m.terminal) row["terminal"] = true;
        j["messages"].push_back(std::move(row));
    }
    j["action_model"] = g.action_model == ActionModel::FiniteActions ? "finite" : "mean";
    if (g.action_model == ActionModel::FiniteActions) {
        j["actions"] = g.actions;
        ordered_json srows = ordered_json::array(), rrows = ordered_json::array();
        for (std::size_t t = 0; t < g.n_types(); ++t)
            for (std::size_t m = 0; m < g.n_messages(); ++m) {
                if (g.is_terminal(m)) continue;
                for (std::size_t a = 0; a < g.n_actions(); ++a) {
                    srows.push_back({g.types[t].label, g.messages[m].label, g.actions[a],
                                     rat_to_fraction_string(g.sender_payoff_action(t, m, a))});
                    rrows.push_back({g.types[t].label, g.messages[m].label, g.actions[a],
                                     rat_to_fraction_string(g.receiver_payoff(t, m, a))});
                }
            }
        j["sender_payoff"] = std::move(srows);
        j["receiver_payoff"] = std::move(rrows);
    } else {
        ordered_json cost{{"kind", g.cost.kind == CostKind::Ratio ? "ratio" : "linear"}};
        if (g.cost.kind == CostKind::Linear) {
            cost["coefficients"] = ordered_json::array();
            for (const auto& c : g.cost.coefficients) cost["coefficients"].push_back(rat_to_fraction_string(c));
        }
        j["sender_payoff"] = {{"form", "quasilinear"}, {"cost", std::move(cost)}};
    }
    ordered_json term = ordered_json::array();
    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (g.terminal_payoffs[t][m])
                term.push_back({g.types[t].label, g.messages[m].label,
                                rat_to_fraction_string(g.terminal_payoffs[t][m]->first),
                                rat_to_fraction_string(g.terminal_payoffs[t][m]->second)});
    if (!term.empty()) j["terminal_payoffs"] = std::move(term);
    return j;
}

} // namespace sigref
