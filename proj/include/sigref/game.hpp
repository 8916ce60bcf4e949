#pragma once

#include "sigref/linalg.hpp"
#include "sigref/rational.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigref {

// Absolute tolerance for probability and payoff comparisons on parsed input.
inline const rat kTol = rat(1, 1000000000);

struct ValidationIssue {
    std::string code;
    std::string detail;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<ValidationIssue>& issues() const { return issues_; }
    bool has(const std::string& code) const {
        for (const auto& i : issues_)
            if (i.code == code) return true;
        return false;
    }

private:
    static std::string join(const std::vector<ValidationIssue>& issues) {
        std::string text = "invalid game:";
        for (const auto& i : issues) text += "\n  [" + i.code + "] " + i.detail;
        return text;
    }
    std::vector<ValidationIssue> issues_;
};

class OpError : public std::runtime_error {
public:
    OpError(std::string code, const std::string& detail)
        : std::runtime_error("[" + code + "] " + detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

enum class ActionModel { FiniteActions, MeanAction };

struct TypeInfo {
    std::string label;
    rat value;
};

struct MessageInfo {
    std::string label;
    std::optional<rat> level;
    bool terminal = false;
};

enum class CostKind { None, Ratio, Linear };

// Quasi-linear sender payoff for mean-action games: u_S(t, m, a) = a - cost(t, m).
// Ratio: cost = level / value(t). Linear: cost = coefficient(t) * level.
struct QuasilinearCost {
    CostKind kind = CostKind::None;
    std::vector<rat> coefficients;
};

struct Game {
    std::string name;
    ActionModel action_model = ActionModel::FiniteActions;
    std::vector<TypeInfo> types;
    std::vector<rat> prior;
    std::vector<MessageInfo> messages;
    std::vector<std::string> actions;
    // Finite model payoff tables, indexed [type][message][action]; rows for
    // terminal messages are empty.
    std::vector<std::vector<std::vector<rat>>> sender_table;
    std::vector<std::vector<std::vector<rat>>> receiver_table;
    QuasilinearCost cost;
    // Terminal payoffs indexed [type][message]: (u_S, u_R).
    std::vector<std::vector<std::optional<std::pair<rat, rat>>>> terminal_payoffs;
    // Set by the monotone-grid builder; lets the enumerator use the
    // consecutive-partition search instead of all type->message maps.
    bool monotone_hint = false;

    std::size_t n_types() const { return types.size(); }
    std::size_t n_messages() const { return messages.size(); }
    std::size_t n_actions() const { return actions.size(); }
    bool is_terminal(std::size_t m) const { return messages[m].terminal; }

    rat level(std::size_t m) const {
        if (!messages[m].level)
            throw OpError("MissingLevel", "message " + messages[m].label + " has no level");
        return *messages[m].level;
    }

    rat cost_at(std::size_t t, const rat& lvl) const {
        switch (cost.kind) {
        case CostKind::Ratio: return lvl / types[t].value;
        case CostKind::Linear: return cost.coefficients[t] * lvl;
        default: throw OpError("MissingCost", "game has no cost family");
        }
    }

    rat terminal_sender_payoff(std::size_t t, std::size_t m) const {
        const auto& cell = terminal_payoffs[t][m];
        if (!cell)
            throw OpError("MissingPayoffEntry",
                          "no terminal payoff for type " + types[t].label + " at " + messages[m].label);
        return cell->first;
    }

    rat sender_payoff_action(std::size_t t, std::size_t m, std::size_t a) const {
        return sender_table[t][m][a];
    }
    rat receiver_payoff(std::size_t t, std::size_t m, std::size_t a) const {
        return receiver_table[t][m][a];
    }
    rat sender_payoff_wage(std::size_t t, std::size_t m, const rat& wage) const {
        if (is_terminal(m)) return terminal_sender_payoff(t, m);
        return wage - cost_at(t, level(m));
    }
};

// Receiver behavior at one message: a distribution over actions in the finite
// model, a single real action (the wage) in the mean model.
struct ReceiverResponse {
    std::vector<rat> probs;
    rat wage = 0;
};

struct Profile {
    std::vector<std::vector<rat>> sender;                  // [t][m]
    std::vector<std::vector<rat>> receiver;                // [m][a], finite model
    std::vector<rat> wages;                                // [m], mean model
    std::vector<std::optional<std::vector<rat>>> beliefs;  // [m]; nullopt = unrestricted
    std::vector<rat> payoffs;                              // cached u_S(t, sigma)
};

inline Profile make_empty_profile(const Game& g) {
    Profile p;
    p.sender.assign(g.n_types(), std::vector<rat>(g.n_messages(), rat(0)));
    p.receiver.assign(g.n_messages(), std::vector<rat>(g.n_actions(), rat(0)));
    p.wages.assign(g.n_messages(), rat(0));
    p.beliefs.assign(g.n_messages(), std::nullopt);
    p.payoffs.assign(g.n_types(), rat(0));
    return p;
}

inline void validate_game(const Game& g) {
    std::vector<ValidationIssue> issues;
    rat total = 0;
    for (const auto& p : g.prior) {
        if (p <= 0) issues.push_back({"PriorNotDistribution", "prior entry " + rat_to_fraction_string(p) + " is not strictly positive"});
        total += p;
    }
    if (g.prior.size() != g.n_types())
        issues.push_back({"PriorNotDistribution", "prior length does not match type count"});
    else if (rat_abs(total - 1) > rat(1, 1000000000000))
        issues.push_back({"PriorNotDistribution", "prior sums to " + rat_to_fraction_string(total)});
    auto check_unique = [&](const std::vector<std::string>& labels, const std::string& what) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == labels[j])
                    issues.push_back({"DuplicateLabel", "duplicate " + what + " label " + labels[i]});
    };
    std::vector<std::string> tl, ml;
    for (const auto& t : g.types) tl.push_back(t.label);
    for (const auto& m : g.messages) ml.push_back(m.label);
    check_unique(tl, "type");
    check_unique(ml, "message");
    check_unique(g.actions, "action");

    if (g.action_model == ActionModel::FiniteActions) {
        for (std::size_t t = 0; t < g.n_types(); ++t)
            for (std::size_t m = 0; m < g.n_messages(); ++m) {
                if (g.is_terminal(m)) {
                    if (!g.terminal_payoffs[t][m])
                        issues.push_back({"MissingPayoffEntry",
                                          "terminal payoff missing for type " + g.types[t].label + " at " + g.messages[m].label});
                    continue;
                }
                if (g.sender_table[t][m].size() != g.n_actions() || g.receiver_table[t][m].size() != g.n_actions())
                    issues.push_back({"MissingPayoffEntry",
                                      "payoff row incomplete for type " + g.types[t].label + " at " + g.messages[m].label});
            }
    } else {
        if (g.cost.kind == CostKind::None)
            issues.push_back({"MissingPayoffEntry", "mean-action game needs a quasilinear cost family"});
        if (g.cost.kind == CostKind::Linear && g.cost.coefficients.size() != g.n_types())
            issues.push_back({"MissingPayoffEntry", "linear cost needs one coefficient per type"});
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (!g.is_terminal(m) && !g.messages[m].level)
                issues.push_back({"MeanActionMissingLevels", "message " + g.messages[m].label + " has no level"});
        for (std::size_t t = 0; t < g.n_types(); ++t)
            for (std::size_t m = 0; m < g.n_messages(); ++m)
                if (g.is_terminal(m) && !g.terminal_payoffs[t][m])
                    issues.push_back({"MissingPayoffEntry",
                                      "terminal payoff missing for type " + g.types[t].label + " at " + g.messages[m].label});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Bayes posterior over types at message m, or nullopt when m is off-path.
inline std::optional<std::vector<rat>> posterior(const Game& g,
                                                 const std::vector<std::vector<rat>>& sender,
                                                 std::size_t m) {
    rat total = 0;
    std::vector<rat> out(g.n_types(), rat(0));
    for (std::size_t t = 0; t < g.n_types(); ++t) {
        out[t] = g.prior[t] * sender[t][m];
        total += out[t];
    }
    if (total == 0) return std::nullopt;
    for (auto& v : out) v /= total;
    return out;
}

inline std::vector<rat> conditional_prior(const Game& g, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw OpError("EmptySubset", "conditional prior over empty set");
    rat total = 0;
    for (std::size_t t : subset) total += g.prior[t];
    std::vector<rat> out(g.n_types(), rat(0));
    for (std::size_t t : subset) out[t] = g.prior[t] / total;
    return out;
}

inline rat posterior_mean(const Game& g, const std::vector<rat>& belief) {
    rat mean = 0;
    for (std::size_t t = 0; t < g.n_types(); ++t) mean += belief[t] * g.types[t].value;
    return mean;
}

// Exact argmax set of expected receiver payoff; ties included.
inline std::vector<std::size_t> best_responses(const Game& g, std::size_t m, const std::vector<rat>& belief) {
    if (g.is_terminal(m)) throw OpError("TerminalMessage", "no best response at terminal " + g.messages[m].label);
    if (g.action_model == ActionModel::MeanAction)
        throw OpError("MeanActionModel", "use posterior_mean for mean-action games");
    std::vector<std::size_t> best;
    rat best_value = 0;
    for (std::size_t a = 0; a < g.n_actions(); ++a) {
        rat value = 0;
        for (std::size_t t = 0; t < g.n_types(); ++t) value += belief[t] * g.receiver_payoff(t, m, a);
        if (best.empty() || value > best_value) {
            best = {a};
            best_value = value;
        } else if (value == best_value) {
            best.push_back(a);
        }
    }
    return best;
}

// A belief supported in `restriction` making every action of `targets`
// optimal at m (other actions weakly worse), if one exists.
inline std::optional<std::vector<rat>> belief_making_optimal(const Game& g, std::size_t m,
                                                             const std::vector<std::size_t>& targets,
                                                             const std::vector<std::size_t>& restriction) {
    if (restriction.empty()) throw OpError("EmptySubset", "belief restriction is empty");
    if (targets.empty()) return std::nullopt;
    const std::size_t n = restriction.size();
    std::vector<std::vector<rat>> a_eq;
    std::vector<rat> b_eq;
    std::vector<std::vector<rat>> a_ge;
    std::vector<rat> b_ge;
    a_eq.push_back(std::vector<rat>(n, rat(1)));
    b_eq.push_back(rat(1));
    const std::size_t lead = targets[0];
    for (std::size_t i = 1; i < targets.size(); ++i) {
        std::vector<rat> row(n, rat(0));
        for (std::size_t k = 0; k < n; ++k)
            row[k] = g.receiver_payoff(restriction[k], m, targets[i]) - g.receiver_payoff(restriction[k], m, lead);
        a_eq.push_back(std::move(row));
        b_eq.push_back(rat(0));
    }
    for (std::size_t a = 0; a < g.n_actions(); ++a) {
        if (std::find(targets.begin(), targets.end(), a) != targets.end()) continue;
        std::vector<rat> row(n, rat(0));
        for (std::size_t k = 0; k < n; ++k)
            row[k] = g.receiver_payoff(restriction[k], m, lead) - g.receiver_payoff(restriction[k], m, a);
        a_ge.push_back(std::move(row));
        b_ge.push_back(rat(0));
    }
    auto point = feasible_point(std::move(a_eq), std::move(b_eq), a_ge, b_ge);
    if (!point) return std::nullopt;
    std::vector<rat> belief(g.n_types(), rat(0));
    for (std::size_t k = 0; k < n; ++k) belief[restriction[k]] = (*point)[k];
    return belief;
}

// Union of BR(m, mu) over all beliefs mu supported in `restriction`.
inline std::vector<std::size_t> br_over_all_beliefs(const Game& g, std::size_t m,
                                                    const std::vector<std::size_t>& restriction) {
    if (g.is_terminal(m)) throw OpError("TerminalMessage", "no best response at terminal " + g.messages[m].label);
    if (restriction.empty()) throw OpError("EmptySubset", "belief restriction is empty");
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < g.n_actions(); ++a)
        if (belief_making_optimal(g, m, {a}, restriction)) out.push_back(a);
    return out;
}

// Mean model: the best responses over all restricted beliefs form the closed
// interval of conditional means.
inline std::pair<rat, rat> br_wage_range(const Game& g, const std::vector<std::size_t>& restriction) {
    if (restriction.empty()) throw OpError("EmptySubset", "belief restriction is empty");
    rat lo = g.types[restriction[0]].value, hi = lo;
    for (std::size_t t : restriction) {
        lo = std::min(lo, g.types[t].value);
        hi = std::max(hi, g.types[t].value);
    }
    return {lo, hi};
}

inline rat sender_payoff(const Game& g, std::size_t t, std::size_t m, const ReceiverResponse& r) {
    if (g.is_terminal(m)) return g.terminal_sender_payoff(t, m);
    if (g.action_model == ActionModel::MeanAction) return g.sender_payoff_wage(t, m, r.wage);
    rat value = 0;
    for (std::size_t a = 0; a < g.n_actions(); ++a)
        if (r.probs[a] != 0) value += r.probs[a] * g.sender_payoff_action(t, m, a);
    return value;
}

inline ReceiverResponse response_at(const Game& g, const Profile& p, std::size_t m) {
    ReceiverResponse r;
    if (g.action_model == ActionModel::MeanAction)
        r.wage = p.wages[m];
    else
        r.probs = p.receiver[m];
    return r;
}

inline rat deviation_payoff(const Game& g, const Profile& p, std::size_t t, std::size_t m) {
    return sender_payoff(g, t, m, response_at(g, p, m));
}

inline std::vector<rat> compute_sender_payoffs(const Game& g, const Profile& p) {
    std::vector<rat> out(g.n_types(), rat(0));
    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (p.sender[t][m] != 0) out[t] += p.sender[t][m] * deviation_payoff(g, p, t, m);
    return out;
}

struct CheckReport {
    bool ok = true;
    std::vector<std::string> violations;
    void fail(const std::string& why) {
        ok = false;
        violations.push_back(why);
    }
};

inline std::vector<std::size_t> all_types(const Game& g) {
    std::vector<std::size_t> out(g.n_types());
    for (std::size_t t = 0; t < g.n_types(); ++t) out[t] = t;
    return out;
}

namespace detail {

inline bool is_probability_vector(const std::vector<rat>& v) {
    rat total = 0;
    for (const auto& x : v) {
        if (x < 0) return false;
        total += x;
    }
    return rat_abs(total - 1) <= kTol;
}

} // namespace detail

// Full sequential-equilibrium check: strategy shapes, Bayes consistency on
// path, receiver optimality at every non-terminal message (off-path responses
// must be optimal under the stated belief, or under some belief when the
// profile leaves it unrestricted), sender optimality against every message,
// and the cached payoff vector.
inline CheckReport is_sequential_equilibrium(const Game& g, const Profile& p) {
    CheckReport report;
    for (std::size_t t = 0; t < g.n_types(); ++t)
        if (!detail::is_probability_vector(p.sender[t]))
            report.fail("sender strategy of type " + g.types[t].label + " is not a probability vector");
    if (!report.ok) return report;

    for (std::size_t m = 0; m < g.n_messages(); ++m) {
        if (g.is_terminal(m)) continue;
        auto bayes = posterior(g, p.sender, m);
        const bool on_path = bayes.has_value();
        const auto& stated = p.beliefs[m];
        if (on_path) {
            if (!stated) {
                report.fail("missing belief at on-path message " + g.messages[m].label);
                continue;
            }
            for (std::size_t t = 0; t < g.n_types(); ++t)
                if (rat_abs((*stated)[t] - (*bayes)[t]) > kTol) {
                    report.fail("belief at on-path message " + g.messages[m].label +
                                " is not the Bayes posterior (type " + g.types[t].label + ")");
                    break;
                }
        }
        if (stated && !detail::is_probability_vector(*stated)) {
            report.fail("belief at message " + g.messages[m].label + " is not a probability vector");
            continue;
        }
        if (g.action_model == ActionModel::MeanAction) {
            if (stated) {
                if (rat_abs(p.wages[m] - posterior_mean(g, *stated)) > kTol)
                    report.fail("wage at message " + g.messages[m].label + " is not the posterior mean");
            } else {
                auto [lo, hi] = br_wage_range(g, all_types(g));
                if (p.wages[m] < lo - kTol || p.wages[m] > hi + kTol)
                    report.fail("wage at off-path message " + g.messages[m].label + " is outside the mean range");
            }
        } else {
            if (!detail::is_probability_vector(p.receiver[m])) {
                report.fail("receiver response at " + g.messages[m].label + " is not a probability vector");
                continue;
            }
            std::vector<std::size_t> support;
            for (std::size_t a = 0; a < g.n_actions(); ++a)
                if (p.receiver[m][a] > kTol) support.push_back(a);
            if (stated) {
                auto best = best_responses(g, m, *stated);
                for (std::size_t a : support)
                    if (std::find(best.begin(), best.end(), a) == best.end())
                        report.fail("receiver response at " + g.messages[m].label + " puts weight on non-best action " +
                                    g.actions[a]);
            } else if (!belief_making_optimal(g, m, support, all_types(g))) {
                report.fail("no belief supports the receiver response at off-path message " + g.messages[m].label);
            }
        }
    }

    auto recomputed = compute_sender_payoffs(g, p);
    for (std::size_t t = 0; t < g.n_types(); ++t)
        if (rat_abs(recomputed[t] - p.payoffs[t]) > kTol)
            report.fail("cached payoff for type " + g.types[t].label + " differs from recomputation");

    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m) {
            const rat dev = deviation_payoff(g, p, t, m);
            if (dev > recomputed[t] + kTol)
                report.fail("sender optimality fails for type " + g.types[t].label + ": message " +
                            g.messages[m].label + " yields " + rat_to_fraction_string(dev) + " > " +
                            rat_to_fraction_string(recomputed[t]));
        }
    return report;
}

} // namespace sigref
