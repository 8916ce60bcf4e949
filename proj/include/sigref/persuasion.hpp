#pragma once

#include "sigref/equilibria.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sigref {

struct PersuasionOptions {
    // When the belief restriction set at a deviation message is empty, the
    // test passes that message by default. With this flag the message is
    // instead held to the worst case over all rationalizable responses.
    bool empty_support_worst_case = false;
};

// One elimination step: the type removed, and for each message in its
// incumbent support, the restriction set the receiver would believe in, the
// induced belief, and the best payoff the type could still get there.
struct UnravelPart {
    std::size_t message = 0;
    std::vector<std::size_t> u_set;
    std::vector<rat> belief;
    rat bound;
    bool empty_restriction = false;
};

struct UnravelStep {
    std::size_t type = 0;
    std::vector<UnravelPart> parts;
};

// Certificate that a challenger outcome unravels an incumbent at one message:
// the challenge message, the two sender groups there, the type with the
// strict gain, and the elimination order over the reluctant group.
struct PersuasionWitness {
    std::size_t message = 0;
    std::size_t strict_type = 0;
    std::vector<std::size_t> favor;
    std::vector<std::size_t> against;
    std::vector<UnravelStep> steps;
};

namespace detail {

inline std::vector<std::size_t> sender_support_of_type(const Profile& p, std::size_t t) {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < p.sender[t].size(); ++m)
        if (p.sender[t][m] > 0) out.push_back(m);
    return out;
}

inline std::vector<std::size_t> senders_of_message(const Game& g, const Profile& p, std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < g.n_types(); ++t)
        if (p.sender[t][m] > 0) out.push_back(t);
    return out;
}

// Best payoff type t could get at message m when the receiver best-responds
// to the conditional prior over u_set (empty u_set: default pass or worst
// case over all beliefs, per options).
inline std::optional<UnravelPart> unravel_part(const Game& g, std::size_t t, std::size_t m,
                                               const std::vector<std::size_t>& u_set, const rat& challenger_payoff,
                                               const PersuasionOptions& opts) {
    UnravelPart part;
    part.message = m;
    part.u_set = u_set;
    if (g.is_terminal(m)) {
        part.bound = g.terminal_sender_payoff(t, m);
    } else if (u_set.empty()) {
        part.empty_restriction = true;
        if (!opts.empty_support_worst_case) {
            part.bound = challenger_payoff; // vacuous: nothing restricts beliefs
            return part;
        }
        if (g.action_model == ActionModel::MeanAction) {
            rat top = g.types[0].value;
            for (const auto& ti : g.types) top = std::max(top, ti.value);
            part.bound = g.sender_payoff_wage(t, m, top);
        } else {
            bool first = true;
            for (std::size_t a : br_over_all_beliefs(g, m, all_types(g))) {
                const rat v = g.sender_payoff_action(t, m, a);
                if (first || v > part.bound) part.bound = v;
                first = false;
            }
        }
    } else {
        part.belief = conditional_prior(g, u_set);
        if (g.action_model == ActionModel::MeanAction) {
            part.bound = g.sender_payoff_wage(t, m, posterior_mean(g, part.belief));
        } else {
            bool first = true;
            for (std::size_t a : best_responses(g, m, part.belief)) {
                const rat v = g.sender_payoff_action(t, m, a);
                if (first || v > part.bound) part.bound = v;
                first = false;
            }
        }
    }
    if (challenger_payoff < part.bound) return std::nullopt;
    return part;
}

} // namespace detail

// Does the challenger outcome unravel the incumbent at challenge message
// m_bar? The challenger's senders of m_bar split into those weakly preferring
// the challenger (ties included) and the rest. Unraveling needs a strict
// gain in the first group and an elimination order over the second in which
// each type, at every message it sends under the incumbent, can do no better
// than its challenger payoff once the receiver discounts already-eliminated
// types and the first group.
inline std::optional<PersuasionWitness> unravel_at(const Game& g, const EquilibriumClass& challenger,
                                                   const EquilibriumClass& incumbent, std::size_t m_bar,
                                                   const PersuasionOptions& opts = {}) {
    PersuasionWitness w;
    w.message = m_bar;
    std::set<std::size_t> favor_set;
    bool strict = false;
    for (std::size_t t : detail::senders_of_message(g, challenger.profile, m_bar)) {
        if (challenger.payoffs[t] >= incumbent.payoffs[t]) {
            w.favor.push_back(t);
            favor_set.insert(t);
            if (!strict && challenger.payoffs[t] > incumbent.payoffs[t]) {
                strict = true;
                w.strict_type = t;
            }
        } else {
            w.against.push_back(t);
        }
    }
    if (!strict) return std::nullopt;

    const std::size_t k = w.against.size();
    auto step_for = [&](std::size_t t, std::uint32_t eliminated) -> std::optional<UnravelStep> {
        UnravelStep step;
        step.type = t;
        for (std::size_t m : detail::sender_support_of_type(incumbent.profile, t)) {
            std::vector<std::size_t> u_set;
            for (std::size_t s : detail::senders_of_message(g, incumbent.profile, m)) {
                if (favor_set.count(s)) continue;
                bool gone = false;
                for (std::size_t i = 0; i < k; ++i)
                    if (w.against[i] == s && (eliminated & (1u << i))) gone = true;
                if (!gone) u_set.push_back(s);
            }
            auto part = detail::unravel_part(g, t, m, u_set, challenger.payoffs[t], opts);
            if (!part) return std::nullopt;
            step.parts.push_back(std::move(*part));
        }
        return step;
    };

    // depth-first over elimination orders, smallest type index first, with
    // dead states memoized; the first complete order is the lexicographically
    // smallest one
    std::set<std::uint32_t> dead;
    const std::uint32_t full = k == 32 ? ~0u : (1u << k) - 1;
    auto dfs = [&](auto&& self, std::uint32_t eliminated) -> bool {
        if (eliminated == full) return true;
        if (dead.count(eliminated)) return false;
        for (std::size_t i = 0; i < k; ++i) {
            if (eliminated & (1u << i)) continue;
            auto step = step_for(w.against[i], eliminated);
            if (!step) continue;
            w.steps.push_back(std::move(*step));
            if (self(self, eliminated | (1u << i))) return true;
            w.steps.pop_back();
        }
        dead.insert(eliminated);
        return false;
    };
    if (!dfs(dfs, 0)) return std::nullopt;
    return w;
}

// First challenge message (in game order) at which the challenger unravels
// the incumbent.
inline std::optional<PersuasionWitness> more_persuasive(const Game& g, const EquilibriumClass& challenger,
                                                        const EquilibriumClass& incumbent,
                                                        const PersuasionOptions& opts = {}) {
    for (std::size_t m = 0; m < g.n_messages(); ++m) {
        bool used = false;
        for (std::size_t t = 0; t < g.n_types() && !used; ++t)
            if (challenger.profile.sender[t][m] > 0) used = true;
        if (!used) continue;
        auto w = unravel_at(g, challenger, incumbent, m, opts);
        if (w) return w;
    }
    return std::nullopt;
}

struct PersuasionEdge {
    std::size_t from = 0; // the more persuasive class
    std::size_t to = 0;
    PersuasionWitness witness;
};

struct PersuasionDigraph {
    std::vector<PersuasionEdge> edges;
    std::vector<std::size_t> most;                // beat every rival, never beaten
    std::vector<std::size_t> least;               // beaten by every rival
    std::vector<std::vector<std::size_t>> cycles; // strongly connected groups of 2+
};

namespace detail {

// Tarjan strongly connected components, emitted in discovery order.
inline std::vector<std::vector<std::size_t>> strongly_connected(std::size_t n,
                                                                const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int counter = 0;
    auto visit = [&](auto&& self, std::size_t v) -> void {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t u : adj[v]) {
            if (index[u] < 0) {
                self(self, u);
                low[v] = std::min(low[v], low[u]);
            } else if (on_stack[u]) {
                low[v] = std::min(low[v], index[u]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            for (;;) {
                const std::size_t u = stack.back();
                stack.pop_back();
                on_stack[u] = false;
                comp.push_back(u);
                if (u == v) break;
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(visit, v);
    return comps;
}

} // namespace detail

// Pairwise comparison digraph over equilibrium classes. Payoff-equivalent
// pairs are never compared: the criterion ranks distinct outcomes. A class is
// most persuasive when it unravels every non-equivalent class and none
// unravels it, least persuasive when every non-equivalent class unravels it.
inline PersuasionDigraph persuasion_digraph(const Game& g, const std::vector<EquilibriumClass>& classes,
                                            const PersuasionOptions& opts = {}) {
    PersuasionDigraph d;
    const std::size_t n = classes.size();
    std::vector<std::vector<bool>> beats(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || payoff_equivalent(classes[i].payoffs, classes[j].payoffs)) continue;
            auto w = more_persuasive(g, classes[i], classes[j], opts);
            if (w) {
                beats[i][j] = true;
                d.edges.push_back({i, j, std::move(*w)});
            }
        }
    for (std::size_t i = 0; i < n; ++i) {
        bool top = true, bottom = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || payoff_equivalent(classes[i].payoffs, classes[j].payoffs)) continue;
            if (!beats[i][j] || beats[j][i]) top = false;
            if (!beats[j][i]) bottom = false;
        }
        if (top) d.most.push_back(i);
        if (bottom) d.least.push_back(i);
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : d.edges) adj[e.from].push_back(e.to);
    for (auto& comp : detail::strongly_connected(n, adj))
        if (comp.size() >= 2) d.cycles.push_back(std::move(comp));
    return d;
}

// Targeted versions for large class collections: check one candidate without
// building the full digraph.
inline bool is_most_persuasive(const Game& g, const std::vector<EquilibriumClass>& classes, std::size_t idx,
                               const PersuasionOptions& opts = {}) {
    for (std::size_t j = 0; j < classes.size(); ++j) {
        if (j == idx || payoff_equivalent(classes[idx].payoffs, classes[j].payoffs)) continue;
        if (!more_persuasive(g, classes[idx], classes[j], opts)) return false;
        if (more_persuasive(g, classes[j], classes[idx], opts)) return false;
    }
    return true;
}

inline bool is_least_persuasive(const Game& g, const std::vector<EquilibriumClass>& classes, std::size_t idx,
                                const PersuasionOptions& opts = {}) {
    for (std::size_t j = 0; j < classes.size(); ++j) {
        if (j == idx || payoff_equivalent(classes[idx].payoffs, classes[j].payoffs)) continue;
        if (!more_persuasive(g, classes[j], classes[idx], opts)) return false;
    }
    return true;
}

} // namespace sigref
