// Classical belief-based refinements over enumerated equilibrium classes:
// an off-path credibility test, its dominance-pruned sharpening, a credible
// group-deviation test, and pairwise defeat between equilibrium outcomes.
#pragma once

#include "sigref/equilibria.hpp"
#include "sigref/persuasion.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace sigref {

struct RefinementOptions {
    std::size_t group_subset_cap = 12; // widest potential-deviator set scanned exhaustively
};

struct OffPathFailure {
    std::size_t message = 0; // deviation message the test fails at
    std::size_t type = 0;    // type that profitably deviates
};

struct CredibilityResult {
    bool passes = true;
    std::optional<OffPathFailure> failure;
};

struct GroupDeviation {
    std::size_t message = 0;
    std::vector<std::size_t> subset; // deviating types, ascending
};

struct GroupResult {
    bool passes = true;
    std::optional<GroupDeviation> failure;
};

struct DefeatWitness {
    std::size_t by_class = 0; // index of the defeating class
    std::size_t message = 0;  // message off path for the loser, on path for the winner
};

struct UndefeatedResult {
    bool undefeated = true;
    std::optional<DefeatWitness> defeat;
};

namespace detail {

inline std::vector<std::size_t> off_path_nonterminal(const Game& g, const Profile& p) {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < g.n_messages(); ++m) {
        if (g.is_terminal(m)) continue;
        bool used = false;
        for (std::size_t t = 0; t < g.n_types() && !used; ++t)
            if (p.sender[t][m] > 0) used = true;
        if (!used) out.push_back(m);
    }
    return out;
}

// best payoff type t can get at m across every belief-rationalizable response
inline rat best_conceivable(const Game& g, std::size_t m, std::size_t t, const std::vector<std::size_t>& pure_set) {
    if (g.action_model == ActionModel::MeanAction) {
        auto [lo, hi] = br_wage_range(g, all_types(g));
        (void)lo;
        return g.sender_payoff_wage(t, m, hi);
    }
    rat best;
    bool first = true;
    for (std::size_t a : pure_set) {
        const rat v = g.sender_payoff_action(t, m, a);
        if (first || v > best) best = v;
        first = false;
    }
    return best;
}

// worst payoff type t can get at m across responses rationalizable by beliefs on subset
inline rat worst_over_subset(const Game& g, std::size_t m, std::size_t t, const std::vector<std::size_t>& subset) {
    if (g.action_model == ActionModel::MeanAction) {
        auto [lo, hi] = br_wage_range(g, subset);
        (void)hi;
        return g.sender_payoff_wage(t, m, lo);
    }
    rat worst;
    bool first = true;
    for (std::size_t a : br_over_all_beliefs(g, m, subset)) {
        const rat v = g.sender_payoff_action(t, m, a);
        if (first || v < worst) worst = v;
        first = false;
    }
    return worst;
}

// types whose equilibrium payoff does not already beat every conceivable response
inline std::vector<std::size_t> conceivable_deviators(const Game& g, const std::vector<rat>& ustar, std::size_t m) {
    std::vector<std::size_t> pure_set;
    if (g.action_model == ActionModel::FiniteActions) pure_set = br_over_all_beliefs(g, m, all_types(g));
    std::vector<std::size_t> d;
    for (std::size_t t = 0; t < g.n_types(); ++t)
        if (ustar[t] <= best_conceivable(g, m, t, pure_set)) d.push_back(t);
    return d;
}

inline std::optional<OffPathFailure> credibility_failure_at(const Game& g, const std::vector<rat>& ustar,
                                                            std::size_t m, const std::vector<std::size_t>& d) {
    if (d.empty()) return std::nullopt;
    for (std::size_t t : d)
        if (worst_over_subset(g, m, t, d) > ustar[t]) return OffPathFailure{m, t};
    return std::nullopt;
}

// dominance pruning: drop a type when another deviator gains from strictly
// more of the rationalizable responses
inline std::vector<std::size_t> prune_dominated(const Game& g, const std::vector<rat>& ustar, std::size_t m,
                                                const std::vector<std::size_t>& d) {
    const std::size_t n = g.n_types();
    std::vector<char> pruned(n, 0);
    if (g.action_model == ActionModel::MeanAction) {
        auto [lo, hi] = br_wage_range(g, all_types(g));
        (void)lo;
        std::vector<rat> theta(n); // wage above which each type gains by deviating
        for (std::size_t t = 0; t < n; ++t) theta[t] = ustar[t] + g.cost_at(t, g.level(m));
        for (std::size_t t2 : d)
            for (std::size_t t1 = 0; t1 < n && !pruned[t2]; ++t1)
                if (t1 != t2 && theta[t1] < theta[t2] && theta[t1] < hi) pruned[t2] = 1;
    } else {
        auto pure_set = br_over_all_beliefs(g, m, all_types(g));
        auto weakly = [&](std::size_t t, std::size_t a) { return g.sender_payoff_action(t, m, a) >= ustar[t]; };
        auto strictly = [&](std::size_t t, std::size_t a) { return g.sender_payoff_action(t, m, a) > ustar[t]; };
        for (std::size_t t2 : d) {
            for (std::size_t t1 = 0; t1 < n && !pruned[t2]; ++t1) {
                if (t1 == t2) continue;
                bool some_strict = false, covers = true;
                for (std::size_t a : pure_set) {
                    if (strictly(t1, a)) some_strict = true;
                    if (weakly(t2, a) && !strictly(t1, a)) covers = false;
                }
                if (some_strict && covers) pruned[t2] = 1;
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t t : d)
        if (!pruned[t]) out.push_back(t);
    return out;
}

} // namespace detail

// Step-one deletion of types that cannot conceivably gain, then a check that
// no surviving type gains under every response justified by surviving types.
inline CredibilityResult intuitive_test(const Game& g, const EquilibriumClass& c) {
    for (std::size_t m : detail::off_path_nonterminal(g, c.profile)) {
        auto d = detail::conceivable_deviators(g, c.payoffs, m);
        if (auto fail = detail::credibility_failure_at(g, c.payoffs, m, d)) return {false, fail};
    }
    return {};
}

// Same test after discarding deviators dominated by a type with strictly
// wider gains over the rationalizable responses.
inline CredibilityResult d1_test(const Game& g, const EquilibriumClass& c) {
    for (std::size_t m : detail::off_path_nonterminal(g, c.profile)) {
        auto d = detail::conceivable_deviators(g, c.payoffs, m);
        d = detail::prune_dominated(g, c.payoffs, m, d);
        if (auto fail = detail::credibility_failure_at(g, c.payoffs, m, d)) return {false, fail};
    }
    return {};
}

// A deviating group is credible when, under the prior restricted to exactly
// that group, some optimal response weakly rewards every member, strictly
// rewards one, and weakly punishes every outsider.
inline GroupResult gp_test(const Game& g, const EquilibriumClass& c, const RefinementOptions& opts = {}) {
    const auto& ustar = c.payoffs;
    for (std::size_t m : detail::off_path_nonterminal(g, c.profile)) {
        auto d = detail::conceivable_deviators(g, c.payoffs, m);
        if (d.empty()) continue;
        if (d.size() > opts.group_subset_cap)
            throw OpError("SearchTooLarge", "group deviation scan over " + std::to_string(d.size()) + " types");
        const std::size_t total = std::size_t(1) << d.size();
        for (std::size_t mask = 1; mask < total; ++mask) {
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (mask & (std::size_t(1) << i)) subset.push_back(d[i]);
            auto belief = conditional_prior(g, subset);
            std::vector<rat> dev(g.n_types());
            auto check = [&]() {
                bool strict = false;
                for (std::size_t t : subset) {
                    if (dev[t] < ustar[t]) return false;
                    if (dev[t] > ustar[t]) strict = true;
                }
                if (!strict) return false;
                std::vector<char> inside(g.n_types(), 0);
                for (std::size_t t : subset) inside[t] = 1;
                for (std::size_t t = 0; t < g.n_types(); ++t)
                    if (!inside[t] && dev[t] > ustar[t]) return false;
                return true;
            };
            if (g.action_model == ActionModel::MeanAction) {
                const rat w = posterior_mean(g, belief);
                for (std::size_t t = 0; t < g.n_types(); ++t) dev[t] = g.sender_payoff_wage(t, m, w);
                if (check()) return {false, GroupDeviation{m, subset}};
            } else {
                for (std::size_t a : best_responses(g, m, belief)) {
                    for (std::size_t t = 0; t < g.n_types(); ++t) dev[t] = g.sender_payoff_action(t, m, a);
                    if (check()) return {false, GroupDeviation{m, subset}};
                }
            }
        }
    }
    return {};
}

// A class is defeated when some rival puts weight on one of its unused
// messages and every rival type sending it weakly prefers the rival outcome,
// one of them strictly. Fixed-payoff messages count.
inline std::vector<UndefeatedResult> undefeated_test(const Game& g, const std::vector<EquilibriumClass>& classes) {
    std::vector<UndefeatedResult> out(classes.size());
    for (std::size_t j = 0; j < classes.size(); ++j) {
        for (std::size_t i = 0; i < classes.size() && out[j].undefeated; ++i) {
            if (i == j) continue;
            for (std::size_t m = 0; m < g.n_messages(); ++m) {
                bool used_j = false, used_i = false;
                for (std::size_t t = 0; t < g.n_types(); ++t) {
                    if (classes[j].profile.sender[t][m] > 0) used_j = true;
                    if (classes[i].profile.sender[t][m] > 0) used_i = true;
                }
                if (used_j || !used_i) continue;
                bool all_weak = true, some_strict = false;
                for (std::size_t t = 0; t < g.n_types(); ++t) {
                    if (classes[i].profile.sender[t][m] == 0) continue;
                    if (classes[i].payoffs[t] < classes[j].payoffs[t]) all_weak = false;
                    if (classes[i].payoffs[t] > classes[j].payoffs[t]) some_strict = true;
                }
                if (all_weak && some_strict) {
                    out[j] = {false, DefeatWitness{i, m}};
                    break;
                }
            }
        }
    }
    return out;
}

struct RefinementRow {
    std::string label;
    bool intuitive = false;
    bool d1 = false;
    bool group = false;
    bool undefeated = false;
    bool most_persuasive = false;
    bool least_persuasive = false;
};

inline std::vector<RefinementRow> comparison_table(const Game& g, const std::vector<EquilibriumClass>& classes,
                                                   const RefinementOptions& ropts = {},
                                                   const PersuasionOptions& popts = {}) {
    auto digraph = persuasion_digraph(g, classes, popts);
    auto defeats = undefeated_test(g, classes);
    std::vector<RefinementRow> rows;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        RefinementRow row;
        row.label = classes[i].label;
        row.intuitive = intuitive_test(g, classes[i]).passes;
        row.d1 = d1_test(g, classes[i]).passes;
        row.group = gp_test(g, classes[i], ropts).passes;
        row.undefeated = defeats[i].undefeated;
        row.most_persuasive = std::find(digraph.most.begin(), digraph.most.end(), i) != digraph.most.end();
        row.least_persuasive = std::find(digraph.least.begin(), digraph.least.end(), i) != digraph.least.end();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sigref
