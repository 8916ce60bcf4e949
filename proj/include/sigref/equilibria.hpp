#pragma once

#include "sigref/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace sigref {

// One "essential" equilibrium: the on-path outcome plus the sender payoff
// vector, with a fully specified representative profile. Off-path belief
// freedom is quotiented out by keying on sender strategy + on-path behavior.
struct EquilibriumClass {
    std::string label;
    Profile profile;
    std::vector<rat> payoffs;
    bool mixed = false;
};

namespace detail {

inline std::string outcome_key(const Game& g, const Profile& p) {
    std::string key;
    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m) key += rat_to_fraction_string(p.sender[t][m]) + ";";
    for (std::size_t m = 0; m < g.n_messages(); ++m) {
        if (!posterior(g, p.sender, m)) continue;
        key += "|" + std::to_string(m) + ":";
        if (g.is_terminal(m)) continue;
        if (g.action_model == ActionModel::MeanAction)
            key += rat_to_fraction_string(p.wages[m]);
        else
            for (std::size_t a = 0; a < g.n_actions(); ++a) key += rat_to_fraction_string(p.receiver[m][a]) + ",";
    }
    return key;
}

inline std::string class_label(const Game& g, const Profile& p) {
    std::vector<std::optional<std::size_t>> pure(g.n_types());
    bool all_pure = true;
    for (std::size_t t = 0; t < g.n_types(); ++t) {
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (p.sender[t][m] == 1) pure[t] = m;
        if (!pure[t]) all_pure = false;
    }
    if (all_pure) {
        bool pooling = true, separating = true;
        for (std::size_t t = 1; t < g.n_types(); ++t)
            if (*pure[t] != *pure[0]) pooling = false;
        for (std::size_t t = 0; t < g.n_types() && separating; ++t)
            for (std::size_t u = t + 1; u < g.n_types(); ++u)
                if (*pure[t] == *pure[u]) separating = false;
        if (pooling) return "pooling@" + g.messages[*pure[0]].label;
        if (separating && g.n_types() > 1) return "separating";
    }
    std::string label;
    for (std::size_t t = 0; t < g.n_types(); ++t) {
        if (t) label += ",";
        label += g.types[t].label + ":";
        if (pure[t]) {
            label += g.messages[*pure[t]].label;
            continue;
        }
        label += "(";
        bool first = true;
        for (std::size_t m = 0; m < g.n_messages(); ++m) {
            if (p.sender[t][m] == 0) continue;
            if (!first) label += "|";
            first = false;
            label += g.messages[m].label + ":" + rat_to_fraction_string(p.sender[t][m]);
        }
        label += ")";
    }
    return label;
}

inline bool profile_is_mixed(const Game& g, const Profile& p) {
    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            if (p.sender[t][m] != 0 && p.sender[t][m] != 1) return true;
    if (g.action_model == ActionModel::FiniteActions)
        for (std::size_t m = 0; m < g.n_messages(); ++m) {
            if (g.is_terminal(m) || !posterior(g, p.sender, m)) continue;
            for (std::size_t a = 0; a < g.n_actions(); ++a)
                if (p.receiver[m][a] != 0 && p.receiver[m][a] != 1) return true;
        }
    return false;
}

// Deterrent candidates at one message: pure actions rationalizable under some
// belief, then uniform mixtures over simultaneously-optimal action sets, in
// (size, lexicographic) order. Each carries a supporting belief.
struct DeterrentCandidate {
    std::vector<rat> probs;
    std::vector<rat> belief;
};

inline std::vector<DeterrentCandidate> deterrent_candidates(const Game& g, std::size_t m) {
    std::vector<DeterrentCandidate> out;
    const auto everyone = all_types(g);
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t a = 0; a < g.n_actions(); ++a) subsets.push_back({a});
    std::vector<std::vector<std::size_t>> bigger;
    for (std::uint32_t bits = 1; bits < (1u << g.n_actions()); ++bits) {
        std::vector<std::size_t> s;
        for (std::size_t a = 0; a < g.n_actions(); ++a)
            if (bits & (1u << a)) s.push_back(a);
        if (s.size() >= 2) bigger.push_back(std::move(s));
    }
    std::sort(bigger.begin(), bigger.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    subsets.insert(subsets.end(), bigger.begin(), bigger.end());
    for (const auto& s : subsets) {
        auto belief = belief_making_optimal(g, m, s, everyone);
        if (!belief) continue;
        DeterrentCandidate c;
        c.probs.assign(g.n_actions(), rat(0));
        for (std::size_t a : s) c.probs[a] = rat(1, static_cast<long>(s.size()));
        c.belief = std::move(*belief);
        out.push_back(std::move(c));
    }
    return out;
}

inline std::size_t lowest_value_type(const Game& g) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < g.n_types(); ++t)
        if (g.types[t].value < g.types[best].value) best = t;
    return best;
}

// First candidate response at off-path message m that no type strictly
// prefers to its equilibrium payoff. Mean model: the worst belief (point mass
// on the lowest value) is the unique candidate.
inline bool attach_deterrent(const Game& g, Profile& p, std::size_t m, const std::vector<rat>& ustar,
                             const std::vector<std::vector<DeterrentCandidate>>& candidates) {
    if (g.is_terminal(m)) {
        for (std::size_t t = 0; t < g.n_types(); ++t)
            if (g.terminal_sender_payoff(t, m) > ustar[t]) return false;
        return true;
    }
    if (g.action_model == ActionModel::MeanAction) {
        const std::size_t low = lowest_value_type(g);
        const rat wage = g.types[low].value;
        for (std::size_t t = 0; t < g.n_types(); ++t)
            if (g.sender_payoff_wage(t, m, wage) > ustar[t]) return false;
        p.wages[m] = wage;
        std::vector<rat> belief(g.n_types(), rat(0));
        belief[low] = 1;
        p.beliefs[m] = std::move(belief);
        return true;
    }
    for (const auto& c : candidates[m]) {
        bool deters = true;
        ReceiverResponse r{c.probs, rat(0)};
        for (std::size_t t = 0; t < g.n_types() && deters; ++t)
            if (sender_payoff(g, t, m, r) > ustar[t]) deters = false;
        if (deters) {
            p.receiver[m] = c.probs;
            p.beliefs[m] = c.belief;
            return true;
        }
    }
    return false;
}

inline void push_class(const Game& g, std::vector<EquilibriumClass>& classes, std::map<std::string, std::size_t>& seen,
                       Profile p) {
    p.payoffs = compute_sender_payoffs(g, p);
    const std::string key = outcome_key(g, p);
    if (seen.count(key)) return;
    auto check = is_sequential_equilibrium(g, p);
    if (!check.ok) return;
    seen.emplace(key, classes.size());
    EquilibriumClass c;
    c.profile = std::move(p);
    c.payoffs = c.profile.payoffs;
    c.mixed = profile_is_mixed(g, c.profile);
    c.label = class_label(g, c.profile);
    classes.push_back(std::move(c));
}

inline void finalize_labels(std::vector<EquilibriumClass>& classes) {
    std::map<std::string, int> counts;
    for (const auto& c : classes) ++counts[c.label];
    std::map<std::string, int> index;
    for (auto& c : classes) {
        if (counts[c.label] == 1) continue;
        c.label += "/" + std::to_string(++index[c.label]);
    }
}

std::vector<EquilibriumClass> enumerate_monotone_grid(const Game& g);

// All pure sender assignments; at each on-path message every pure selection
// from the receiver's best-response tie set is explored; off-path messages
// get the lexicographically smallest deterring response.
inline std::vector<EquilibriumClass> enumerate_pure_brute(const Game& g) {
    std::vector<EquilibriumClass> classes;
    std::map<std::string, std::size_t> seen;
    const std::size_t n = g.n_types(), M = g.n_messages();
    std::vector<std::vector<DeterrentCandidate>> candidates(M);
    if (g.action_model == ActionModel::FiniteActions)
        for (std::size_t m = 0; m < M; ++m)
            if (!g.is_terminal(m)) candidates[m] = deterrent_candidates(g, m);

    std::vector<std::size_t> assign(n, 0);
    for (;;) {
        Profile base = make_empty_profile(g);
        for (std::size_t t = 0; t < n; ++t) base.sender[t][assign[t]] = 1;
        std::vector<std::size_t> on_path;
        for (std::size_t m = 0; m < M; ++m)
            if (posterior(g, base.sender, m)) on_path.push_back(m);

        // Enumerate receiver tie selections across on-path messages.
        std::vector<std::vector<std::size_t>> choice_sets;
        bool viable = true;
        for (std::size_t m : on_path) {
            if (g.is_terminal(m)) continue;
            auto belief = *posterior(g, base.sender, m);
            if (g.action_model == ActionModel::MeanAction) {
                base.wages[m] = posterior_mean(g, belief);
                base.beliefs[m] = belief;
                continue;
            }
            auto best = best_responses(g, m, belief);
            if (best.empty()) {
                viable = false;
                break;
            }
            base.beliefs[m] = belief;
            choice_sets.push_back(best);
        }
        if (viable) {
            std::vector<std::size_t> pick(choice_sets.size(), 0);
            for (;;) {
                Profile p = base;
                std::size_t slot = 0;
                for (std::size_t m : on_path) {
                    if (g.is_terminal(m) || g.action_model == ActionModel::MeanAction) continue;
                    p.receiver[m][choice_sets[slot][pick[slot]]] = 1;
                    ++slot;
                }
                std::vector<rat> ustar(n);
                for (std::size_t t = 0; t < n; ++t) ustar[t] = deviation_payoff(g, p, t, assign[t]);
                bool ok = true;
                for (std::size_t t = 0; t < n && ok; ++t)
                    for (std::size_t m : on_path)
                        if (deviation_payoff(g, p, t, m) > ustar[t]) {
                            ok = false;
                            break;
                        }
                for (std::size_t m = 0; m < M && ok; ++m) {
                    if (posterior(g, base.sender, m)) continue;
                    ok = attach_deterrent(g, p, m, ustar, candidates);
                }
                if (ok) push_class(g, classes, seen, std::move(p));
                std::size_t k = 0;
                while (k < pick.size() && ++pick[k] == choice_sets[k].size()) pick[k++] = 0;
                if (k == pick.size()) break;
                if (pick.empty()) break;
            }
        }
        std::size_t t = 0;
        while (t < n && ++assign[t] == M) assign[t++] = 0;
        if (t == n) break;
    }
    finalize_labels(classes);
    return classes;
}

} // namespace detail

inline std::vector<EquilibriumClass> enumerate_pure_equilibria(const Game& g) {
    if (g.monotone_hint && g.action_model == ActionModel::MeanAction) return detail::enumerate_monotone_grid(g);
    return detail::enumerate_pure_brute(g);
}

inline bool payoff_equivalent(const std::vector<rat>& a, const std::vector<rat>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (rat_abs(a[i] - b[i]) > kTol) return false;
    return true;
}

namespace detail {

// Consecutive-partition enumerator for monotone mean grids. Types pool in
// ascending blocks on ascending messages (any equilibrium is monotone here),
// wages are block-conditional means, and candidate messages are pruned to the
// interval allowed by adjacent incentive constraints before a full check.
inline std::vector<EquilibriumClass> enumerate_monotone_grid(const Game& g) {
    std::vector<EquilibriumClass> classes;
    std::map<std::string, std::size_t> seen;
    const std::size_t n = g.n_types(), M = g.n_messages();
    std::vector<rat> levels(M);
    for (std::size_t m = 0; m < M; ++m) {
        levels[m] = g.level(m);
        if (m && !(levels[m - 1] < levels[m]))
            throw OpError("GridNotSorted", "monotone grid messages must have ascending levels");
    }
    for (std::size_t t = 1; t < n; ++t)
        if (!(g.types[t - 1].value < g.types[t].value))
            throw OpError("TypesNotSorted", "monotone games need ascending type values");
    const rat v_min = g.types[0].value;

    // blocks as [start, end) index ranges, chosen by composition bitmask
    for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
        std::vector<std::pair<std::size_t, std::size_t>> blocks;
        std::size_t start = 0;
        for (std::size_t t = 0; t + 1 < n; ++t)
            if (cuts & (1u << t)) {
                blocks.push_back({start, t + 1});
                start = t + 1;
            }
        blocks.push_back({start, n});
        const std::size_t k = blocks.size();
        std::vector<rat> wage(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::size_t> members;
            for (std::size_t t = blocks[i].first; t < blocks[i].second; ++t) members.push_back(t);
            wage[i] = posterior_mean(g, conditional_prior(g, members));
        }

        std::vector<std::size_t> chosen(k);
        auto emit = [&]() {
            Profile p = make_empty_profile(g);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t t = blocks[i].first; t < blocks[i].second; ++t) p.sender[t][chosen[i]] = 1;
            std::vector<rat> ustar(n);
            for (std::size_t i = 0; i < k; ++i) {
                p.wages[chosen[i]] = wage[i];
                auto belief = posterior(g, p.sender, chosen[i]);
                p.beliefs[chosen[i]] = *belief;
                for (std::size_t t = blocks[i].first; t < blocks[i].second; ++t)
                    ustar[t] = g.sender_payoff_wage(t, chosen[i], wage[i]);
            }
            // every cross-block deviation
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t t = blocks[i].first; t < blocks[i].second; ++t)
                    for (std::size_t j = 0; j < k; ++j)
                        if (g.sender_payoff_wage(t, chosen[j], wage[j]) > ustar[t]) return;
            // worst-belief deterrence binds at the smallest off-path level
            std::size_t off = M;
            for (std::size_t m = 0; m < M; ++m) {
                bool used = false;
                for (std::size_t i = 0; i < k; ++i) used |= chosen[i] == m;
                if (!used) {
                    off = m;
                    break;
                }
            }
            if (off < M)
                for (std::size_t t = 0; t < n; ++t)
                    if (g.sender_payoff_wage(t, off, v_min) > ustar[t]) return;
            for (std::size_t m = 0; m < M; ++m) {
                bool used = false;
                for (std::size_t i = 0; i < k; ++i) used |= chosen[i] == m;
                if (used) continue;
                p.wages[m] = v_min;
                std::vector<rat> belief(n, rat(0));
                belief[0] = 1;
                p.beliefs[m] = std::move(belief);
            }
            push_class(g, classes, seen, std::move(p));
        };

        // depth-first choice of strictly ascending block messages
        auto dfs = [&](auto&& self, std::size_t i) -> void {
            if (i == k) {
                emit();
                return;
            }
            const std::size_t lo_type = blocks[i].first;
            std::size_t from = i == 0 ? 0 : chosen[i - 1] + 1;
            for (std::size_t m = from; m < M; ++m) {
                // adjacent pruning: the block's bottom type must weakly prefer
                // its own (message, wage) to the previous block's.
                if (i > 0) {
                    const rat own = g.sender_payoff_wage(lo_type, m, wage[i]);
                    const rat prev = g.sender_payoff_wage(lo_type, chosen[i - 1], wage[i - 1]);
                    if (own < prev) break; // cost rises with m: all larger m fail too
                    const std::size_t top_prev = blocks[i - 1].second - 1;
                    if (g.sender_payoff_wage(top_prev, m, wage[i]) >
                        g.sender_payoff_wage(top_prev, chosen[i - 1], wage[i - 1]))
                        continue; // m too small: previous block's top type envies
                } else {
                    // worst-belief bound for the bottom block
                    if (g.sender_payoff_wage(lo_type, m, wage[0]) < g.sender_payoff_wage(lo_type, 0, v_min)) break;
                }
                chosen[i] = m;
                self(self, i + 1);
            }
        };
        dfs(dfs, 0);
    }
    finalize_labels(classes);
    return classes;
}

// Feasibility of {eq, ge, x >= 0} with selected variables strictly positive,
// via an added epsilon column maximized subject to x_i >= eps, eps <= 1.
struct StrictSystem {
    std::size_t n_vars = 0;
    std::vector<std::vector<rat>> eq_a;
    std::vector<rat> eq_b;
    std::vector<std::vector<rat>> ge_a;
    std::vector<rat> ge_b;
    std::vector<std::size_t> strict;
};

inline std::optional<std::vector<rat>> solve_strict(const StrictSystem& s) {
    const std::size_t n = s.n_vars;
    const std::size_t eps = n;
    const std::size_t cols = n + 1 + s.ge_a.size() + s.strict.size() + 1;
    LinearProgram lp;
    lp.c.assign(cols, rat(0));
    lp.c[eps] = 1;
    std::size_t slack = n + 1;
    for (std::size_t i = 0; i < s.eq_a.size(); ++i) {
        std::vector<rat> row(cols, rat(0));
        for (std::size_t j = 0; j < n; ++j) row[j] = s.eq_a[i][j];
        lp.A.push_back(std::move(row));
        lp.b.push_back(s.eq_b[i]);
    }
    for (std::size_t i = 0; i < s.ge_a.size(); ++i) {
        std::vector<rat> row(cols, rat(0));
        for (std::size_t j = 0; j < n; ++j) row[j] = s.ge_a[i][j];
        row[slack++] = -1;
        lp.A.push_back(std::move(row));
        lp.b.push_back(s.ge_b[i]);
    }
    for (std::size_t v : s.strict) {
        std::vector<rat> row(cols, rat(0));
        row[v] = 1;
        row[eps] = -1;
        row[slack++] = -1;
        lp.A.push_back(std::move(row));
        lp.b.push_back(rat(0));
    }
    {
        std::vector<rat> row(cols, rat(0));
        row[eps] = 1;
        row[slack++] = 1;
        lp.A.push_back(std::move(row));
        lp.b.push_back(rat(1));
    }
    LPResult r = solve_lp(lp);
    if (r.status != LPStatus::Optimal || r.x[eps] <= 0) return std::nullopt;
    r.x.resize(n);
    return r.x;
}

// Message subsets of size 1..cap in (size, lexicographic) order.
inline std::vector<std::vector<std::size_t>> support_subsets(std::size_t M, std::size_t cap) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t bits = 1; bits < (1u << M); ++bits) {
        std::vector<std::size_t> s;
        for (std::size_t m = 0; m < M; ++m)
            if (bits & (1u << m)) s.push_back(m);
        if (s.size() <= cap) out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    return out;
}

// One (sender support, receiver support) structure: solve the two decoupled
// feasibility problems. Sender weights must make every chosen receiver
// support optimal; receiver probabilities must make every sender indifferent
// on its support and weakly worse elsewhere. Off-path responses come from the
// deterrent families, greedily first, then jointly when the greedy vertex
// fails.
inline void try_mixed_structure(const Game& g, const std::vector<std::vector<std::size_t>>& S,
                                const std::vector<std::uint32_t>& sender_mask, const std::vector<std::size_t>& on_path,
                                const std::vector<std::size_t>& rmsgs, const std::vector<std::vector<std::size_t>>& R,
                                const std::vector<std::vector<DeterrentCandidate>>& candidates,
                                std::vector<EquilibriumClass>& classes, std::map<std::string, std::size_t>& seen) {
    const std::size_t n = g.n_types(), M = g.n_messages();

    auto span_r = [&](std::size_t t, std::size_t m) {
        rat lo = g.sender_payoff_action(t, m, R[m][0]), hi = lo;
        for (std::size_t a : R[m]) {
            const rat v = g.sender_payoff_action(t, m, a);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair<rat, rat>(lo, hi);
    };
    // interval prune under the chosen receiver supports
    for (std::size_t t = 0; t < n; ++t) {
        rat lo, hi;
        bool first = true;
        for (std::size_t m : S[t]) {
            rat l, h;
            if (g.is_terminal(m))
                l = h = g.terminal_sender_payoff(t, m);
            else {
                auto s = span_r(t, m);
                l = s.first;
                h = s.second;
            }
            if (first) {
                lo = l;
                hi = h;
                first = false;
            } else {
                lo = std::max(lo, l);
                hi = std::min(hi, h);
            }
        }
        if (lo > hi) return;
        for (std::size_t m : rmsgs)
            if (std::find(S[t].begin(), S[t].end(), m) == S[t].end() && span_r(t, m).first > hi) return;
    }

    // sender-weight problem: receiver supports optimal under the posterior
    std::vector<std::vector<std::size_t>> var_of(n, std::vector<std::size_t>(M, SIZE_MAX));
    std::size_t n_x = 0;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t m : S[t]) var_of[t][m] = n_x++;
    StrictSystem sa;
    sa.n_vars = n_x;
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<rat> row(n_x, rat(0));
        for (std::size_t m : S[t]) row[var_of[t][m]] = 1;
        sa.eq_a.push_back(std::move(row));
        sa.eq_b.push_back(rat(1));
    }
    for (std::size_t m : rmsgs) {
        for (std::size_t i = 1; i < R[m].size(); ++i) {
            std::vector<rat> row(n_x, rat(0));
            for (std::size_t t = 0; t < n; ++t)
                if (var_of[t][m] != SIZE_MAX)
                    row[var_of[t][m]] =
                        g.prior[t] * (g.receiver_payoff(t, m, R[m][0]) - g.receiver_payoff(t, m, R[m][i]));
            sa.eq_a.push_back(std::move(row));
            sa.eq_b.push_back(rat(0));
        }
        for (std::size_t b = 0; b < g.n_actions(); ++b) {
            if (std::find(R[m].begin(), R[m].end(), b) != R[m].end()) continue;
            std::vector<rat> row(n_x, rat(0));
            for (std::size_t t = 0; t < n; ++t)
                if (var_of[t][m] != SIZE_MAX)
                    row[var_of[t][m]] = g.prior[t] * (g.receiver_payoff(t, m, R[m][0]) - g.receiver_payoff(t, m, b));
            sa.ge_a.push_back(std::move(row));
            sa.ge_b.push_back(rat(0));
        }
    }
    for (std::size_t v = 0; v < n_x; ++v) sa.strict.push_back(v);
    auto x = solve_strict(sa);
    if (!x) return;

    // receiver-probability problem: sender indifference and optimality
    std::vector<std::vector<std::size_t>> yvar(M);
    std::size_t n_y = 0;
    for (std::size_t m : rmsgs) {
        yvar[m].assign(g.n_actions(), SIZE_MAX);
        for (std::size_t a : R[m]) yvar[m][a] = n_y++;
    }
    // linear expression for type t's payoff at message m, as (coeffs, constant)
    auto expr = [&](std::size_t t, std::size_t m) {
        std::pair<std::vector<rat>, rat> e{std::vector<rat>(n_y, rat(0)), rat(0)};
        if (g.is_terminal(m)) {
            e.second = g.terminal_sender_payoff(t, m);
            return e;
        }
        for (std::size_t a : R[m]) e.first[yvar[m][a]] = g.sender_payoff_action(t, m, a);
        return e;
    };
    StrictSystem sb;
    sb.n_vars = n_y;
    for (std::size_t m : rmsgs) {
        std::vector<rat> row(n_y, rat(0));
        for (std::size_t a : R[m]) row[yvar[m][a]] = 1;
        sb.eq_a.push_back(std::move(row));
        sb.eq_b.push_back(rat(1));
    }
    std::vector<std::pair<std::vector<rat>, rat>> base(n);
    for (std::size_t t = 0; t < n; ++t) {
        base[t] = expr(t, S[t][0]);
        for (std::size_t i = 1; i < S[t].size(); ++i) {
            auto other = expr(t, S[t][i]);
            std::vector<rat> row(n_y);
            for (std::size_t j = 0; j < n_y; ++j) row[j] = base[t].first[j] - other.first[j];
            sb.eq_a.push_back(std::move(row));
            sb.eq_b.push_back(other.second - base[t].second);
        }
        for (std::size_t m : on_path) {
            if (std::find(S[t].begin(), S[t].end(), m) != S[t].end()) continue;
            auto other = expr(t, m);
            std::vector<rat> row(n_y);
            for (std::size_t j = 0; j < n_y; ++j) row[j] = base[t].first[j] - other.first[j];
            sb.ge_a.push_back(std::move(row));
            sb.ge_b.push_back(other.second - base[t].second);
        }
        for (std::size_t m = 0; m < M; ++m) {
            if (sender_mask[m]) continue;
            if (g.is_terminal(m)) {
                sb.ge_a.push_back(base[t].first);
                sb.ge_b.push_back(g.terminal_sender_payoff(t, m) - base[t].second);
            } else if (!candidates[m].empty()) {
                // necessary: no deterrent can push t below the family floor
                rat floor;
                bool first = true;
                for (const auto& c : candidates[m]) {
                    ReceiverResponse r{c.probs, rat(0)};
                    const rat v = sender_payoff(g, t, m, r);
                    if (first || v < floor) floor = v;
                    first = false;
                }
                sb.ge_a.push_back(base[t].first);
                sb.ge_b.push_back(floor - base[t].second);
            }
        }
    }
    for (std::size_t v = 0; v < n_y; ++v) sb.strict.push_back(v);

    std::vector<std::size_t> off_nt;
    for (std::size_t m = 0; m < M; ++m)
        if (!sender_mask[m] && !g.is_terminal(m)) off_nt.push_back(m);

    auto assemble = [&](const std::vector<rat>& y, const std::vector<std::optional<std::size_t>>& fixed) {
        Profile p = make_empty_profile(g);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t m : S[t]) p.sender[t][m] = x->at(var_of[t][m]);
        for (std::size_t m : rmsgs) {
            for (std::size_t a : R[m]) p.receiver[m][a] = y[yvar[m][a]];
            p.beliefs[m] = *posterior(g, p.sender, m);
        }
        for (std::size_t m : on_path)
            if (g.is_terminal(m)) p.beliefs[m] = *posterior(g, p.sender, m);
        std::vector<rat> ustar(n);
        for (std::size_t t = 0; t < n; ++t) {
            ustar[t] = base[t].second;
            for (std::size_t j = 0; j < n_y; ++j) ustar[t] += base[t].first[j] * y[j];
        }
        bool ok = true;
        for (std::size_t i = 0; i < off_nt.size() && ok; ++i) {
            const std::size_t m = off_nt[i];
            if (fixed[i]) {
                const auto& c = candidates[m][*fixed[i]];
                ReceiverResponse r{c.probs, rat(0)};
                for (std::size_t t = 0; t < n && ok; ++t)
                    if (sender_payoff(g, t, m, r) > ustar[t]) ok = false;
                if (ok) {
                    p.receiver[m] = c.probs;
                    p.beliefs[m] = c.belief;
                }
            } else {
                ok = attach_deterrent(g, p, m, ustar, candidates);
            }
        }
        for (std::size_t m = 0; m < M && ok; ++m)
            if (!sender_mask[m] && g.is_terminal(m))
                for (std::size_t t = 0; t < n && ok; ++t)
                    if (g.terminal_sender_payoff(t, m) > ustar[t]) ok = false;
        if (ok) push_class(g, classes, seen, std::move(p));
        return ok;
    };

    auto y0 = solve_strict(sb);
    if (!y0) return;
    std::vector<std::optional<std::size_t>> greedy(off_nt.size());
    if (assemble(*y0, greedy)) return;

    // greedy vertex fails deterrence: pick candidates jointly, re-solving with
    // their constraints attached
    std::vector<std::size_t> chosen(off_nt.size(), 0);
    auto dfs = [&](auto&& self, std::size_t i, StrictSystem sys) -> bool {
        if (i == off_nt.size()) {
            auto y = solve_strict(sys);
            if (!y) return false;
            std::vector<std::optional<std::size_t>> fixed(off_nt.size());
            for (std::size_t j = 0; j < off_nt.size(); ++j) fixed[j] = chosen[j];
            return assemble(*y, fixed);
        }
        for (std::size_t c = 0; c < candidates[off_nt[i]].size(); ++c) {
            StrictSystem next = sys;
            ReceiverResponse r{candidates[off_nt[i]][c].probs, rat(0)};
            for (std::size_t t = 0; t < n; ++t) {
                next.ge_a.push_back(base[t].first);
                next.ge_b.push_back(sender_payoff(g, t, off_nt[i], r) - base[t].second);
            }
            chosen[i] = c;
            if (self(self, i + 1, std::move(next))) return true;
        }
        return false;
    };
    if (!off_nt.empty()) dfs(dfs, 0, sb);
}

// Mixed search for finite-action games: enumerate sender supports and
// receiver on-path supports, then two decoupled feasibility problems. The
// sender weights must make every chosen receiver support optimal; the
// receiver probabilities must make every sender indifferent on its support
// and weakly worse elsewhere. Off-path responses come from the same
// deterrent families as the pure search.
inline std::vector<EquilibriumClass> enumerate_mixed_finite(const Game& g, std::size_t cap) {
    std::vector<EquilibriumClass> classes;
    std::map<std::string, std::size_t> seen;
    const std::size_t n = g.n_types(), M = g.n_messages(), A = g.n_actions();
    const auto subsets = support_subsets(M, cap);
    std::vector<std::vector<DeterrentCandidate>> candidates(M);
    for (std::size_t m = 0; m < M; ++m)
        if (!g.is_terminal(m)) candidates[m] = deterrent_candidates(g, m);

    // payoff intervals over all actions, and over a given action subset
    auto span_over = [&](std::size_t t, std::size_t m, const std::vector<std::size_t>& acts) {
        rat lo = g.sender_payoff_action(t, m, acts[0]), hi = lo;
        for (std::size_t a : acts) {
            const rat v = g.sender_payoff_action(t, m, a);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair<rat, rat>(lo, hi);
    };
    std::vector<std::size_t> every_action(A);
    for (std::size_t a = 0; a < A; ++a) every_action[a] = a;

    // lowest payoff any deterrent family member can impose, per (t, m)
    std::vector<std::vector<rat>> deter_floor(n, std::vector<rat>(M, rat(0)));
    for (std::size_t m = 0; m < M; ++m) {
        if (g.is_terminal(m)) continue;
        for (std::size_t t = 0; t < n; ++t) {
            bool first = true;
            for (const auto& c : candidates[m]) {
                ReceiverResponse r{c.probs, rat(0)};
                const rat v = sender_payoff(g, t, m, r);
                if (first || v < deter_floor[t][m]) deter_floor[t][m] = v;
                first = false;
            }
        }
    }

    // receiver support feasibility given exact sender set, memoized
    std::map<std::tuple<std::size_t, std::uint32_t, std::uint32_t>, bool> feas_memo;
    auto support_feasible = [&](std::size_t m, std::uint32_t sender_mask, const std::vector<std::size_t>& R,
                                std::uint32_t r_mask) {
        auto key = std::make_tuple(m, sender_mask, r_mask);
        auto it = feas_memo.find(key);
        if (it != feas_memo.end()) return it->second;
        StrictSystem sys;
        std::vector<std::size_t> members;
        for (std::size_t t = 0; t < n; ++t)
            if (sender_mask & (1u << t)) members.push_back(t);
        sys.n_vars = members.size();
        sys.eq_a.push_back(std::vector<rat>(members.size(), rat(1)));
        sys.eq_b.push_back(rat(1));
        for (std::size_t a = 1; a < R.size(); ++a) {
            std::vector<rat> row(members.size());
            for (std::size_t i = 0; i < members.size(); ++i)
                row[i] = g.receiver_payoff(members[i], m, R[0]) - g.receiver_payoff(members[i], m, R[a]);
            sys.eq_a.push_back(std::move(row));
            sys.eq_b.push_back(rat(0));
        }
        for (std::size_t b = 0; b < A; ++b) {
            if (std::find(R.begin(), R.end(), b) != R.end()) continue;
            std::vector<rat> row(members.size());
            for (std::size_t i = 0; i < members.size(); ++i)
                row[i] = g.receiver_payoff(members[i], m, R[0]) - g.receiver_payoff(members[i], m, b);
            sys.ge_a.push_back(std::move(row));
            sys.ge_b.push_back(rat(0));
        }
        for (std::size_t i = 0; i < members.size(); ++i) sys.strict.push_back(i);
        const bool ok = solve_strict(sys).has_value();
        feas_memo.emplace(key, ok);
        return ok;
    };

    std::vector<std::size_t> assign(n, 0);
    for (;;) {
        std::vector<std::vector<std::size_t>> S(n);
        for (std::size_t t = 0; t < n; ++t) S[t] = subsets[assign[t]];
        std::vector<std::uint32_t> sender_mask(M, 0);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t m : S[t]) sender_mask[m] |= 1u << t;
        std::vector<std::size_t> on_path, rmsgs;
        for (std::size_t m = 0; m < M; ++m)
            if (sender_mask[m]) {
                on_path.push_back(m);
                if (!g.is_terminal(m)) rmsgs.push_back(m);
            }

        // coarse viability: per type, intervals over the full action range
        bool viable = true;
        std::vector<rat> min_hi(n);
        for (std::size_t t = 0; t < n && viable; ++t) {
            rat lo, hi;
            bool first = true;
            for (std::size_t m : S[t]) {
                rat l, h;
                if (g.is_terminal(m))
                    l = h = g.terminal_sender_payoff(t, m);
                else {
                    auto s = span_over(t, m, every_action);
                    l = s.first;
                    h = s.second;
                }
                if (first) {
                    lo = l;
                    hi = h;
                    first = false;
                } else {
                    lo = std::max(lo, l);
                    hi = std::min(hi, h);
                }
            }
            if (lo > hi) viable = false;
            min_hi[t] = hi;
            for (std::size_t m = 0; m < M && viable; ++m) {
                if (sender_mask[m] && !g.is_terminal(m)) {
                    if (span_over(t, m, every_action).first > hi) viable = false;
                } else if (g.is_terminal(m)) {
                    if (std::find(S[t].begin(), S[t].end(), m) == S[t].end() && g.terminal_sender_payoff(t, m) > hi)
                        viable = false;
                } else if (!sender_mask[m]) {
                    if (deter_floor[t][m] > hi) viable = false;
                }
            }
        }

        if (viable) {
            // product of feasible receiver supports over on-path messages
            std::vector<std::vector<std::vector<std::size_t>>> r_options(rmsgs.size());
            bool any_empty = false;
            for (std::size_t i = 0; i < rmsgs.size(); ++i) {
                const std::size_t m = rmsgs[i];
                for (std::uint32_t bits = 1; bits < (1u << A); ++bits) {
                    std::vector<std::size_t> R;
                    for (std::size_t a = 0; a < A; ++a)
                        if (bits & (1u << a)) R.push_back(a);
                    if (support_feasible(m, sender_mask[m], R, bits)) r_options[i].push_back(std::move(R));
                }
                if (r_options[i].empty()) any_empty = true;
            }
            if (!any_empty) {
                std::vector<std::size_t> pick(rmsgs.size(), 0);
                for (;;) {
                    std::vector<std::vector<std::size_t>> R(M);
                    for (std::size_t i = 0; i < rmsgs.size(); ++i) R[rmsgs[i]] = r_options[i][pick[i]];
                    try_mixed_structure(g, S, sender_mask, on_path, rmsgs, R, candidates, classes, seen);
                    std::size_t k = 0;
                    while (k < pick.size() && ++pick[k] == r_options[k].size()) pick[k++] = 0;
                    if (k == pick.size()) break;
                }
            }
        }
        std::size_t t = 0;
        while (t < n && ++assign[t] == subsets.size()) assign[t++] = 0;
        if (t == n) break;
    }
    finalize_labels(classes);
    return classes;
}

// Mixed search for mean-action games. The receiver's response is a wage, so
// sender indifference pins wage differences between a type's support
// messages, and any message whose senders share one value pins a wage
// outright. Components of the difference graph that no anchor reaches are
// skipped: those would need a free wage parameter. With wages known, market
// consistency at each message is linear in the sender weights.
inline std::vector<EquilibriumClass> enumerate_mixed_mean(const Game& g, std::size_t cap) {
    std::vector<EquilibriumClass> classes;
    std::map<std::string, std::size_t> seen;
    const std::size_t n = g.n_types(), M = g.n_messages();
    const auto subsets = support_subsets(M, cap);
    const std::size_t low = lowest_value_type(g);
    const rat v_min = g.types[low].value;

    std::vector<std::size_t> assign(n, 0);
    for (;;) {
        std::vector<std::vector<std::size_t>> S(n);
        for (std::size_t t = 0; t < n; ++t) S[t] = subsets[assign[t]];
        std::vector<std::uint32_t> sender_mask(M, 0);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t m : S[t]) sender_mask[m] |= 1u << t;
        std::vector<std::size_t> rmsgs;
        for (std::size_t m = 0; m < M; ++m)
            if (sender_mask[m] && !g.is_terminal(m)) rmsgs.push_back(m);

        bool viable = true;
        std::vector<std::optional<rat>> wage(M);
        std::vector<std::pair<std::size_t, rat>> anchors;
        std::vector<std::tuple<std::size_t, std::size_t, rat>> edges; // w_a - w_b = delta

        for (std::size_t m : rmsgs) {
            bool homogeneous = true, all_pinned = true;
            std::optional<rat> v;
            std::vector<std::size_t> members;
            for (std::size_t t = 0; t < n; ++t)
                if (sender_mask[m] & (1u << t)) {
                    members.push_back(t);
                    if (!v)
                        v = g.types[t].value;
                    else if (*v != g.types[t].value)
                        homogeneous = false;
                    if (S[t].size() != 1) all_pinned = false;
                }
            if (homogeneous)
                anchors.push_back({m, *v});
            else if (all_pinned)
                // every sender of m sends only m, so the posterior is the
                // conditional prior and the wage is its mean
                anchors.push_back({m, posterior_mean(g, conditional_prior(g, members))});
        }
        for (std::size_t t = 0; t < n && viable; ++t) {
            std::optional<rat> term;
            std::vector<std::size_t> nt;
            for (std::size_t m : S[t]) {
                if (g.is_terminal(m)) {
                    const rat tau = g.terminal_sender_payoff(t, m);
                    if (term && *term != tau) viable = false;
                    term = tau;
                } else
                    nt.push_back(m);
            }
            if (!viable) break;
            if (term)
                for (std::size_t m : nt) anchors.push_back({m, *term + g.cost_at(t, g.level(m))});
            for (std::size_t i = 1; i < nt.size(); ++i)
                edges.push_back({nt[i], nt[i - 1], g.cost_at(t, g.level(nt[i])) - g.cost_at(t, g.level(nt[i - 1]))});
        }
        if (viable) {
            // relative-offset propagation detects conflicts even without anchors
            std::vector<std::optional<std::pair<std::size_t, rat>>> pot(M); // (component root, offset)
            for (std::size_t m : rmsgs) pot[m] = {m, rat(0)};
            bool changed = true;
            while (changed && viable) {
                changed = false;
                for (const auto& [a, b, delta] : edges) {
                    auto& pa = pot[a];
                    auto& pb = pot[b];
                    if (pa->first == pb->first) {
                        if (pa->second - pb->second != delta) viable = false;
                    } else {
                        // merge b's component into a's
                        const std::size_t from = pb->first, to = pa->first;
                        const rat shift = pa->second - delta - pb->second;
                        for (std::size_t m : rmsgs)
                            if (pot[m]->first == from) {
                                pot[m]->first = to;
                                pot[m]->second += shift;
                            }
                        changed = true;
                    }
                    if (!viable) break;
                }
            }
            if (viable) {
                std::vector<std::optional<rat>> root_value(M);
                for (const auto& [m, v] : anchors) {
                    const rat base = v - pot[m]->second;
                    auto& rv = root_value[pot[m]->first];
                    if (rv && *rv != base) viable = false;
                    rv = base;
                }
                bool unpinned = false;
                for (std::size_t m : rmsgs) {
                    if (!root_value[pot[m]->first]) {
                        unpinned = true;
                        continue;
                    }
                    wage[m] = *root_value[pot[m]->first] + pot[m]->second;
                }
                if (unpinned) viable = false; // free wage parameter, out of scope
                // wage must lie in the open span of its senders' values
                for (std::size_t m : rmsgs)
                    if (viable) {
                        rat lo, hi;
                        bool first = true;
                        for (std::size_t t = 0; t < n; ++t)
                            if (sender_mask[m] & (1u << t)) {
                                const rat v = g.types[t].value;
                                if (first) {
                                    lo = hi = v;
                                    first = false;
                                } else {
                                    lo = std::min(lo, v);
                                    hi = std::max(hi, v);
                                }
                            }
                        if (lo == hi) {
                            if (*wage[m] != lo) viable = false;
                        } else if (!(*wage[m] > lo && *wage[m] < hi))
                            viable = false;
                    }
            }
        }
        if (viable) {
            // equilibrium payoffs are constants now; check optimality directly
            std::vector<rat> ustar(n);
            for (std::size_t t = 0; t < n && viable; ++t) {
                bool first = true;
                for (std::size_t m : S[t]) {
                    const rat u = g.is_terminal(m) ? g.terminal_sender_payoff(t, m)
                                                   : *wage[m] - g.cost_at(t, g.level(m));
                    if (first) {
                        ustar[t] = u;
                        first = false;
                    } else if (u != ustar[t])
                        viable = false;
                }
                for (std::size_t m = 0; m < M && viable; ++m) {
                    if (std::find(S[t].begin(), S[t].end(), m) != S[t].end()) continue;
                    rat dev;
                    if (g.is_terminal(m))
                        dev = g.terminal_sender_payoff(t, m);
                    else if (sender_mask[m])
                        dev = *wage[m] - g.cost_at(t, g.level(m));
                    else
                        dev = v_min - g.cost_at(t, g.level(m));
                    if (dev > ustar[t]) viable = false;
                }
            }
            if (viable) {
                // market consistency at each heterogeneous message
                std::vector<std::vector<std::size_t>> var_of(n, std::vector<std::size_t>(M, SIZE_MAX));
                std::size_t n_x = 0;
                for (std::size_t t = 0; t < n; ++t)
                    for (std::size_t m : S[t]) var_of[t][m] = n_x++;
                StrictSystem sys;
                sys.n_vars = n_x;
                for (std::size_t t = 0; t < n; ++t) {
                    std::vector<rat> row(n_x, rat(0));
                    for (std::size_t m : S[t]) row[var_of[t][m]] = 1;
                    sys.eq_a.push_back(std::move(row));
                    sys.eq_b.push_back(rat(1));
                }
                for (std::size_t m : rmsgs) {
                    std::vector<rat> row(n_x, rat(0));
                    bool nonzero = false;
                    for (std::size_t t = 0; t < n; ++t)
                        if (var_of[t][m] != SIZE_MAX) {
                            row[var_of[t][m]] = g.prior[t] * (g.types[t].value - *wage[m]);
                            nonzero = nonzero || row[var_of[t][m]] != 0;
                        }
                    if (!nonzero) continue;
                    sys.eq_a.push_back(std::move(row));
                    sys.eq_b.push_back(rat(0));
                }
                for (std::size_t v = 0; v < n_x; ++v) sys.strict.push_back(v);
                auto x = solve_strict(sys);
                if (x) {
                    Profile p = make_empty_profile(g);
                    for (std::size_t t = 0; t < n; ++t)
                        for (std::size_t m : S[t]) p.sender[t][m] = x->at(var_of[t][m]);
                    for (std::size_t m = 0; m < M; ++m) {
                        if (sender_mask[m]) {
                            p.beliefs[m] = *posterior(g, p.sender, m);
                            if (!g.is_terminal(m)) p.wages[m] = *wage[m];
                        } else if (!g.is_terminal(m)) {
                            p.wages[m] = v_min;
                            std::vector<rat> belief(n, rat(0));
                            belief[low] = 1;
                            p.beliefs[m] = std::move(belief);
                        }
                    }
                    push_class(g, classes, seen, std::move(p));
                }
            }
        }
        std::size_t t = 0;
        while (t < n && ++assign[t] == subsets.size()) assign[t++] = 0;
        if (t == n) break;
    }
    finalize_labels(classes);
    return classes;
}

} // namespace detail

// Every equilibrium class with sender supports of size at most max_support,
// pure outcomes included. Intended for small fixture games; the search is
// support enumeration and refuses message sets too large to cover.
inline std::vector<EquilibriumClass> enumerate_mixed_equilibria(const Game& g, std::size_t max_support = 2) {
    if (max_support == 0) throw OpError("BadSupportCap", "mixed support cap must be at least 1");
    if (g.n_messages() > 16)
        throw OpError("SearchTooLarge", "mixed enumeration supports at most 16 messages; use the pure solver");
    double per_type = 0;
    for (std::size_t k = 1; k <= std::min<std::size_t>(max_support, g.n_messages()); ++k) {
        double binom = 1;
        for (std::size_t i = 0; i < k; ++i) binom = binom * double(g.n_messages() - i) / double(i + 1);
        per_type += binom;
    }
    if (std::pow(per_type, double(g.n_types())) > 300000.0)
        throw OpError("SearchTooLarge", "mixed support enumeration would be too large; lower the cap");
    if (g.action_model == ActionModel::MeanAction) return detail::enumerate_mixed_mean(g, max_support);
    return detail::enumerate_mixed_finite(g, max_support);
}

} // namespace sigref
