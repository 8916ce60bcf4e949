// Parametric monotone signaling games with mean-action receivers: closed-form
// separating and lex-max outcomes, truncation, canonical message grids, and
// the selection property checks that tie the closed forms to grid enumeration.
#pragma once

#include "sigref/equilibria.hpp"
#include "sigref/game_json.hpp"
#include "sigref/persuasion.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sigref {

inline rat spence_cost(const SpenceSpec& s, std::size_t t, const rat& m) {
    switch (s.cost.kind) {
    case CostKind::Ratio: return m / s.values[t];
    case CostKind::Linear: return s.cost.coefficients[t] * m;
    default: throw OpError("MissingCost", "spec has no cost family");
    }
}

inline rat spence_payoff(const SpenceSpec& s, std::size_t t, const rat& m, const rat& wage) {
    return wage - spence_cost(s, t, m);
}

inline rat spence_low_bound(const SpenceSpec& s) { return s.lo.value_or(rat(0)); }

namespace detail {

// message at which type t is indifferent between (m_base, w_base) and (m, w)
inline rat binding_message(const SpenceSpec& s, std::size_t t, const rat& m_base, const rat& w_base, const rat& w) {
    if (s.cost.kind == CostKind::Ratio) return m_base + s.values[t] * (w - w_base);
    return m_base + (w - w_base) / s.cost.coefficients[t];
}

// the cheapest-message payoff under the most pessimistic belief caps every
// other message's deviation value, so this is the binding high-message level
inline std::vector<rat> top_wage_thresholds(const SpenceSpec& s) {
    std::vector<rat> out;
    const rat lo = spence_low_bound(s);
    const rat v1 = s.values.front();
    const rat vn = s.values.back();
    for (std::size_t t = 0; t + 1 < s.values.size(); ++t) out.push_back(binding_message(s, t, lo, v1, vn));
    return out;
}

} // namespace detail

// Explicit upper bound if given, otherwise the smallest integer with ten
// percent slack above the point where even the top wage cannot tempt anyone.
inline rat spence_high_bound(const SpenceSpec& s) {
    if (s.hi) return *s.hi;
    auto thresholds = detail::top_wage_thresholds(s);
    const rat lo = spence_low_bound(s);
    if (thresholds.empty()) {
        rat h(1);
        while (h <= lo) h += 1;
        return h;
    }
    rat need = *std::max_element(thresholds.begin(), thresholds.end());
    need = need * rat(11, 10);
    rat h = rat(boost::multiprecision::numerator(need) / boost::multiprecision::denominator(need));
    while (h < need) h += 1;
    if (h <= lo) h = lo + 1;
    return h;
}

inline void validate_spence_spec(const SpenceSpec& s) {
    std::vector<ValidationIssue> issues;
    const std::size_t n = s.values.size();
    if (n == 0) {
        issues.push_back({"NoTypes", "spec has no types"});
        throw ValidationError(std::move(issues));
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (s.values[t] <= 0)
            issues.push_back({"ValuesNotPositive", "type value " + rat_to_fraction_string(s.values[t])});
        if (t > 0 && s.values[t] <= s.values[t - 1])
            issues.push_back({"ValuesNotAscending", "type values must be strictly ascending"});
    }
    if (s.prior.size() != n) {
        issues.push_back({"PriorNotDistribution", "prior size must match the number of types"});
    } else {
        rat sum(0);
        for (const rat& p : s.prior) {
            if (p <= 0)
                issues.push_back({"PriorNotDistribution", "prior entry " + rat_to_fraction_string(p) +
                                                              " is not strictly positive"});
            sum += p;
        }
        if (sum != 1) issues.push_back({"PriorNotDistribution", "prior sums to " + rat_to_fraction_string(sum)});
    }
    if (s.cost.kind == CostKind::None) issues.push_back({"CostMissing", "spec needs a cost family"});
    if (s.cost.kind == CostKind::Linear) {
        if (s.cost.coefficients.size() != n) {
            issues.push_back({"CostCoefficientsInvalid", "one cost coefficient per type required"});
        } else {
            // single crossing for the linear family: steeper message cost for
            // lower types, so coefficients fall strictly as the type rises
            for (std::size_t t = 0; t < n; ++t) {
                if (s.cost.coefficients[t] <= 0)
                    issues.push_back({"CostCoefficientsInvalid", "coefficient " +
                                                                     rat_to_fraction_string(s.cost.coefficients[t]) +
                                                                     " is not strictly positive"});
                if (t > 0 && s.cost.coefficients[t] >= s.cost.coefficients[t - 1])
                    issues.push_back(
                        {"CostCoefficientsInvalid", "coefficients must be strictly decreasing in type"});
            }
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    const rat lo = spence_low_bound(s);
    const rat hi = spence_high_bound(s);
    if (hi <= lo) issues.push_back({"BoundsInfeasible", "message upper bound must exceed the lower bound"});
    // the top message must be unattractive to every type below the top even
    // at the top wage, relative to the cheapest message at the bottom wage
    for (std::size_t t = 0; t + 1 < n; ++t)
        if (spence_payoff(s, t, hi, s.values.back()) >= spence_payoff(s, t, lo, s.values.front()))
            issues.push_back(
                {"BoundsInfeasible", "upper bound leaves the top message tempting for type " + std::to_string(t)});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Separating ladder: each type's message makes the type below exactly
// indifferent between its own bundle and mimicry at the higher wage.
struct SpenceOutcome {
    std::vector<rat> messages;
    std::vector<rat> wages;
    std::vector<rat> payoffs;
};

inline SpenceOutcome riley_outcome(const SpenceSpec& s) {
    const std::size_t n = s.values.size();
    const rat hi = spence_high_bound(s);
    SpenceOutcome out;
    out.messages.resize(n);
    out.wages = s.values;
    out.messages[0] = spence_low_bound(s);
    for (std::size_t k = 1; k < n; ++k) {
        out.messages[k] = detail::binding_message(s, k - 1, out.messages[k - 1], s.values[k - 1], s.values[k]);
        if (out.messages[k] > hi)
            throw OpError("InfeasibleBounds", "separating ladder exceeds the message bound at type " +
                                                  std::to_string(k));
    }
    for (std::size_t k = 0; k < n; ++k) out.payoffs.push_back(spence_payoff(s, k, out.messages[k], out.wages[k]));
    return out;
}

namespace detail {

// consecutive pools encoded as [first, last] index ranges
template <typename F>
inline void for_each_partition(std::size_t n, F&& f) {
    const std::uint32_t total = n > 1 ? (std::uint32_t(1) << (n - 1)) : 1;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        std::vector<std::pair<std::size_t, std::size_t>> blocks;
        std::size_t start = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i + 1 == n || (mask & (std::uint32_t(1) << i))) {
                blocks.push_back({start, i});
                start = i + 1;
            }
        }
        f(blocks);
    }
}

inline rat pool_wage(const SpenceSpec& s, std::size_t first, std::size_t last) {
    rat mass(0), mean(0);
    for (std::size_t t = first; t <= last; ++t) {
        mass += s.prior[t];
        mean += s.prior[t] * s.values[t];
    }
    return mean / mass;
}

// smallest incentive-compatible message ladder for a partition: the bottom
// pool sits at the low bound and each step binds for the previous pool's top
inline std::optional<SpenceOutcome> partition_outcome(const SpenceSpec& s,
                                                      const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
    const rat lo = spence_low_bound(s);
    const rat hi = spence_high_bound(s);
    std::vector<rat> wages, msgs;
    for (const auto& [first, last] : blocks) wages.push_back(pool_wage(s, first, last));
    msgs.push_back(lo);
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        const std::size_t top_prev = blocks[i - 1].second;
        msgs.push_back(binding_message(s, top_prev, msgs[i - 1], wages[i - 1], wages[i]));
        if (msgs.back() > hi) return std::nullopt;
    }
    SpenceOutcome out;
    out.messages.resize(s.values.size());
    out.wages.resize(s.values.size());
    out.payoffs.resize(s.values.size());
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t t = blocks[i].first; t <= blocks[i].second; ++t) {
            out.messages[t] = msgs[i];
            out.wages[t] = wages[i];
            out.payoffs[t] = spence_payoff(s, t, msgs[i], wages[i]);
        }
    // every type must prefer its own bundle to every other pool's and to any
    // unused message met with the most pessimistic wage
    for (std::size_t t = 0; t < s.values.size(); ++t) {
        for (std::size_t i = 0; i < blocks.size(); ++i)
            if (out.payoffs[t] < spence_payoff(s, t, msgs[i], wages[i])) return std::nullopt;
        if (out.payoffs[t] < spence_payoff(s, t, lo, s.values.front())) return std::nullopt;
    }
    return out;
}

} // namespace detail

// true when some index is strictly better and everything above it weakly so;
// equivalent to a top-down lexicographic comparison
inline bool lex_dominates(const std::vector<rat>& a, const std::vector<rat>& b) {
    if (a.size() != b.size()) throw OpError("LengthMismatch", "payoff vectors differ in length");
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] > b[i]) return true;
        if (a[i] < b[i]) return false;
    }
    return false;
}

inline SpenceOutcome lex_max_outcome(const SpenceSpec& s) {
    std::optional<SpenceOutcome> best;
    detail::for_each_partition(s.values.size(), [&](const auto& blocks) {
        auto out = detail::partition_outcome(s, blocks);
        if (!out) return;
        if (!best || lex_dominates(out->payoffs, best->payoffs)) best = std::move(out);
    });
    if (!best) throw OpError("InfeasibleBounds", "no incentive-compatible pool structure fits the bounds");
    return *best;
}

inline SpenceSpec truncated_game(const SpenceSpec& s, std::size_t j) {
    if (j < 1 || j > s.values.size()) throw OpError("IndexOutOfRange", "truncation index " + std::to_string(j));
    SpenceSpec out;
    out.name = s.name + "#trunc" + std::to_string(j);
    out.values.assign(s.values.begin(), s.values.begin() + j);
    rat mass(0);
    for (std::size_t t = 0; t < j; ++t) mass += s.prior[t];
    for (std::size_t t = 0; t < j; ++t) out.prior.push_back(s.prior[t] / mass);
    out.cost.kind = s.cost.kind;
    if (s.cost.kind == CostKind::Linear)
        out.cost.coefficients.assign(s.cost.coefficients.begin(), s.cost.coefficients.begin() + j);
    out.lo = s.lo;
    out.hi = s.hi;
    return out;
}

// Grid holding every message any pool ladder or separating ladder can use,
// plus a uniform fill so deviations between the special points are covered.
inline std::vector<rat> canonical_grid(const SpenceSpec& s, const rat& step = rat(1, 20)) {
    if (step <= 0) throw OpError("BadStep", "grid step must be positive");
    const rat lo = spence_low_bound(s);
    const rat hi = spence_high_bound(s);
    std::vector<rat> grid;
    auto add = [&](const rat& m) {
        if (m >= lo && m <= hi) grid.push_back(m);
    };
    add(lo);
    try {
        for (const rat& m : riley_outcome(s).messages) add(m);
    } catch (const OpError&) {
        // ladder exceeds the bounds; the partition scan below adds what fits
    }
    detail::for_each_partition(s.values.size(), [&](const auto& blocks) {
        std::vector<rat> wages, msgs;
        for (const auto& [first, last] : blocks) wages.push_back(detail::pool_wage(s, first, last));
        msgs.push_back(lo);
        for (std::size_t i = 1; i < blocks.size(); ++i) {
            msgs.push_back(detail::binding_message(s, blocks[i - 1].second, msgs[i - 1], wages[i - 1], wages[i]));
            if (msgs.back() > hi) break;
            add(msgs.back());
        }
    });
    for (rat m = lo; m <= hi; m += step) add(m);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

namespace detail {

// exact decimal when the reduced denominator is a small power of two and
// five, fraction text otherwise
inline std::string grid_message_label(const rat& v) {
    using boost::multiprecision::cpp_int;
    cpp_int num = boost::multiprecision::numerator(v);
    cpp_int den = boost::multiprecision::denominator(v);
    cpp_int d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    const int places = std::max(twos, fives);
    if (d != 1 || places > 6) return rat_to_fraction_string(v);
    if (places == 0) return num.str();
    cpp_int scale(1);
    for (int i = 0; i < places; ++i) scale *= 10;
    cpp_int scaled = num * (scale / den);
    const bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits = scaled.str();
    if (digits.size() <= std::size_t(places)) digits.insert(0, std::size_t(places) + 1 - digits.size(), '0');
    digits.insert(digits.size() - std::size_t(places), ".");
    return (neg ? "-" : "") + digits;
}

} // namespace detail

inline Game build_grid_game(const SpenceSpec& s, const std::vector<rat>& grid) {
    Game g;
    g.name = s.name.empty() ? "grid" : s.name + "#grid";
    g.action_model = ActionModel::MeanAction;
    for (std::size_t t = 0; t < s.values.size(); ++t)
        g.types.push_back({"t" + std::to_string(t + 1), s.values[t]});
    g.prior = s.prior;
    for (const rat& m : grid) g.messages.push_back({detail::grid_message_label(m), m, false});
    g.cost = s.cost;
    g.terminal_payoffs.assign(g.n_types(), std::vector<std::optional<std::pair<rat, rat>>>(g.n_messages()));
    g.monotone_hint = true;
    validate_game(g);
    return g;
}

// Grid-level checks of the selection claims: the closed-form lex max class
// out-persuades every non-equivalent class, nothing out-persuades it back,
// and so it is the unique most persuasive payoff class on the grid.
struct TheoremReport {
    SpenceOutcome lex_max;
    std::size_t n_classes = 0;
    std::vector<std::size_t> lmse_classes;
    bool lmse_enumerated = false;
    bool out_edges = false;
    bool in_edges_absent = false;
    bool unique_most = false;
    std::vector<std::string> notes;
    bool ok() const { return lmse_enumerated && out_edges && in_edges_absent && unique_most; }
};

inline TheoremReport verify_theorems(const SpenceSpec& s, const std::vector<rat>& grid,
                                     const PersuasionOptions& popts = {}) {
    TheoremReport rep;
    rep.lex_max = lex_max_outcome(s);
    Game g = build_grid_game(s, grid);
    auto classes = enumerate_pure_equilibria(g);
    rep.n_classes = classes.size();
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (payoff_equivalent(classes[i].payoffs, rep.lex_max.payoffs)) rep.lmse_classes.push_back(i);
    rep.lmse_enumerated = !rep.lmse_classes.empty();
    if (!rep.lmse_enumerated) {
        rep.notes.push_back("no enumerated class matches the lex max payoffs");
        return rep;
    }
    if (rep.lmse_classes.size() > 1)
        rep.notes.push_back("payoff tie across " + std::to_string(rep.lmse_classes.size()) +
                            " classes; prior sits outside the generic set");
    std::vector<char> is_lmse(classes.size(), 0);
    for (std::size_t e : rep.lmse_classes) is_lmse[e] = 1;
    rep.out_edges = true;
    rep.in_edges_absent = true;
    for (std::size_t e : rep.lmse_classes) {
        for (std::size_t j = 0; j < classes.size(); ++j) {
            if (is_lmse[j]) continue;
            if (!more_persuasive(g, classes[e], classes[j], popts)) {
                rep.out_edges = false;
                rep.notes.push_back(classes[e].label + " has no unraveling against " + classes[j].label);
            }
            if (more_persuasive(g, classes[j], classes[e], popts)) {
                rep.in_edges_absent = false;
                rep.notes.push_back(classes[j].label + " unravels " + classes[e].label);
            }
        }
    }
    // a class outside the lex-max family lacks the edge into it, so it can
    // never be most persuasive once the two edge checks hold
    rep.unique_most = rep.out_edges && rep.in_edges_absent;
    return rep;
}

// Random ratio-cost specs for the property suite: small half-integer values,
// priors on a twentieth grid with every entry at least one twentieth.
inline SpenceSpec random_spence_spec(std::mt19937_64& rng) {
    SpenceSpec s;
    s.name = "random";
    std::uniform_int_distribution<int> nd(2, 4);
    const int n = nd(rng);
    std::vector<int> halves{1, 2, 3, 4, 5, 6};
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, halves.size() - 1);
        std::swap(halves[i], halves[pick(rng)]);
    }
    halves.resize(n);
    std::sort(halves.begin(), halves.end());
    for (int h : halves) s.values.push_back(rat(h, 2));
    std::vector<int> cuts{0, 20};
    while (cuts.size() < std::size_t(n) + 1) {
        std::uniform_int_distribution<int> cd(1, 19);
        const int c = cd(rng);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    for (int i = 0; i < n; ++i) s.prior.push_back(rat(cuts[i + 1] - cuts[i], 20));
    s.cost.kind = CostKind::Ratio;
    return s;
}

} // namespace sigref
