// Command-line front end. Loads a game or parametric spec from JSON, runs the
// requested analysis, and renders a deterministic text, JSON, or DOT report.
#pragma once

#include "sigref/equilibria.hpp"
#include "sigref/game.hpp"
#include "sigref/game_json.hpp"
#include "sigref/persuasion.hpp"
#include "sigref/refinements.hpp"
#include "sigref/spence.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace sigref::cli {

struct RunConfig {
    std::string command;
    std::string input;
    std::string criterion = "all";
    std::size_t mixed_support = 0; // sender support size cap; 0 = pure profiles only
    rat grid_step = rat(1, 20);
    std::string format; // empty = command default (dot for graph, text otherwise)
    std::string out_path;
    unsigned long long seed = 0;
    bool assert_ok = false;
};

namespace detail {

// literal path first, then $SIGREF_FIXTURES (with optional .json suffix),
// then the compile-time fixture directory when one is baked in
inline std::string resolve_input(const std::string& name) {
    namespace fs = std::filesystem;
    if (fs::exists(name)) return name;
    auto probe = [&](const fs::path& dir) -> std::optional<std::string> {
        fs::path direct = dir / name;
        if (fs::exists(direct)) return direct.string();
        fs::path suffixed = dir / (name + ".json");
        if (fs::exists(suffixed)) return suffixed.string();
        return std::nullopt;
    };
    if (const char* env = std::getenv("SIGREF_FIXTURES"))
        if (auto hit = probe(env)) return *hit;
#ifdef SIGREF_FIXTURE_DIR
    if (auto hit = probe(SIGREF_FIXTURE_DIR)) return *hit;
#endif
    return name; // let the loader report the open failure
}

inline std::string decimal_tuple(const std::vector<rat>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += rat_to_decimal_string(v[i], 2);
    }
    return s + ")";
}

inline ordered_json fraction_list(const std::vector<rat>& v) {
    auto a = ordered_json::array();
    for (const auto& x : v) a.push_back(rat_to_fraction_string(x));
    return a;
}

inline ordered_json profile_to_json(const Game& g, const Profile& p) {
    ordered_json j;
    auto sender = ordered_json::array();
    for (const auto& row : p.sender) sender.push_back(fraction_list(row));
    j["sender"] = std::move(sender);
    if (g.action_model == ActionModel::MeanAction) {
        j["wages"] = fraction_list(p.wages);
    } else {
        auto receiver = ordered_json::array();
        for (const auto& row : p.receiver) receiver.push_back(fraction_list(row));
        j["receiver"] = std::move(receiver);
    }
    auto beliefs = ordered_json::array();
    for (const auto& b : p.beliefs)
        beliefs.push_back(b ? ordered_json(fraction_list(*b)) : ordered_json(nullptr));
    j["beliefs"] = std::move(beliefs);
    return j;
}

inline ordered_json class_to_json(const Game& g, const EquilibriumClass& c) {
    ordered_json j;
    j["label"] = c.label;
    j["mixed"] = c.mixed;
    j["payoffs"] = fraction_list(c.payoffs);
    j["profile"] = profile_to_json(g, c.profile);
    return j;
}

inline ordered_json outcome_to_json(const SpenceOutcome& o) {
    ordered_json j;
    j["messages"] = fraction_list(o.messages);
    j["wages"] = fraction_list(o.wages);
    j["payoffs"] = fraction_list(o.payoffs);
    return j;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline void emit_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

struct LoadedSpec {
    Game game;
    std::optional<SpenceSpec> spence; // set when the input was parametric
};

inline LoadedSpec realize_game(ParsedSpec spec, const rat& grid_step) {
    if (auto* g = std::get_if<Game>(&spec)) return {std::move(*g), std::nullopt};
    auto s = std::get<SpenceSpec>(std::move(spec));
    validate_spence_spec(s);
    Game g = build_grid_game(s, canonical_grid(s, grid_step));
    return {std::move(g), std::move(s)};
}

inline std::vector<EquilibriumClass> enumerate_for(const Game& g, const RunConfig& cfg) {
    if (cfg.mixed_support == 0) return enumerate_pure_equilibria(g);
    return enumerate_mixed_equilibria(g, cfg.mixed_support);
}

inline ordered_json report_header(const RunConfig& cfg, const LoadedSpec& loaded) {
    ordered_json j;
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    j["game"] = loaded.game.name;
    if (cfg.command != "spence") j["mixed_support"] = cfg.mixed_support;
    if (loaded.spence) j["grid_step"] = rat_to_fraction_string(cfg.grid_step);
    return j;
}

inline int run_solve(const RunConfig& cfg, const LoadedSpec& loaded, std::ostream& out) {
    const Game& g = loaded.game;
    auto classes = enumerate_for(g, cfg);
    if (cfg.format == "json") {
        ordered_json j = report_header(cfg, loaded);
        j["spec"] = game_to_json(g);
        auto arr = ordered_json::array();
        for (const auto& c : classes) arr.push_back(class_to_json(g, c));
        j["classes"] = std::move(arr);
        emit_json(out, j);
        return 0;
    }
    out << "game " << g.name << ": " << classes.size() << " equilibrium class"
        << (classes.size() == 1 ? "" : "es") << "\n";
    for (const auto& c : classes) {
        out << "- " << c.label << ": payoffs " << decimal_tuple(c.payoffs);
        if (c.mixed) out << " [mixed]";
        out << "\n";
    }
    return 0;
}

inline void credibility_lines(std::ostream& out, const Game& g, const std::vector<EquilibriumClass>& classes,
                              bool dominance_pruned) {
    for (const auto& c : classes) {
        auto r = dominance_pruned ? d1_test(g, c) : intuitive_test(g, c);
        out << "- " << c.label << ": " << (r.passes ? "pass" : "fail");
        if (r.failure)
            out << " (deviation " << g.messages[r.failure->message].label << " by "
                << g.types[r.failure->type].label << ")";
        out << "\n";
    }
}

inline ordered_json credibility_json(const Game& g, const std::vector<EquilibriumClass>& classes,
                                     bool dominance_pruned) {
    auto arr = ordered_json::array();
    for (const auto& c : classes) {
        auto r = dominance_pruned ? d1_test(g, c) : intuitive_test(g, c);
        ordered_json v;
        v["class"] = c.label;
        v["passes"] = r.passes;
        if (r.failure) {
            ordered_json f;
            f["message"] = g.messages[r.failure->message].label;
            f["type"] = g.types[r.failure->type].label;
            v["failure"] = std::move(f);
        } else {
            v["failure"] = nullptr;
        }
        arr.push_back(std::move(v));
    }
    return arr;
}

inline int run_refine(const RunConfig& cfg, const LoadedSpec& loaded, std::ostream& out) {
    const Game& g = loaded.game;
    auto classes = enumerate_for(g, cfg);
    const bool json = cfg.format == "json";
    ordered_json report = report_header(cfg, loaded);
    report["criterion"] = cfg.criterion;
    if (!json)
        out << "game " << g.name << ": criterion " << cfg.criterion << ", " << classes.size()
            << " class" << (classes.size() == 1 ? "" : "es") << "\n";

    if (cfg.criterion == "intuitive" || cfg.criterion == "d1") {
        const bool pruned = cfg.criterion == "d1";
        if (json)
            report["verdicts"] = credibility_json(g, classes, pruned);
        else
            credibility_lines(out, g, classes, pruned);
    } else if (cfg.criterion == "gp") {
        auto arr = ordered_json::array();
        for (const auto& c : classes) {
            auto r = gp_test(g, c);
            if (json) {
                ordered_json v;
                v["class"] = c.label;
                v["passes"] = r.passes;
                if (r.failure) {
                    ordered_json f;
                    f["message"] = g.messages[r.failure->message].label;
                    auto types = ordered_json::array();
                    for (auto t : r.failure->subset) types.push_back(g.types[t].label);
                    f["types"] = std::move(types);
                    v["failure"] = std::move(f);
                } else {
                    v["failure"] = nullptr;
                }
                arr.push_back(std::move(v));
            } else {
                out << "- " << c.label << ": " << (r.passes ? "pass" : "fail");
                if (r.failure) {
                    out << " (deviation " << g.messages[r.failure->message].label << " by {";
                    for (std::size_t i = 0; i < r.failure->subset.size(); ++i) {
                        if (i) out << ", ";
                        out << g.types[r.failure->subset[i]].label;
                    }
                    out << "})";
                }
                out << "\n";
            }
        }
        if (json) report["verdicts"] = std::move(arr);
    } else if (cfg.criterion == "undefeated") {
        auto results = undefeated_test(g, classes);
        auto arr = ordered_json::array();
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const auto& r = results[i];
            if (json) {
                ordered_json v;
                v["class"] = classes[i].label;
                v["undefeated"] = r.undefeated;
                v["defeated_by"] = r.defeat ? ordered_json(classes[r.defeat->by_class].label) : ordered_json(nullptr);
                v["message"] = r.defeat ? ordered_json(g.messages[r.defeat->message].label) : ordered_json(nullptr);
                arr.push_back(std::move(v));
            } else {
                out << "- " << classes[i].label << ": " << (r.undefeated ? "undefeated" : "defeated");
                if (r.defeat)
                    out << " (by " << classes[r.defeat->by_class].label << " at "
                        << g.messages[r.defeat->message].label << ")";
                out << "\n";
            }
        }
        if (json) report["verdicts"] = std::move(arr);
    } else if (cfg.criterion == "persuasive") {
        auto d = persuasion_digraph(g, classes);
        auto in = [](const std::vector<std::size_t>& v, std::size_t i) {
            return std::find(v.begin(), v.end(), i) != v.end();
        };
        auto arr = ordered_json::array();
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (json) {
                ordered_json v;
                v["class"] = classes[i].label;
                v["most"] = in(d.most, i);
                v["least"] = in(d.least, i);
                arr.push_back(std::move(v));
            } else {
                out << "- " << classes[i].label << ": most=" << yes_no(in(d.most, i))
                    << " least=" << yes_no(in(d.least, i)) << "\n";
            }
        }
        if (json) report["verdicts"] = std::move(arr);
    } else { // all
        auto rows = comparison_table(g, classes);
        auto arr = ordered_json::array();
        for (const auto& row : rows) {
            if (json) {
                ordered_json v;
                v["class"] = row.label;
                v["intuitive"] = row.intuitive;
                v["d1"] = row.d1;
                v["gp"] = row.group;
                v["undefeated"] = row.undefeated;
                v["most_persuasive"] = row.most_persuasive;
                v["least_persuasive"] = row.least_persuasive;
                arr.push_back(std::move(v));
            } else {
                out << "- " << row.label << ": intuitive=" << yes_no(row.intuitive) << " d1=" << yes_no(row.d1)
                    << " gp=" << yes_no(row.group) << " undefeated=" << yes_no(row.undefeated)
                    << " most=" << yes_no(row.most_persuasive) << " least=" << yes_no(row.least_persuasive)
                    << "\n";
            }
        }
        if (json) report["verdicts"] = std::move(arr);
    }
    if (json) emit_json(out, report);
    return 0;
}

inline int run_compare(const RunConfig& cfg, const LoadedSpec& loaded, std::ostream& out) {
    const Game& g = loaded.game;
    auto classes = enumerate_for(g, cfg);
    auto rows = comparison_table(g, classes);
    if (cfg.format == "json") {
        ordered_json j = report_header(cfg, loaded);
        auto arr = ordered_json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            ordered_json v;
            v["class"] = row.label;
            v["payoffs"] = fraction_list(classes[i].payoffs);
            v["intuitive"] = row.intuitive;
            v["d1"] = row.d1;
            v["gp"] = row.group;
            v["undefeated"] = row.undefeated;
            v["most_persuasive"] = row.most_persuasive;
            v["least_persuasive"] = row.least_persuasive;
            arr.push_back(std::move(v));
        }
        j["rows"] = std::move(arr);
        emit_json(out, j);
        return 0;
    }
    out << "game " << g.name << ": " << classes.size() << " class" << (classes.size() == 1 ? "" : "es") << "\n";
    out << "class | payoffs | intuitive | d1 | gp | undefeated | most | least\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        out << row.label << " | " << decimal_tuple(classes[i].payoffs) << " | " << yes_no(row.intuitive) << " | "
            << yes_no(row.d1) << " | " << yes_no(row.group) << " | " << yes_no(row.undefeated) << " | "
            << yes_no(row.most_persuasive) << " | " << yes_no(row.least_persuasive) << "\n";
    }
    return 0;
}

inline int run_graph(const RunConfig& cfg, const LoadedSpec& loaded, std::ostream& out) {
    const Game& g = loaded.game;
    auto classes = enumerate_for(g, cfg);
    auto d = persuasion_digraph(g, classes);
    auto labels_of = [&](const std::vector<std::size_t>& v) {
        auto a = ordered_json::array();
        for (auto i : v) a.push_back(classes[i].label);
        return a;
    };
    if (cfg.format == "json") {
        ordered_json j = report_header(cfg, loaded);
        auto nodes = ordered_json::array();
        for (const auto& c : classes) nodes.push_back(c.label);
        j["nodes"] = std::move(nodes);
        auto edges = ordered_json::array();
        for (const auto& e : d.edges) {
            ordered_json v;
            v["from"] = classes[e.from].label;
            v["to"] = classes[e.to].label;
            v["message"] = g.messages[e.witness.message].label;
            edges.push_back(std::move(v));
        }
        j["edges"] = std::move(edges);
        j["most"] = labels_of(d.most);
        j["least"] = labels_of(d.least);
        auto cycles = ordered_json::array();
        for (const auto& cyc : d.cycles) cycles.push_back(labels_of(cyc));
        j["cycles"] = std::move(cycles);
        emit_json(out, j);
        return 0;
    }
    if (cfg.format == "text") {
        out << "game " << g.name << ": " << classes.size() << " class" << (classes.size() == 1 ? "" : "es")
            << ", " << d.edges.size() << " edge" << (d.edges.size() == 1 ? "" : "s") << "\n";
        for (const auto& e : d.edges)
            out << "- " << classes[e.from].label << " -> " << classes[e.to].label << " at "
                << g.messages[e.witness.message].label << "\n";
        auto list = [&](const char* tag, const std::vector<std::size_t>& v) {
            out << tag << ":";
            if (v.empty()) out << " none";
            for (auto i : v) out << " " << classes[i].label;
            out << "\n";
        };
        list("most", d.most);
        list("least", d.least);
        out << "cycles:";
        if (d.cycles.empty()) out << " none";
        out << "\n";
        for (const auto& cyc : d.cycles) {
            out << "- [";
            for (std::size_t i = 0; i < cyc.size(); ++i) {
                if (i) out << ", ";
                out << classes[cyc[i]].label;
            }
            out << "]\n";
        }
        return 0;
    }
    // DOT: indexed node ids so labels never need escaping beyond quotes
    out << "digraph persuasion {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < classes.size(); ++i)
        out << "  n" << i << " [label=\"" << classes[i].label << "\"];\n";
    for (const auto& e : d.edges)
        out << "  n" << e.from << " -> n" << e.to << " [label=\"" << g.messages[e.witness.message].label
            << "\"];\n";
    out << "}\n";
    return 0;
}

inline int run_spence(const RunConfig& cfg, const SpenceSpec& s, std::ostream& out) {
    validate_spence_spec(s);
    auto grid = canonical_grid(s, cfg.grid_step);
    auto riley = riley_outcome(s);
    auto rep = verify_theorems(s, grid);
    if (cfg.format == "json") {
        ordered_json j;
        j["command"] = cfg.command;
        j["seed"] = cfg.seed;
        j["spec"] = s.name;
        j["grid_step"] = rat_to_fraction_string(cfg.grid_step);
        j["bounds"] = fraction_list({spence_low_bound(s), spence_high_bound(s)});
        j["riley"] = outcome_to_json(riley);
        j["lex_max"] = outcome_to_json(rep.lex_max);
        j["grid"] = fraction_list(grid);
        ordered_json r;
        r["n_classes"] = rep.n_classes;
        r["lmse_classes"] = rep.lmse_classes;
        r["lmse_enumerated"] = rep.lmse_enumerated;
        r["out_edges"] = rep.out_edges;
        r["in_edges_absent"] = rep.in_edges_absent;
        r["unique_most"] = rep.unique_most;
        r["ok"] = rep.ok();
        r["notes"] = rep.notes;
        j["report"] = std::move(r);
        emit_json(out, j);
    } else {
        out << "spec " << s.name << ": " << s.values.size() << " type" << (s.values.size() == 1 ? "" : "s")
            << ", bounds [" << rat_to_decimal_string(spence_low_bound(s), 2) << ", "
            << rat_to_decimal_string(spence_high_bound(s), 2) << "]\n";
        out << "riley: messages " << decimal_tuple(riley.messages) << " wages " << decimal_tuple(riley.wages)
            << " payoffs " << decimal_tuple(riley.payoffs) << "\n";
        out << "lex max: messages " << decimal_tuple(rep.lex_max.messages) << " wages "
            << decimal_tuple(rep.lex_max.wages) << " payoffs " << decimal_tuple(rep.lex_max.payoffs) << "\n";
        out << "grid: " << grid.size() << " messages, " << rep.n_classes << " equilibrium class"
            << (rep.n_classes == 1 ? "" : "es") << "\n";
        out << "checks: enumerated=" << yes_no(rep.lmse_enumerated) << " out-edges=" << yes_no(rep.out_edges)
            << " no-in-edges=" << yes_no(rep.in_edges_absent) << " unique-most=" << yes_no(rep.unique_most)
            << " ok=" << yes_no(rep.ok()) << "\n";
        for (const auto& note : rep.notes) out << "note: " << note << "\n";
    }
    return cfg.assert_ok && !rep.ok() ? 1 : 0;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto spec = parse_game_spec_file(resolve_input(cfg.input));
    if (cfg.command == "spence") {
        if (!std::holds_alternative<SpenceSpec>(spec)) {
            err << "error: the spence command needs a parametric spec, not a game table\n";
            return 2;
        }
        return run_spence(cfg, std::get<SpenceSpec>(spec), out);
    }
    auto loaded = realize_game(std::move(spec), cfg.grid_step);
    if (cfg.command == "solve") return run_solve(cfg, loaded, out);
    if (cfg.command == "refine") return run_refine(cfg, loaded, out);
    if (cfg.command == "compare") return run_compare(cfg, loaded, out);
    return run_graph(cfg, loaded, out);
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string grid_step_text = "1/20";
    CLI::App app{"finite signaling games: equilibria, refinements, persuasion order", "sigref"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool with_enumeration) {
        sub->add_option("input", cfg.input, "game or spec file (path, or name under $SIGREF_FIXTURES)")
            ->required();
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"text", "json", "dot"}));
        sub->add_option("--out", cfg.out_path, "write the report to this file instead of stdout");
        sub->add_option("--seed", cfg.seed, "seed recorded in JSON reports");
        sub->add_option("--grid-step", grid_step_text, "message grid step for parametric specs");
        if (with_enumeration)
            sub->add_option("--mixed-support", cfg.mixed_support,
                            "max sender support size for mixed search; 0 = pure only");
    };
    add_common(app.add_subcommand("solve", "enumerate sequential equilibrium classes"), true);
    auto* refine = app.add_subcommand("refine", "run one refinement criterion over the classes");
    add_common(refine, true);
    refine->add_option("--criterion", cfg.criterion, "which test to run")
        ->check(CLI::IsMember({"persuasive", "intuitive", "d1", "gp", "undefeated", "all"}));
    add_common(app.add_subcommand("compare", "criteria matrix over all classes"), true);
    add_common(app.add_subcommand("graph", "pairwise persuasion digraph"), true);
    auto* spence = app.add_subcommand("spence", "parametric ladder outcomes and selection checks");
    add_common(spence, false);
    spence->add_flag("--assert", cfg.assert_ok, "exit 1 unless every selection check passes");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        cfg.grid_step = rat_from_string(grid_step_text);
        if (cfg.grid_step <= 0) {
            err << "error: the grid step must be positive\n";
            return 2;
        }
        std::ofstream file;
        std::ostream* sink = &out;
        if (!cfg.out_path.empty()) {
            file.open(cfg.out_path);
            if (!file) {
                err << "error: cannot open " << cfg.out_path << " for writing\n";
                return 2;
            }
            sink = &file;
        }
        if (cfg.format.empty()) cfg.format = cfg.command == "graph" ? "dot" : "text";
        if (cfg.format == "dot" && cfg.command != "graph") {
            err << "error: dot output only applies to the graph command\n";
            return 2;
        }
        return detail::dispatch(cfg, *sink, err);
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const OpError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace sigref::cli
