#include <catch2/catch_amalgamated.hpp>

#include "sigref/cli.hpp"

#include "fixtures.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace sigref;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string golden_dir() {
    if (const char* env = std::getenv("SIGREF_GOLDENS")) return env;
    return SIGREF_GOLDEN_DIR;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string write_temp(const std::string& name, const std::string& body) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out);
    out << body;
    return path;
}

Profile profile_from_json(const Game& g, const ordered_json& pj, const std::vector<rat>& payoffs) {
    Profile p = make_empty_profile(g);
    for (std::size_t t = 0; t < g.n_types(); ++t)
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            p.sender[t][m] = rat_from_string(pj.at("sender").at(t).at(m).get<std::string>());
    if (g.action_model == ActionModel::MeanAction) {
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            p.wages[m] = rat_from_string(pj.at("wages").at(m).get<std::string>());
    } else {
        for (std::size_t m = 0; m < g.n_messages(); ++m)
            for (std::size_t a = 0; a < g.n_actions(); ++a)
                p.receiver[m][a] = rat_from_string(pj.at("receiver").at(m).at(a).get<std::string>());
    }
    for (std::size_t m = 0; m < g.n_messages(); ++m) {
        const auto& cell = pj.at("beliefs").at(m);
        if (cell.is_null()) continue;
        std::vector<rat> b;
        for (const auto& x : cell) b.push_back(rat_from_string(x.get<std::string>()));
        p.beliefs[m] = std::move(b);
    }
    p.payoffs = payoffs;
    return p;
}

} // namespace

TEST_CASE("report bytes match the goldens", "[cli]") {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
        {{"solve", fixture_path("beer_quiche.json")}, "solve_beer_quiche.txt"},
        {{"solve", fixture_path("discrete.json"), "--mixed-support", "2"}, "solve_discrete_mixed.txt"},
        {{"solve", fixture_path("hiding.json"), "--format", "json"}, "solve_hiding.json"},
        {{"refine", fixture_path("beer_quiche.json"), "--criterion", "intuitive"},
         "refine_beer_quiche_intuitive.txt"},
        {{"refine", fixture_path("hiding.json"), "--criterion", "gp"}, "refine_hiding_gp.txt"},
        {{"refine", fixture_path("doubt.json"), "--criterion", "undefeated"}, "refine_doubt_undefeated.txt"},
        {{"refine", fixture_path("cheap_talk_g1.json"), "--criterion", "persuasive"},
         "refine_cheap_talk_g1_persuasive.txt"},
        {{"compare", fixture_path("hiding.json")}, "compare_hiding.txt"},
        {{"compare", fixture_path("discrete.json"), "--mixed-support", "2"}, "compare_discrete_mixed.txt"},
        {{"graph", fixture_path("doubt.json")}, "graph_doubt.dot"},
        {{"graph", fixture_path("coordination.json"), "--format", "text"}, "graph_coordination.txt"},
        {{"spence", fixture_path("spence2.json")}, "spence_spence2.txt"},
        {{"spence", fixture_path("spence3.json"), "--grid-step", "1/10", "--format", "json"},
         "spence_spence3.json"},
    };
    for (const auto& [args, golden] : cases) {
        CAPTURE(golden);
        auto r = run_cli(args);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        CHECK(r.out == read_file(golden_dir() + "/" + golden));
    }
}

TEST_CASE("repeated runs are byte identical", "[cli]") {
    for (auto args : {std::vector<std::string>{"graph", fixture_path("doubt.json")},
                      std::vector<std::string>{"spence", fixture_path("spence3.json"), "--grid-step", "1/10",
                                               "--format", "json"}}) {
        auto first = run_cli(args);
        auto second = run_cli(args);
        CHECK(first.code == 0);
        CHECK(first.out == second.out);
    }
}

TEST_CASE("solve reports re-verify as sequential equilibria", "[cli]") {
    struct Case {
        std::string fixture;
        std::size_t expected_classes;
        bool mixed = false;
    };
    const std::vector<Case> cases = {
        {"beer_quiche.json", 2}, {"hiding.json", 2},        {"coordination.json", 3}, {"doubt.json", 4},
        {"discrete.json", 3, true}, {"cheap_talk_g1.json", 4}, {"cheap_talk_g2.json", 4},
        {"cheap_talk_g3.json", 2},  {"spence2.json", 0},
    };
    for (const auto& c : cases) {
        CAPTURE(c.fixture);
        std::vector<std::string> args = {"solve", fixture_path(c.fixture), "--format", "json"};
        if (c.mixed) {
            args.push_back("--mixed-support");
            args.push_back("2");
        }
        if (c.fixture == "spence2.json") {
            args.push_back("--grid-step");
            args.push_back("1/4");
        }
        auto r = run_cli(args);
        REQUIRE(r.code == 0);
        auto j = ordered_json::parse(r.out);
        Game g = std::get<Game>(parse_game_spec(j.at("spec")));
        const auto& classes = j.at("classes");
        if (c.expected_classes) CHECK(classes.size() == c.expected_classes);
        REQUIRE(!classes.empty());
        for (const auto& cj : classes) {
            CAPTURE(cj.at("label").get<std::string>());
            std::vector<rat> payoffs;
            for (const auto& x : cj.at("payoffs")) payoffs.push_back(rat_from_string(x.get<std::string>()));
            Profile p = profile_from_json(g, cj.at("profile"), payoffs);
            auto check = is_sequential_equilibrium(g, p);
            CAPTURE(check.violations);
            CHECK(check.ok);
        }
    }
}

TEST_CASE("bare names resolve against the fixture directory", "[cli]") {
    setenv("SIGREF_FIXTURES", fixture_dir().c_str(), 1);
    CHECK(run_cli({"solve", "beer_quiche"}).code == 0);
    CHECK(run_cli({"solve", "beer_quiche.json"}).code == 0);
    auto missing = run_cli({"solve", "no_such_fixture"});
    CHECK(missing.code == 2);
    CHECK(!missing.err.empty());
}

TEST_CASE("schema and validation failures exit 2 and name the field", "[cli]") {
    auto bad_prior = write_temp("sigref_cli_bad_prior.json", R"({
        "name": "bad",
        "types": [{"label": "t1", "value": 1}, {"label": "t2", "value": 2}],
        "prior": [0.5, 0.4],
        "messages": [{"label": "m1"}],
        "action_model": "mean",
        "sender_payoff": {"form": "quasilinear", "cost": {"kind": "ratio"}}
    })");
    auto r = run_cli({"solve", bad_prior});
    CHECK(r.code == 2);
    CHECK(r.err.find("prior") != std::string::npos);

    auto not_json = write_temp("sigref_cli_not_json.json", "{ nope");
    CHECK(run_cli({"solve", not_json}).code == 2);

    auto game_for_spence = run_cli({"spence", fixture_path("beer_quiche.json")});
    CHECK(game_for_spence.code == 2);
    CHECK(game_for_spence.err.find("parametric") != std::string::npos);
}

TEST_CASE("flag misuse exits 2 and help exits 0", "[cli]") {
    CHECK(run_cli({"dance", fixture_path("hiding.json")}).code == 2);
    CHECK(run_cli({"solve", fixture_path("hiding.json"), "--format", "dot"}).code == 2);
    CHECK(run_cli({"refine", fixture_path("hiding.json"), "--criterion", "bogus"}).code == 2);
    CHECK(run_cli({"solve", fixture_path("hiding.json"), "--grid-step", "0"}).code == 2);
    auto help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("spence") != std::string::npos);
}

TEST_CASE("--out writes the report to a file", "[cli]") {
    auto path = (std::filesystem::temp_directory_path() / "sigref_cli_out.txt").string();
    std::filesystem::remove(path);
    auto r = run_cli({"solve", fixture_path("beer_quiche.json"), "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(path) == read_file(golden_dir() + "/solve_beer_quiche.txt"));
}

TEST_CASE("seed lands in json reports and assert passes on sound specs", "[cli]") {
    auto r = run_cli({"solve", fixture_path("hiding.json"), "--format", "json", "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(ordered_json::parse(r.out).at("seed").get<unsigned long long>() == 7);
    CHECK(run_cli({"spence", fixture_path("spence2.json"), "--assert"}).code == 0);
}
