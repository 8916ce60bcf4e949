#include <catch2/catch_amalgamated.hpp>

#include "sigref/refinements.hpp"

#include "fixtures.hpp"

#include <set>
#include <string>
#include <vector>

using namespace sigref;

namespace {

const EquilibriumClass& by_label(const std::vector<EquilibriumClass>& classes, const std::string& label) {
    for (const auto& c : classes)
        if (c.label == label) return c;
    FAIL("no class labelled " + label);
    return classes.front();
}

std::size_t index_of(const std::vector<EquilibriumClass>& classes, const std::string& label) {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].label == label) return i;
    FAIL("no class labelled " + label);
    return 0;
}

void require_defeat_valid(const Game& g, const std::vector<EquilibriumClass>& classes, std::size_t loser,
                          const DefeatWitness& w) {
    REQUIRE(w.by_class != loser);
    const auto& winner = classes[w.by_class];
    bool winner_uses = false;
    for (std::size_t t = 0; t < g.n_types(); ++t) {
        REQUIRE(classes[loser].profile.sender[t][w.message] == 0);
        if (winner.profile.sender[t][w.message] > 0) winner_uses = true;
    }
    REQUIRE(winner_uses);
    bool strict = false;
    for (std::size_t t = 0; t < g.n_types(); ++t) {
        if (winner.profile.sender[t][w.message] == 0) continue;
        REQUIRE(winner.payoffs[t] >= classes[loser].payoffs[t]);
        if (winner.payoffs[t] > classes[loser].payoffs[t]) strict = true;
    }
    REQUIRE(strict);
}

} // namespace

TEST_CASE("beer-quiche: quiche pooling fails the credibility tests") {
    auto g = load_game_fixture("beer_quiche.json");
    auto classes = enumerate_pure_equilibria(g);
    const auto& beer = by_label(classes, "pooling@beer");
    const auto& quiche = by_label(classes, "pooling@quiche");

    CHECK(intuitive_test(g, beer).passes);
    CHECK(d1_test(g, beer).passes);
    CHECK(gp_test(g, beer).passes);

    auto itq = intuitive_test(g, quiche);
    REQUIRE_FALSE(itq.passes);
    CHECK(g.messages[itq.failure->message].label == "beer");
    CHECK(g.types[itq.failure->type].label == "t_s");
    auto d1q = d1_test(g, quiche);
    REQUIRE_FALSE(d1q.passes);
    CHECK(g.messages[d1q.failure->message].label == "beer");
    CHECK(g.types[d1q.failure->type].label == "t_s");
    auto gpq = gp_test(g, quiche);
    REQUIRE_FALSE(gpq.passes);
    CHECK(g.messages[gpq.failure->message].label == "beer");
    REQUIRE(gpq.failure->subset.size() == 1);
    CHECK(g.types[gpq.failure->subset[0]].label == "t_s");

    // neither pooling outcome leaves an unused message the other prefers
    auto und = undefeated_test(g, classes);
    CHECK(und[0].undefeated);
    CHECK(und[1].undefeated);
}

TEST_CASE("hiding game: only the group-deviation test separates the poolings") {
    auto g = load_game_fixture("hiding.json");
    auto classes = enumerate_pure_equilibria(g);
    const auto& hide = by_label(classes, "pooling@m1");
    const auto& talk = by_label(classes, "pooling@m2");

    CHECK(intuitive_test(g, hide).passes);
    CHECK(intuitive_test(g, talk).passes);
    CHECK(d1_test(g, hide).passes);
    CHECK(d1_test(g, talk).passes);

    auto gph = gp_test(g, hide);
    REQUIRE_FALSE(gph.passes);
    CHECK(g.messages[gph.failure->message].label == "m2");
    CHECK(gph.failure->subset == std::vector<std::size_t>{0, 1}); // singletons are punished
    CHECK(gp_test(g, talk).passes);

    auto und = undefeated_test(g, classes);
    std::size_t ih = index_of(classes, "pooling@m1");
    std::size_t it = index_of(classes, "pooling@m2");
    CHECK_FALSE(und[ih].undefeated);
    CHECK(und[it].undefeated);
    REQUIRE(und[ih].defeat.has_value());
    CHECK(und[ih].defeat->by_class == it);
    CHECK(g.messages[und[ih].defeat->message].label == "m2");
    require_defeat_valid(g, classes, ih, *und[ih].defeat);
}

TEST_CASE("coordination: pooling on the outside option is grouped away and defeated") {
    auto g = load_game_fixture("coordination.json");
    auto classes = enumerate_pure_equilibria(g);
    for (const auto& c : classes) {
        CHECK(intuitive_test(g, c).passes);
        CHECK(d1_test(g, c).passes);
    }
    auto gpp = gp_test(g, by_label(classes, "pooling@m1"));
    REQUIRE_FALSE(gpp.passes);
    CHECK(g.messages[gpp.failure->message].label == "m2");
    CHECK(gpp.failure->subset.size() == 1); // one type alone already deviates credibly
    CHECK(gp_test(g, by_label(classes, "separating/1")).passes);
    CHECK(gp_test(g, by_label(classes, "separating/2")).passes);

    auto und = undefeated_test(g, classes);
    std::size_t ip = index_of(classes, "pooling@m1");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        CHECK(und[i].undefeated == (i != ip));
        if (und[i].defeat) require_defeat_valid(g, classes, i, *und[i].defeat);
    }
}

TEST_CASE("reasonable doubt: credibility tests pass, group deviations and defeat prune everything") {
    auto g = load_game_fixture("doubt.json");
    auto classes = enumerate_pure_equilibria(g);
    REQUIRE(classes.size() == 4);
    for (const auto& c : classes) {
        INFO(c.label);
        CHECK(intuitive_test(g, c).passes);
        CHECK(d1_test(g, c).passes);
        CHECK_FALSE(gp_test(g, c).passes);
    }
    // the all-terminal pooling is broken by the two-type group at the first unused message
    auto gpp = gp_test(g, by_label(classes, "pooling@m4"));
    REQUIRE_FALSE(gpp.passes);
    CHECK(g.messages[gpp.failure->message].label == "m1");
    CHECK(gpp.failure->subset == std::vector<std::size_t>{0, 2});

    auto und = undefeated_test(g, classes);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        INFO(classes[i].label);
        CHECK_FALSE(und[i].undefeated);
        require_defeat_valid(g, classes, i, *und[i].defeat);
    }
}

TEST_CASE("job-market trio: every classical test passes every class") {
    auto g = load_game_fixture("discrete.json");
    auto classes = enumerate_mixed_equilibria(g, 2);
    REQUIRE(classes.size() == 3);
    auto und = undefeated_test(g, classes);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        INFO(classes[i].label);
        CHECK(intuitive_test(g, classes[i]).passes);
        CHECK(d1_test(g, classes[i]).passes);
        CHECK(gp_test(g, classes[i]).passes);
        CHECK(und[i].undefeated);
    }
}

TEST_CASE("failing the first credibility test implies failing the pruned one") {
    for (const char* name : {"beer_quiche.json", "hiding.json", "coordination.json", "doubt.json",
                             "cheap_talk_g1.json", "cheap_talk_g2.json", "cheap_talk_g3.json", "discrete.json"}) {
        auto g = load_game_fixture(name);
        auto classes = enumerate_pure_equilibria(g);
        for (const auto& c : classes) {
            INFO(std::string(name) + " " + c.label);
            if (!intuitive_test(g, c).passes) CHECK_FALSE(d1_test(g, c).passes);
        }
    }
}

TEST_CASE("comparison table matches the individual tests") {
    auto g = load_game_fixture("doubt.json");
    auto classes = enumerate_pure_equilibria(g);
    auto rows = comparison_table(g, classes);
    REQUIRE(rows.size() == classes.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].label == classes[i].label);
        CHECK(rows[i].intuitive);
        CHECK(rows[i].d1);
        CHECK_FALSE(rows[i].group);
        CHECK_FALSE(rows[i].undefeated);
        CHECK_FALSE(rows[i].most_persuasive);
        CHECK(rows[i].least_persuasive == (classes[i].label == "pooling@m4"));
    }
}
