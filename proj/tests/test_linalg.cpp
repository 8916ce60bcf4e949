#include "sigref/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace sigref;

TEST_CASE("simplex solves a small maximization exactly") {
    // maximize x + y  s.t.  x + 2y + s1 = 4, 3x + y + s2 = 6, all >= 0.
    LinearProgram lp;
    lp.A = {{rat(1), rat(2), rat(1), rat(0)}, {rat(3), rat(1), rat(0), rat(1)}};
    lp.b = {rat(4), rat(6)};
    lp.c = {rat(1), rat(1), rat(0), rat(0)};
    auto r = solve_lp(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.objective == rat(14, 5));
    CHECK(r.x[0] == rat(8, 5));
    CHECK(r.x[1] == rat(6, 5));
}

TEST_CASE("simplex reports infeasible systems") {
    // x + y = 1 and x + y = 2 cannot both hold.
    LinearProgram lp;
    lp.A = {{rat(1), rat(1)}, {rat(1), rat(1)}};
    lp.b = {rat(1), rat(2)};
    lp.c = {rat(0), rat(0)};
    CHECK(solve_lp(lp).status == LPStatus::Infeasible);
}

TEST_CASE("simplex reports unbounded objectives") {
    // maximize x with only x - y = 0: both can grow without bound.
    LinearProgram lp;
    lp.A = {{rat(1), rat(-1)}};
    lp.b = {rat(0)};
    lp.c = {rat(1), rat(0)};
    CHECK(solve_lp(lp).status == LPStatus::Unbounded);
}

TEST_CASE("feasible_point finds a belief satisfying inequalities") {
    // Probability pair with x - y >= 1/3: x = 2/3, y = 1/3 works.
    auto point = feasible_point({{rat(1), rat(1)}}, {rat(1)}, {{rat(1), rat(-1)}}, {rat(1, 3)});
    REQUIRE(point.has_value());
    CHECK((*point)[0] + (*point)[1] == rat(1));
    CHECK((*point)[0] - (*point)[1] >= rat(1, 3));
    CHECK((*point)[0] >= 0);
    CHECK((*point)[1] >= 0);

    auto none = feasible_point({{rat(1), rat(1)}}, {rat(1)}, {{rat(1), rat(1)}}, {rat(2)});
    CHECK_FALSE(none.has_value());
}

TEST_CASE("gaussian elimination classifies systems") {
    auto unique = solve_linear_system({{rat(2), rat(1)}, {rat(1), rat(-1)}}, {rat(5), rat(1)});
    REQUIRE(unique.status == LinearSolveStatus::Unique);
    CHECK(unique.x[0] == rat(2));
    CHECK(unique.x[1] == rat(1));

    auto under = solve_linear_system({{rat(1), rat(1)}}, {rat(1)});
    CHECK(under.status == LinearSolveStatus::Underdetermined);

    auto bad = solve_linear_system({{rat(1), rat(1)}, {rat(2), rat(2)}}, {rat(1), rat(3)});
    CHECK(bad.status == LinearSolveStatus::Inconsistent);
}

TEST_CASE("degenerate pivoting terminates") {
    // Classic degenerate corner; Bland's rule must not cycle.
    LinearProgram lp;
    lp.A = {{rat(1), rat(1), rat(1), rat(0)}, {rat(1), rat(-1), rat(0), rat(1)}};
    lp.b = {rat(0), rat(0)};
    lp.c = {rat(1), rat(0), rat(0), rat(0)};
    auto r = solve_lp(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.objective == rat(0));
}
