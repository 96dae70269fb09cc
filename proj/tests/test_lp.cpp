#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treedual/lp.hpp"

using namespace treedual;

TEST_CASE("simple equality LP") {
    // min -x1 - 2 x2  s.t.  x1 + x2 + s = 4, x2 + t = 3
    std::vector<std::vector<double>> A = {{1, 1, 1, 0}, {0, 1, 0, 1}};
    std::vector<double> b = {4, 3};
    std::vector<double> c = {-1, -2, 0, 0};
    LpResult res = solve_lp(A, b, c);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.value == doctest::Approx(-7.0));
    CHECK(res.x[0] == doctest::Approx(1.0));
    CHECK(res.x[1] == doctest::Approx(3.0));
}

TEST_CASE("infeasible system") {
    // x1 = -1 with x1 >= 0
    LpResult res = solve_lp({{1}}, {-1}, {0});
    CHECK(res.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded objective") {
    // min -x1  s.t.  x1 - x2 = 0
    LpResult res = solve_lp({{1, -1}}, {0}, {-1, 0});
    CHECK(res.status == LpStatus::Unbounded);
}

TEST_CASE("degenerate problem terminates") {
    std::vector<std::vector<double>> A = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
    std::vector<double> b = {1, 1, 1};
    std::vector<double> c = {-1, 0, 0, 0};
    LpResult res = solve_lp(A, b, c);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.value == doctest::Approx(-1.0));
}

TEST_CASE("feasibility helper") {
    // { x >= 0 : x1 + x2 <= 1, x1 >= 2 } is empty
    FeasibilityResult bad = lp_feasibility({{1, 1}}, {1}, {{1, 0}}, {2}, 2);
    CHECK(bad.violation > 0.5);

    FeasibilityResult good = lp_feasibility({{1, 1}}, {1}, {{1, 0}}, {0.25}, 2);
    CHECK(good.violation <= 1e-9);
    CHECK(good.x[0] >= 0.25 - 1e-9);
}
