#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "treedual/errors.hpp"
#include "treedual/oracle.hpp"
#include "treedual/primal.hpp"
#include "treedual/testgen.hpp"

using namespace treedual;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("deterministic market: u(x) = log x, c = x") {
    MarketScenario s = make_det1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    for (double x : {0.5, 1.0, 2.0, 7.0}) {
        PrimalSolution sol = solve_primal(s, p, f, x, {});
        CHECK(sol.status == SolveStatus::Optimal);
        CHECK(sol.value == doctest::Approx(std::log(x)).epsilon(1e-9));
        CHECK(sol.consumption[0] == doctest::Approx(x).epsilon(1e-8));
        CHECK(sol.subgrad_y == doctest::Approx(1.0 / x).epsilon(1e-7));
    }
}

TEST_CASE("binomial closed form") {
    MarketScenario s = make_bin1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    PrimalSolution sol = solve_primal(s, p, f, 1.0, {});
    CHECK(sol.status == SolveStatus::Optimal);
    // u(1) = 1/2 log(9/8); c_T = 1/Z_T = (3/2, 3/4); y = 1
    CHECK(sol.value == doctest::Approx(0.5 * std::log(9.0 / 8.0)).epsilon(1e-8));
    CHECK(sol.consumption[1] == doctest::Approx(1.5).epsilon(1e-7));
    CHECK(sol.consumption[2] == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(sol.subgrad_y == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.complementarity <= 1e-7);
}

TEST_CASE("homogeneity in x for log utility") {
    // log utility: u(sx) = u(x) + E[kappa_T] log s
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    double u1 = solve_primal(s, p, f, 1.0, {0.0}).value;
    double u3 = solve_primal(s, p, f, 3.0, {0.0}).value;
    CHECK(u3 - u1 == doctest::Approx(std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("trinomial with endowment matches the brute-force oracle") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    for (auto family : {0, 1, 2}) {
        UtilityField f = family == 0 ? UtilityField::log_utility(s.tree.size())
                         : family == 1
                             ? UtilityField::power_utility(s.tree.size(), 0.5)
                             : UtilityField::power_utility(s.tree.size(), -1.0);
        for (double q : {0.5, -0.2, 2.0}) {
            PrimalSolution sol = solve_primal(s, p, f, 1.0, {q});
            double oracle = brute_force_primal(s, p, f, 1.0, {q});
            CHECK(sol.value == doctest::Approx(oracle).epsilon(5e-4));
            FeasibilityCheck fc = is_feasible_consumption(s, p, sol.consumption, 1.0, {q});
            CHECK(fc.feasible);
        }
    }
}

TEST_CASE("outside cl K the problem has no admissible plan") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    CHECK_THROWS_AS(solve_primal(s, p, f, 1.0, {-4.0}), DomainError);
    CHECK_THROWS_AS(solve_primal(s, p, f, -0.5, {0.1}), DomainError);
}

TEST_CASE("boundary of cl K with log utility forces u = -inf") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    // (1, -3) zeroes the budget of the vertex pricing the claim at 1/3
    PrimalSolution sol = solve_primal(s, p, f, 1.0, {-3.0});
    CHECK(sol.status == SolveStatus::ValueMinusInfinity);
    CHECK(sol.value == -kInf);

    // bounded-at-zero utility instead gives a degenerate boundary optimum
    UtilityField pos = UtilityField::power_utility(s.tree.size(), 0.5);
    PrimalSolution deg = solve_primal(s, p, pos, 1.0, {-3.0});
    CHECK(deg.status == SolveStatus::BoundaryDegenerate);
    CHECK(std::isfinite(deg.value));
}

TEST_CASE("feasibility check flags overspending") {
    MarketScenario s = make_bin1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    OptionalProcess c = OptionalProcess::constant(3, 0.0);
    c[1] = 2.0;
    c[2] = 0.6;  // E_Q[int c dkappa] = 2/3 + 0.4 > 1
    FeasibilityCheck fc = is_feasible_consumption(s, p, c, 1.0, {});
    CHECK(!fc.feasible);
    CHECK(fc.worst_violation == doctest::Approx(2.0 / 30.0).epsilon(1e-9));
}

TEST_CASE("value function w is concave and increasing") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::power_utility(s.tree.size(), -0.5);
    double w1 = value_w(s, p, f, 0.5);
    double w2 = value_w(s, p, f, 1.0);
    double w3 = value_w(s, p, f, 1.5);
    CHECK(w1 < w2);
    CHECK(w2 < w3);
    CHECK(w2 >= 0.5 * (w1 + w3) - 1e-9);
    CHECK_THROWS_AS(value_w(s, p, f, 0.0), DomainError);
}

TEST_CASE("random trees: solver matches the oracle") {
    Rng rng(21);
    int done = 0;
    while (done < 8) {
        MarketScenario s = random_scenario(rng, 9, 1, 1);
        if (s.tree.leaves().size() > 9) continue;
        MeasurePolytope p = enumerate_martingale_vertices(s);
        UtilityField f = done % 2 == 0
                             ? UtilityField::log_utility(s.tree.size())
                             : UtilityField::power_utility(s.tree.size(), 0.4);
        PrimalSolution sol = solve_primal(s, p, f, 1.0, {0.1});
        double oracle = brute_force_primal(s, p, f, 1.0, {0.1});
        CHECK(sol.value == doctest::Approx(oracle).epsilon(5e-4));
        ++done;
    }
}
