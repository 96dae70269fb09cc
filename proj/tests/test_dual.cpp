#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "treedual/dual.hpp"
#include "treedual/errors.hpp"
#include "treedual/oracle.hpp"
#include "treedual/testgen.hpp"

using namespace treedual;

TEST_CASE("deterministic market: v(y) = -log y - 1") {
    MarketScenario s = make_det1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    for (double y : {0.25, 1.0, 3.0}) {
        DualSolution sol = solve_dual(s, p, c, f, y, {});
        CHECK(sol.status == SolveStatus::Optimal);
        CHECK(sol.value == doctest::Approx(-std::log(y) - 1.0).epsilon(1e-7));
        CHECK(sol.deflator[0] == doctest::Approx(y).epsilon(1e-6));
        CHECK(value_wtilde(s, p, f, y) ==
              doctest::Approx(-std::log(y) - 1.0).epsilon(1e-7));
    }
}

TEST_CASE("binomial closed form") {
    MarketScenario s = make_bin1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    // v(y) = -log y - 1 + 1/2 log(9/8)
    double expected = -1.0 + 0.5 * std::log(9.0 / 8.0);
    DualSolution sol = solve_dual(s, p, c, f, 1.0, {});
    CHECK(sol.value == doctest::Approx(expected).epsilon(1e-7));
    // the optimal deflator is the density of the martingale measure
    CHECK(sol.deflator[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
    CHECK(sol.deflator[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("wtilde is convex and decreasing") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::power_utility(s.tree.size(), 0.5);
    double v1 = value_wtilde(s, p, f, 0.5);
    double v2 = value_wtilde(s, p, f, 1.0);
    double v3 = value_wtilde(s, p, f, 1.5);
    CHECK(v1 > v2);
    CHECK(v2 > v3);
    CHECK(v2 <= 0.5 * (v1 + v3) + 1e-9);
}

TEST_CASE("trinomial dual matches the brute-force oracle") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    for (auto family : {0, 1}) {
        UtilityField f = family == 0
                             ? UtilityField::log_utility(s.tree.size())
                             : UtilityField::power_utility(s.tree.size(), -1.0);
        for (double r : {0.05, 0.15, 0.3}) {
            DualSolution sol = solve_dual(s, p, c, f, 1.0, {r});
            double oracle = brute_force_dual(s, p, c, f, 1.0, {r});
            CHECK(sol.value == doctest::Approx(oracle).epsilon(5e-4));
        }
    }
}

TEST_CASE("outside cl L the dual value is +inf by convention") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    CHECK_THROWS_AS(solve_dual(s, p, c, f, 1.0, {0.4}), DomainError);
    CHECK_THROWS_AS(solve_dual(s, p, c, f, 1.0, {-0.1}), DomainError);
    CHECK_THROWS_AS(solve_dual(s, p, c, f, -1.0, {0.0}), DomainError);
}

TEST_CASE("membership of scaled densities") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    (void)f;
    for (int j = 0; j < p.count(); ++j) {
        OptionalProcess Y = p.densities[j];
        CHECK(is_in_Y(s, p, Y, 1.0));
        CHECK(!is_in_Y(s, p, Y, 0.9));
        OptionalProcess Y2 = Y;
        for (double& v : Y2.values) v *= 1.01;
        CHECK(!is_in_Y(s, p, Y2, 1.0));
        CHECK(is_in_Y(s, p, Y2, 1.02));
    }
    // a mixture is dominated at total weight one
    OptionalProcess mix = p.densities[0];
    for (int n = 0; n < s.tree.size(); ++n)
        mix[n] = 0.5 * p.densities[0][n] + 0.5 * p.densities[1][n];
    CHECK(is_in_Y(s, p, mix, 1.0));
}

TEST_CASE("constrained membership agrees with the direct generator route") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    DeflatorTestSet ts = build_deflator_test_set(s, p, c);
    Rng rng(17);
    int agree = 0, total = 0;
    for (int trial = 0; trial < 200; ++trial) {
        OptionalProcess Y = OptionalProcess::constant(s.tree.size(), 0.0);
        for (int n = 0; n < s.tree.size(); ++n) Y[n] = rng.uniform(0.0, 1.6);
        double y = rng.uniform(0.2, 1.5);
        double r = rng.uniform(0.0, 1.0 / 3.0) * y;
        bool lp_route = is_in_Y_yr(s, p, c, Y, y, {r});
        double viol = deflator_membership_violation(ts, Y, y, {r});
        // skip razor-thin boundary cases inside the membership tolerance
        if (std::abs(viol) <= 1e-9) continue;
        ++total;
        if (lp_route == (viol < 0.0)) ++agree;
    }
    CHECK(total > 100);
    CHECK(agree == total);
}

TEST_CASE("dual optimizer is feasible for the direct route") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    UtilityField f = UtilityField::log_utility(s.tree.size());
    DeflatorTestSet ts = build_deflator_test_set(s, p, c);
    DualSolution sol = solve_dual(s, p, c, f, 1.0, {0.2});
    CHECK(deflator_membership_violation(ts, sol.deflator, 1.0, {0.2}) <= 1e-7);
}
