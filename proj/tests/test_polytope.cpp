#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "treedual/errors.hpp"
#include "treedual/oracle.hpp"
#include "treedual/polytope.hpp"
#include "treedual/testgen.hpp"

using namespace treedual;

TEST_CASE("deterministic market has the trivial measure") {
    MeasurePolytope p = enumerate_martingale_vertices(make_det1());
    REQUIRE(p.count() == 1);
    CHECK(p.vertices[0][0] == doctest::Approx(1.0));
    CHECK(p.has_equivalent);
}

TEST_CASE("binomial market is complete") {
    MeasurePolytope p = enumerate_martingale_vertices(make_bin1());
    REQUIRE(p.count() == 1);
    CHECK(p.vertices[0][0] == doctest::Approx(1.0 / 3.0));
    CHECK(p.vertices[0][1] == doctest::Approx(2.0 / 3.0));
    CHECK(p.has_equivalent);
    // density process Z_T = Q/P
    CHECK(p.densities[0][0] == doctest::Approx(1.0));
    CHECK(p.densities[0][1] == doctest::Approx(2.0 / 3.0));
    CHECK(p.densities[0][2] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("trinomial market has two vertex measures") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    REQUIRE(p.count() == 2);
    std::vector<double> prices = {p.claim_expectations[0][0],
                                  p.claim_expectations[1][0]};
    std::sort(prices.begin(), prices.end());
    CHECK(prices[0] == doctest::Approx(0.0));
    CHECK(prices[1] == doctest::Approx(1.0 / 3.0));
    CHECK(p.has_equivalent);
}

TEST_CASE("arbitrage is detected") {
    MarketScenario s = make_bin1();
    s.prices = {{1.0}, {2.0}, {3.0}};  // both branches above the initial price
    CHECK_THROWS_AS(enumerate_martingale_vertices(s), ArbitrageError);

    // initial price on the boundary of the child hull: a martingale measure
    // exists but none with full support
    s.prices = {{2.0}, {2.0}, {3.0}};
    CHECK_THROWS_AS(enumerate_martingale_vertices(s), ArbitrageError);
}

TEST_CASE("superreplication prices") {
    MarketScenario s = make_tri1();
    MeasurePolytope p = enumerate_martingale_vertices(s);
    // the digital claim costs max(0, 1/3) to superreplicate
    CHECK(superreplication_price(s, p, {1.0, 0.0, 0.0}) == doctest::Approx(1.0 / 3.0));
    // the traded asset prices at S_0 under every martingale measure
    CHECK(superreplication_price(s, p, {2.0, 1.0, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("vertices agree with the direct LP over the measure polytope") {
    Rng rng(11);
    for (int trial = 0; trial < 15; ++trial) {
        MarketScenario s = random_scenario(rng, 20, 2, 1);
        MeasurePolytope p = enumerate_martingale_vertices(s);
        CHECK(p.has_equivalent);
        const size_t L = s.tree.leaves().size();
        std::vector<double> objective(L);
        for (size_t l = 0; l < L; ++l) objective[l] = rng.uniform(-1.0, 1.0);
        double lp = max_over_measures(s, objective);
        double best = -1e300;
        for (int j = 0; j < p.count(); ++j) {
            double v = 0.0;
            for (size_t l = 0; l < L; ++l) v += p.vertices[j][l] * objective[l];
            best = std::max(best, v);
        }
        CHECK(best == doctest::Approx(lp).epsilon(1e-8));
    }
}

TEST_CASE("every vertex is a martingale measure with unit mass") {
    Rng rng(3);
    MarketScenario s = random_scenario(rng, 27, 2, 2);
    MeasurePolytope p = enumerate_martingale_vertices(s);
    for (int j = 0; j < p.count(); ++j) {
        double mass = 0.0;
        for (double m : p.vertices[j]) {
            CHECK(m >= -1e-12);
            mass += m;
        }
        CHECK(mass == doctest::Approx(1.0));
        // E_Q[S_T] = S_0 by the tower property of the one-step constraints
        for (int a = 0; a < s.n_assets; ++a) {
            double terminal = 0.0;
            for (size_t l = 0; l < s.tree.leaves().size(); ++l)
                terminal += p.vertices[j][l] *
                            s.prices[static_cast<size_t>(s.tree.leaves()[l])]
                                    [static_cast<size_t>(a)];
            CHECK(terminal == doctest::Approx(s.prices[0][static_cast<size_t>(a)]));
        }
    }
}

TEST_CASE("vertex cap is enforced") {
    MarketScenario s = make_tri1();  // has two vertex measures
    NumericPolicy tight;
    tight.vertex_cap = 1;
    CHECK_THROWS_AS(enumerate_martingale_vertices(s, tight), CapacityError);
}
