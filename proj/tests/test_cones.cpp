#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "treedual/cones.hpp"
#include "treedual/polytope.hpp"
#include "treedual/testgen.hpp"

using namespace treedual;

namespace {

ConePair tri_cones() {
    MeasurePolytope p = enumerate_martingale_vertices(make_tri1());
    return build_cones(p);
}

}  // namespace

TEST_CASE("trinomial cone pair") {
    ConePair c = tri_cones();
    CHECK(c.dim == 2);
    CHECK(c.L_open);  // two distinct claim prices span the claim axis
    CHECK(c.lineality.empty());
    REQUIRE(c.K_rays.size() == 2);
    REQUIRE(c.L_rays.size() == 2);

    // cl K = { x >= 0 and x + q/3 >= 0 }
    CHECK(in_cone(c, {1.0, 0.5}, ConeRegion::K));
    CHECK(in_cone(c, {1.0, -2.9}, ConeRegion::K));
    CHECK(!in_cone(c, {1.0, -3.1}, ConeRegion::ClK));
    CHECK(!in_cone(c, {-0.1, 0.5}, ConeRegion::ClK));
    CHECK(in_cone(c, {0.0, 1.0}, ConeRegion::ClK));
    CHECK(!in_cone(c, {0.0, 1.0}, ConeRegion::K));
    CHECK(clK_margin(c, {0.0, 1.0}) == doctest::Approx(0.0));

    // cl L = cone{(1,0), (1,1/3)}
    CHECK(in_cone(c, {1.0, 0.2}, ConeRegion::L));
    CHECK(in_cone(c, {1.0, 0.0}, ConeRegion::ClL));
    CHECK(!in_cone(c, {1.0, 0.0}, ConeRegion::L));
    CHECK(!in_cone(c, {1.0, 0.4}, ConeRegion::ClL));
    CHECK(!in_cone(c, {1.0, -0.1}, ConeRegion::ClL));
    CHECK(clL_margin(c, {1.0, 0.4}) < 0.0);
}

TEST_CASE("polarity of the generators") {
    ConePair c = tri_cones();
    for (const auto& g : c.K_rays)
        for (const auto& h : c.L_rays) {
            double dot = 0.0;
            for (size_t i = 0; i < g.size(); ++i) dot += g[i] * h[i];
            CHECK(dot >= -1e-10);
        }
}

TEST_CASE("one-dimensional pair for markets without claims") {
    MeasurePolytope p = enumerate_martingale_vertices(make_bin1());
    ConePair c = build_cones(p);
    CHECK(c.dim == 1);
    CHECK(in_cone(c, {2.0}, ConeRegion::K));
    CHECK(in_cone(c, {2.0}, ConeRegion::L));
    CHECK(!in_cone(c, {-1.0}, ConeRegion::ClK));
    CHECK(in_cone(c, {0.0}, ConeRegion::ClL));
    CHECK(!in_cone(c, {0.0}, ConeRegion::L));
}

TEST_CASE("replicable claim produces a lineality direction") {
    // trinomial market whose claim is the traded asset itself: every vertex
    // measure prices it at S_0 = 1, so cl K is a half-space
    MarketScenario s = make_tri1();
    s.payoffs = {{2.0}, {1.0}, {0.5}};
    MeasurePolytope p = enumerate_martingale_vertices(s);
    ConePair c = build_cones(p);
    REQUIRE(c.lineality.size() == 1);
    CHECK(!c.L_open);

    // cl K = { x + q >= 0 }, cl L = ray through (1, 1)
    CHECK(in_cone(c, {1.0, -0.5}, ConeRegion::K));
    CHECK(in_cone(c, {-1.0, 2.0}, ConeRegion::K));
    CHECK(!in_cone(c, {-1.0, 0.5}, ConeRegion::ClK));
    CHECK(in_cone(c, {2.0, 2.0}, ConeRegion::L));
    CHECK(!in_cone(c, {1.0, 0.9}, ConeRegion::ClL));
    CHECK(!in_cone(c, {0.9, 1.0}, ConeRegion::ClL));
}

TEST_CASE("membership is scale invariant on rays") {
    ConePair c = tri_cones();
    for (const auto& ray : c.K_rays)
        for (double s : {0.5, 1.0, 10.0}) {
            std::vector<double> z = ray;
            for (double& v : z) v *= s;
            CHECK(in_cone(c, z, ConeRegion::ClK));
            CHECK(std::abs(clK_margin(c, z)) <= 1e-9 * s);
        }
}
