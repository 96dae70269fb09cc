#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treedual/scenario.hpp"
#include "treedual/testgen.hpp"

using namespace treedual;

TEST_CASE("fixtures satisfy all invariants") {
    CHECK(validate_scenario(make_det1()).empty());
    CHECK(validate_scenario(make_bin1()).empty());
    CHECK(validate_scenario(make_tri1()).empty());
}

TEST_CASE("branch probabilities must sum to one") {
    MarketScenario s = make_bin1();
    s.tree = EventTree({[] {
                            TreeNode n;
                            n.prob = 1.0;
                            n.children = {1, 2};
                            return n;
                        }(),
                        [] {
                            TreeNode n;
                            n.parent = 0;
                            n.time = 1;
                            n.prob = 0.5;
                            return n;
                        }(),
                        [] {
                            TreeNode n;
                            n.parent = 0;
                            n.time = 1;
                            n.prob = 0.4;
                            return n;
                        }()});
    auto violations = validate_scenario(s);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations)
        if (v.rule.find("probabilit") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("a clock with no mass anywhere is rejected") {
    MarketScenario s = make_bin1();
    s.clock.increments = {0.0, 0.0, 0.0};
    auto violations = validate_scenario(s);
    REQUIRE(!violations.empty());
}

TEST_CASE("path sums above the clock bound are rejected") {
    MarketScenario s = make_bin1();
    s.clock.bound = 0.5;
    CHECK(!validate_scenario(s).empty());
}

TEST_CASE("clock weights follow the product rule") {
    MarketScenario s = make_bin1();
    CHECK(clock_weight(s, 0) == doctest::Approx(0.0));
    CHECK(clock_weight(s, 1) == doctest::Approx(0.5));
    CHECK(clock_weight(s, 2) == doctest::Approx(0.5));

    // total clock weight is E[kappa_T] <= bound
    double total = 0.0;
    for (int n = 0; n < s.tree.size(); ++n) total += clock_weight(s, n);
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("expectation under the martingale measure prices the asset") {
    MarketScenario s = make_bin1();
    OptionalProcess c = OptionalProcess::constant(3, 0.0);
    c[1] = 2.0;
    c[2] = 0.5;
    // Q = (1/3, 2/3) is the unique martingale measure
    CHECK(expectation_under(s, {1.0 / 3.0, 2.0 / 3.0}, c) == doctest::Approx(1.0));
}

TEST_CASE("expectation rejects broken measures") {
    MarketScenario s = make_bin1();
    OptionalProcess c = OptionalProcess::constant(3, 1.0);
    CHECK_THROWS(expectation_under(s, {0.5, 0.4}, c));
    CHECK_THROWS(expectation_under(s, {1.5, -0.5}, c));
}

TEST_CASE("expectation under the physical measure matches clock weights") {
    MarketScenario s = make_tri1();
    OptionalProcess c = OptionalProcess::constant(4, 0.0);
    for (int n = 0; n < 4; ++n) c[n] = 0.3 * n + 0.1;
    std::vector<double> phys;
    for (int l : s.tree.leaves()) phys.push_back(s.tree.path_prob(l));
    double direct = 0.0;
    for (int n = 0; n < s.tree.size(); ++n) direct += clock_weight(s, n) * c[n];
    CHECK(expectation_under(s, phys, c) == doctest::Approx(direct));
}

TEST_CASE("random scenarios are valid") {
    Rng rng(7);
    for (int i = 0; i < 25; ++i) {
        MarketScenario s = random_scenario(rng);
        CHECK(validate_scenario(s).empty());
        CHECK(static_cast<int>(s.tree.leaves().size()) <= 27);
    }
}
