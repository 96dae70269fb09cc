#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "treedual/testgen.hpp"
#include "treedual/utility.hpp"

using namespace treedual;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log conjugate closed form") {
    UtilityField f = UtilityField::log_utility(1, 2.0);
    // V(y) = beta log(beta/y) - beta
    for (double y : {0.1, 0.5, 1.0, 3.0})
        CHECK(eval_V(f, 0, y) == doctest::Approx(2.0 * std::log(2.0 / y) - 2.0));
    CHECK(marginal(f, 0, 4.0) == doctest::Approx(0.5));
    CHECK(marginal_inverse(f, 0, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("power conjugate closed form") {
    for (double gamma : {0.5, -1.0, 0.3, -2.5}) {
        UtilityField f = UtilityField::power_utility(1, gamma, 1.5);
        for (double y : {0.2, 1.0, 2.0}) {
            // V(y) = sup_x (U(x) - x y), attained at x = I(y)
            double xs = marginal_inverse(f, 0, y);
            CHECK(marginal(f, 0, xs) == doctest::Approx(y));
            CHECK(eval_V(f, 0, y) == doctest::Approx(eval_U(f, 0, xs) - xs * y));
        }
    }
}

TEST_CASE("Fenchel inequality sampled") {
    UtilityField f = UtilityField::power_utility(1, 0.5, 1.0);
    for (double x : {0.1, 1.0, 5.0})
        for (double y : {0.1, 1.0, 5.0})
            CHECK(eval_V(f, 0, y) >= eval_U(f, 0, x) - x * y - 1e-12);
}

TEST_CASE("limits at zero and the supremum") {
    UtilityField lg = UtilityField::log_utility(1);
    CHECK(lg.value_at_zero(0) == -kInf);
    CHECK(lg.sup_value() == kInf);
    UtilityField pos = UtilityField::power_utility(1, 0.5);
    CHECK(pos.value_at_zero(0) == 0.0);
    CHECK(pos.sup_value() == kInf);
    UtilityField neg = UtilityField::power_utility(1, -1.0);
    CHECK(neg.value_at_zero(0) == -kInf);
    CHECK(neg.sup_value() == 0.0);
}

TEST_CASE("conjugate second derivative matches a finite difference") {
    UtilityField f = UtilityField::power_utility(1, -0.7, 1.0);
    double y = 1.3, h = 1e-5;
    double fd = (eval_V(f, 0, y + h) - 2.0 * eval_V(f, 0, y) + eval_V(f, 0, y - h)) / (h * h);
    CHECK(conjugate_second_derivative(f, 0, y) == doctest::Approx(fd).epsilon(1e-4));
    CHECK(marginal_inverse_derivative(f, 0, y) ==
          doctest::Approx(-conjugate_second_derivative(f, 0, y)));
}

TEST_CASE("field validation catches bad weights and exponents") {
    MarketScenario s = make_bin1();
    UtilityField good = UtilityField::log_utility(3);
    CHECK(validate_field(good, s).empty());

    UtilityField bad = good;
    bad.beta[1] = 0.0;  // node 1 carries clock mass
    CHECK(!validate_field(bad, s).empty());

    CHECK_THROWS(UtilityField::power_utility(3, 1.0));
    CHECK_THROWS(UtilityField::power_utility(3, 0.0));
}
