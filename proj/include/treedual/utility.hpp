#pragma once

#include <vector>

#include "treedual/scenario.hpp"

namespace treedual {

enum class UtilityFamily { Log, Power };

// Node-dependent utility field:
//   U(node, x) = beta(node) * log x              (Log)
//   U(node, x) = beta(node) * x^gamma / gamma    (Power, gamma in (-inf,0) u (0,1))
//
// Both families satisfy the Inada conditions, and the node weight beta
// carries the (t, omega)-dependence while keeping the conjugate V, the
// marginal U' and its inverse I in closed form.
struct UtilityField {
    UtilityFamily family = UtilityFamily::Log;
    double gamma = 0.0;               // unused for Log
    std::vector<double> beta;         // one weight per node

    static UtilityField log_utility(int n_nodes, double beta = 1.0);
    static UtilityField power_utility(int n_nodes, double gamma, double beta = 1.0);

    // sup_x U(x): +inf for log and gamma in (0,1); 0 for gamma < 0.
    double sup_value() const;
    // U(node, 0+): -inf for log and gamma < 0; 0 for gamma in (0,1).
    double value_at_zero(int node) const;
};

// Structural checks (beta > 0 on clock support, Inada sampled at 1e-12 and
// 1e12, strict monotonicity of U').  Empty iff valid.
std::vector<Violation> validate_field(const UtilityField& field,
                                      const MarketScenario& scenario);

// U(node, x) for x >= 0; the x = 0 value is the limit and may be -inf.
double eval_U(const UtilityField& field, int node, double x);

// Convex conjugate V(node, y) = sup_{x>0} (U(node,x) - xy), closed form.
double eval_V(const UtilityField& field, int node, double y);

// Marginal U'(node, x), x > 0.
double marginal(const UtilityField& field, int node, double x);

// Inverse marginal I(node, y): the unique x with U'(node, x) = y, y > 0.
double marginal_inverse(const UtilityField& field, int node, double y);

// d/dy I(node, y), used by the Newton solver (negative).
double marginal_inverse_derivative(const UtilityField& field, int node, double y);

// V''(node, y) = -I'(node, y), strictly positive.
double conjugate_second_derivative(const UtilityField& field, int node, double y);

}  // namespace treedual
