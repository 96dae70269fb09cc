#pragma once

#include <vector>

namespace treedual {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double value = 0.0;
};

// Dense two-phase primal simplex for the tiny LPs that arise in
// membership tests and vertex oracles.
//
//   min c.x  s.t.  A x = b,  x >= 0
//
// Bland's rule, so it terminates on degenerate problems.
LpResult solve_lp(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c);

// Feasibility of  { x >= 0 : A_ub x <= b_ub,  A_lb x >= b_lb }.
// Returns an x attaining minimal total constraint violation; feasible iff
// the reported violation is <= the caller's tolerance.
struct FeasibilityResult {
    double violation = 0.0;  // phase-1 objective at optimum
    std::vector<double> x;
};

FeasibilityResult lp_feasibility(const std::vector<std::vector<double>>& A_ub,
                                 const std::vector<double>& b_ub,
                                 const std::vector<std::vector<double>>& A_lb,
                                 const std::vector<double>& b_lb,
                                 int n_vars);

}  // namespace treedual
