#pragma once

#include <string>
#include <vector>

#include "treedual/cones.hpp"
#include "treedual/policy.hpp"
#include "treedual/polytope.hpp"
#include "treedual/scenario.hpp"
#include "treedual/utility.hpp"

namespace treedual {

enum class SolveStatus { Optimal, ValueMinusInfinity, ValuePlusInfinity, BoundaryDegenerate };

const char* to_string(SolveStatus s);

// Solution of the consumption problem
//   u(x,q) = max { sum_n clock_weight(n) U(n, c_n) :
//                  E_{Q_j}[int c dkappa] <= x + q.p_j  for every vertex j }.
//
// The multipliers mu_j are the Lagrange weights of the vertex budget
// constraints; (subgrad_y, subgrad_r) = (sum mu_j, sum mu_j p_j) is the
// induced supergradient of u at (x,q).
struct PrimalSolution {
    OptionalProcess consumption;
    double value = 0.0;
    std::vector<double> multipliers;
    double subgrad_y = 0.0;
    std::vector<double> subgrad_r;
    std::vector<double> budget_slack;   // per vertex, >= 0 at optimum
    double complementarity = 0.0;       // max_j mu_j * slack_j
    double stationarity_residual = 0.0; // projected-gradient norm at exit
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
};

struct FeasibilityCheck {
    bool feasible = false;
    double worst_violation = 0.0;  // max_j (E_{Q_j}[int c dkappa] - x - q.p_j)
};

// Budget feasibility of a consumption plan against every vertex measure.
// Throws DomainError when (x,q) lies outside cl K.
FeasibilityCheck is_feasible_consumption(const MarketScenario& scenario,
                                         const MeasurePolytope& polytope,
                                         const OptionalProcess& consumption,
                                         double x, const std::vector<double>& q,
                                         const NumericPolicy& policy = {});

// Solves the primal problem through its finite-dimensional Lagrangian dual
// over the vertex multipliers (damped projected Newton); consumption is
// recovered through the inverse marginal.  Throws DomainError outside
// cl K, ConvergenceError past the iteration cap.
PrimalSolution solve_primal(const MarketScenario& scenario,
                            const MeasurePolytope& polytope,
                            const UtilityField& field, double x,
                            const std::vector<double>& q,
                            const NumericPolicy& policy = {});

// w(x) = u(x, 0).
double value_w(const MarketScenario& scenario, const MeasurePolytope& polytope,
               const UtilityField& field, double x,
               const NumericPolicy& policy = {});

// Report of the finiteness-equivalence probe: the pattern
//   (w finite on x>0 and wtilde finite on y>0)
// must match
//   (u finite on interior K probes and v finite on interior L probes).
struct FinitenessReport {
    bool w_all_finite = true;
    bool wtilde_all_finite = true;
    bool u_all_finite = true;
    bool v_all_finite = true;
    bool equivalence_holds = true;
    std::string counterexample;  // empty when the pattern matches
};

FinitenessReport check_finiteness(const MarketScenario& scenario,
                                  const MeasurePolytope& polytope,
                                  const ConePair& cones, const UtilityField& field,
                                  const NumericPolicy& policy = {});

}  // namespace treedual
