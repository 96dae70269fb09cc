#pragma once

#include <vector>

#include "treedual/cones.hpp"
#include "treedual/policy.hpp"
#include "treedual/polytope.hpp"
#include "treedual/primal.hpp"
#include "treedual/scenario.hpp"
#include "treedual/utility.hpp"

namespace treedual {

// Solution of the dual problem
//   v(y,r) = min { sum_n clock_weight(n) V(n, Y_n) : Y in Y(y,r) },
// computed over the parametrized family Y = sum_j lambda_j Z^j with
// lambda >= 0 and the unspent budget (y - sum lambda_j, r - sum lambda_j p_j)
// kept inside cl L.  The minimizer Y is unique; the weights lambda need
// not be.
struct DualSolution {
    OptionalProcess deflator;          // Y at every node
    std::vector<double> weights;       // lambda_j per vertex
    double value = 0.0;
    double slack_y = 0.0;              // y - sum lambda_j
    std::vector<double> slack_r;       // r - sum lambda_j p_j
    double slack_margin = 0.0;         // cl L half-space margin of the slack pair
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
};

// Y in Y(y): some lambda >= 0 with sum lambda <= y dominates Y by
// sum lambda_j Z^j >= Y at every clock-support node.
bool is_in_Y(const MarketScenario& scenario, const MeasurePolytope& polytope,
             const OptionalProcess& Y, double y, const NumericPolicy& policy = {});

// Y in Y(y,r): as above but the unspent budget must stay in cl L.
// Throws DomainError when (y,r) lies outside cl L.
bool is_in_Y_yr(const MarketScenario& scenario, const MeasurePolytope& polytope,
                const ConePair& cones, const OptionalProcess& Y, double y,
                const std::vector<double>& r, const NumericPolicy& policy = {});

// Log-barrier interior-point minimization of the clock-weighted conjugate.
// Throws DomainError outside cl L (v = +inf by convention).
DualSolution solve_dual(const MarketScenario& scenario,
                        const MeasurePolytope& polytope, const ConePair& cones,
                        const UtilityField& field, double y,
                        const std::vector<double>& r,
                        const NumericPolicy& policy = {});

// wtilde(y): infimum over Y(y), i.e. the single cap sum lambda_j <= y.
double value_wtilde(const MarketScenario& scenario,
                    const MeasurePolytope& polytope, const UtilityField& field,
                    double y, const NumericPolicy& policy = {});

}  // namespace treedual
