#pragma once

#include <vector>

#include "treedual/cones.hpp"
#include "treedual/policy.hpp"
#include "treedual/polytope.hpp"
#include "treedual/scenario.hpp"
#include "treedual/utility.hpp"

namespace treedual {

// Independent brute-force solvers for tiny instances.  These deliberately
// avoid the multiplier parametrization used by the production solvers:
// the primal oracle is projected gradient over the consumption polytope,
// the dual oracle is projected descent over node deflator values with
// feasibility expressed through budget tests on cone generators.  Test
// code only; accuracy target is ~1e-5 on problems with <= 9 leaves.

// Vertices of the consumption polytope
//   { c >= 0 on clock-support nodes : E_{Q_j}[int c dkappa] <= x + q.p_j }.
// Returned vectors are indexed by clock-support node order.
std::vector<std::vector<double>> consumption_polytope_vertices(
    const MarketScenario& scenario, const MeasurePolytope& polytope, double x,
    const std::vector<double>& q);

// Clock-support nodes in index order (shared by the oracles and tests).
std::vector<int> clock_support_nodes(const MarketScenario& scenario);

double brute_force_primal(const MarketScenario& scenario,
                          const MeasurePolytope& polytope,
                          const UtilityField& field, double x,
                          const std::vector<double>& q, int restarts = 4);

// The halfspace description used by the dual oracle: one row per
// (cone generator z, consumption vertex c of A(z)) pair, constraining
// sum_n w_n c_n Y_n <= z.(y,r).  This is also the "direct" membership
// route used to cross-check is_in_Y_yr.
struct DeflatorTestSet {
    std::vector<std::vector<double>> rows;  // coefficients w_n c_n per support node
    std::vector<double> bounds_unit_y;      // z.(1, 0...) part: z[0]
    std::vector<std::vector<double>> bounds_r;  // z[1..] part
    std::vector<int> support;               // support node ids

    // right-hand side z.(y,r) for row i
    double bound(size_t i, double y, const std::vector<double>& r) const;
};

DeflatorTestSet build_deflator_test_set(const MarketScenario& scenario,
                                        const MeasurePolytope& polytope,
                                        const ConePair& cones);

// Worst violation of the direct membership conditions for Y at (y,r);
// membership holds iff this is <= tolerance.
double deflator_membership_violation(const DeflatorTestSet& ts,
                                     const OptionalProcess& Y, double y,
                                     const std::vector<double>& r);

double brute_force_dual(const MarketScenario& scenario,
                        const MeasurePolytope& polytope, const ConePair& cones,
                        const UtilityField& field, double y,
                        const std::vector<double>& r, int restarts = 4);

// Maximum of a linear functional of leaf masses over the martingale
// polytope, solved directly as an LP on the one-step constraints.  This
// route never touches the enumerated vertices, so it serves as the second,
// independent membership test for the budget conditions.
double max_over_measures(const MarketScenario& scenario,
                         const std::vector<double>& leaf_objective);

// Budget test via the LP route: max_Q (E_Q[int c dkappa] - q.E_Q[F]) - x.
// Nonpositive iff c is an admissible plan at (x,q).
double consumption_violation_lp(const MarketScenario& scenario,
                                const OptionalProcess& consumption, double x,
                                const std::vector<double>& q);

}  // namespace treedual
