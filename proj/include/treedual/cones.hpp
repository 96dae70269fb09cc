#pragma once

#include <vector>

#include "treedual/policy.hpp"
#include "treedual/polytope.hpp"

namespace treedual {

// The primal/dual cone pair in R^{N+1}, coordinates (x, q):
//
//   cl K = { (x,q) : x + q.p >= 0 for every p in conv{p_j} }
//   cl L = cone{ (1, p_j) }          (the polar cone of cl K)
//
// Both cones are kept in half-space and generator form.  K_rays holds the
// extreme rays of the pointed part; `lineality` a basis of the lineality
// space of cl K (nonempty exactly when the p_j do not affinely span R^N,
// e.g. a replicable claim).  Generators of cl K are K_rays together with
// +/- lineality.
struct ConePair {
    int dim = 1;                                     // N + 1
    std::vector<std::vector<double>> K_halfspaces;   // rows (1, p), z.row >= 0
    std::vector<std::vector<double>> K_rays;
    std::vector<std::vector<double>> lineality;
    std::vector<std::vector<double>> L_rays;         // rows (1, p), p in P_set
    std::vector<std::vector<double>> L_halfspaces;   // K_rays plus +/- lineality
    std::vector<std::vector<double>> P_set;          // extreme points of conv{p_j}
    bool L_open = false;                             // cl L full-dimensional
};

enum class ConeRegion { K, ClK, L, ClL };

// Builds the cone pair from the endowment expectation vectors of the
// measure polytope.  Requires has_equivalent.
ConePair build_cones(const MeasurePolytope& polytope,
                     const NumericPolicy& policy = {});

// Membership by half-space evaluation.  K tests the interior, L the
// relative interior; both use strict inequalities with policy.interior_tol.
bool in_cone(const ConePair& cones, const std::vector<double>& point,
             ConeRegion which, const NumericPolicy& policy = {});

// Smallest half-space residual of `point` against cl K (negative outside).
double clK_margin(const ConePair& cones, const std::vector<double>& point);

// Same for cl L.
double clL_margin(const ConePair& cones, const std::vector<double>& point);

}  // namespace treedual
