#pragma once

#include <string>
#include <vector>

#include "treedual/cones.hpp"
#include "treedual/policy.hpp"
#include "treedual/polytope.hpp"
#include "treedual/scenario.hpp"
#include "treedual/utility.hpp"

namespace treedual {

// One verified statement.  `statement` is the mathematical identity or
// inequality being checked, spelled in the (x,q)/(y,r) notation used
// throughout this library.
struct CheckRecord {
    std::string name;
    std::string statement;
    int probes = 0;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckRecord> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Deterministic probe points on the cone pair.  Interior probes blend
// extreme rays with a fixed interior direction at several scales; boundary
// probes are the extreme rays and lineality directions themselves.
struct ProbeSet {
    std::vector<std::vector<double>> K_interior;
    std::vector<std::vector<double>> K_boundary;
    std::vector<std::vector<double>> L_interior;
    std::vector<std::vector<double>> L_boundary;
};

ProbeSet make_probes(const ConePair& cones, int per_family,
                     const NumericPolicy& policy = {});

// Residual sweep behind the weak-duality check, exposed separately so the
// benchmark can time the parallel and serial paths on identical work.
struct ProbePair {
    std::vector<double> zK;  // (x, q)
    std::vector<double> zL;  // (y, r)
};

std::vector<double> weak_duality_residuals(
    const MarketScenario& scenario, const MeasurePolytope& polytope,
    const ConePair& cones, const UtilityField& field,
    const std::vector<ProbePair>& pairs, const NumericPolicy& policy,
    bool parallel);

// u(x,q) <= v(y,r) + x y + q.r over an interior probe grid.
CheckRecord verify_weak_duality(const MarketScenario& scenario,
                                const MeasurePolytope& polytope,
                                const ConePair& cones, const UtilityField& field,
                                const NumericPolicy& policy = {});

// Both conjugacy identities, with the inner optimization run as a warm-
// started compass descent rather than a grid scan.
CheckRecord verify_biconjugacy(const MarketScenario& scenario,
                               const MeasurePolytope& polytope,
                               const ConePair& cones, const UtilityField& field,
                               const NumericPolicy& policy = {});

// First-order conditions at one interior point: the dual minimizer at the
// multiplier pair (y,r) matches U'(c), budget equality holds, v is finite,
// and (y,r) supports u from above on a probe star.
CheckRecord verify_foc(const MarketScenario& scenario,
                       const MeasurePolytope& polytope, const ConePair& cones,
                       const UtilityField& field, double x,
                       const std::vector<double>& q,
                       const NumericPolicy& policy = {});

// Directional limits at sampled boundary points: u upper semicontinuous on
// cl K, v lower semicontinuous on cl L, with extended values allowed.
CheckRecord verify_semicontinuity(const MarketScenario& scenario,
                                  const MeasurePolytope& polytope,
                                  const ConePair& cones,
                                  const UtilityField& field,
                                  const NumericPolicy& policy = {});

// Cone-pair polarity residuals and agreement of cl K membership with
// superreplication pricing on randomized (x,q).
CheckRecord verify_geometry(const MarketScenario& scenario,
                            const MeasurePolytope& polytope,
                            const ConePair& cones, int samples = 500,
                            const NumericPolicy& policy = {});

// Finiteness-pattern equivalence between (w, wtilde) and (u, v), as a record.
CheckRecord verify_finiteness(const MarketScenario& scenario,
                              const MeasurePolytope& polytope,
                              const ConePair& cones, const UtilityField& field,
                              const NumericPolicy& policy = {});

// Runs the full suite on one scenario.
VerificationReport run_verification(const MarketScenario& scenario,
                                    const MeasurePolytope& polytope,
                                    const ConePair& cones,
                                    const UtilityField& field,
                                    const NumericPolicy& policy = {});

}  // namespace treedual
