// Times the weak-duality probe sweep with and without OpenMP.  The probe
// solves are independent, so the parallel path must produce bit-identical
// residuals in the same order as the serial one.

#include <chrono>
#include <cstdio>

#include "treedual/cones.hpp"
#include "treedual/polytope.hpp"
#include "treedual/rng.hpp"
#include "treedual/testgen.hpp"
#include "treedual/utility.hpp"
#include "treedual/verify.hpp"

using namespace treedual;

namespace {

double time_sweep(const MarketScenario& sc, const MeasurePolytope& poly,
                  const ConePair& cones, const UtilityField& field,
                  const std::vector<ProbePair>& pairs,
                  const NumericPolicy& policy, bool parallel,
                  std::vector<double>& out) {
    auto t0 = std::chrono::steady_clock::now();
    out = weak_duality_residuals(sc, poly, cones, field, pairs, policy, parallel);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main() {
    NumericPolicy policy;
    Rng rng(policy.seed);
    MarketScenario scenarios[] = {make_tri1(), random_scenario(rng, 27, 2, 2)};
    const char* names[] = {"tri1", "random27"};

    for (int i = 0; i < 2; ++i) {
        const MarketScenario& sc = scenarios[i];
        MeasurePolytope poly = enumerate_martingale_vertices(sc, policy);
        ConePair cones = build_cones(poly, policy);
        UtilityField field = UtilityField::log_utility(sc.tree.size());

        ProbeSet ps = make_probes(cones, 24, policy);
        std::vector<ProbePair> pairs;
        for (const auto& zK : ps.K_interior)
            for (const auto& zL : ps.L_interior) pairs.push_back({zK, zL});

        std::vector<double> serial, parallel;
        double ts = time_sweep(sc, poly, cones, field, pairs, policy, false, serial);
        double tp = time_sweep(sc, poly, cones, field, pairs, policy, true, parallel);
        bool identical = serial == parallel;
        std::printf("%-9s %4zu pairs  serial %.4fs  parallel %.4fs  speedup %.2fx  %s\n",
                    names[i], pairs.size(), ts, tp, ts / tp,
                    identical ? "results identical" : "RESULTS DIFFER");
    }
    return 0;
}
