#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treedual/primal.hpp"
#include "treedual/testgen.hpp"
#include "treedual/verify.hpp"

using namespace treedual;

namespace {

struct Setup {
    MarketScenario scenario;
    MeasurePolytope polytope;
    ConePair cones;
};

Setup prepare(MarketScenario s) {
    Setup out;
    out.scenario = std::move(s);
    out.polytope = enumerate_martingale_vertices(out.scenario);
    out.cones = build_cones(out.polytope);
    return out;
}

}  // namespace

TEST_CASE("probes land where they should") {
    Setup t = prepare(make_tri1());
    NumericPolicy policy;
    ProbeSet ps = make_probes(t.cones, 12, policy);
    CHECK(!ps.K_interior.empty());
    CHECK(!ps.L_interior.empty());
    CHECK(!ps.K_boundary.empty());
    CHECK(!ps.L_boundary.empty());
    for (const auto& z : ps.K_interior) CHECK(in_cone(t.cones, z, ConeRegion::K));
    for (const auto& z : ps.L_interior) CHECK(in_cone(t.cones, z, ConeRegion::L));
    for (const auto& z : ps.K_boundary) {
        CHECK(in_cone(t.cones, z, ConeRegion::ClK));
        CHECK(!in_cone(t.cones, z, ConeRegion::K));
    }
}

TEST_CASE("parallel and serial probe sweeps are identical") {
    Setup t = prepare(make_tri1());
    UtilityField f = UtilityField::log_utility(t.scenario.tree.size());
    NumericPolicy policy;
    ProbeSet ps = make_probes(t.cones, 10, policy);
    std::vector<ProbePair> pairs;
    for (const auto& zK : ps.K_interior)
        for (const auto& zL : ps.L_interior) pairs.push_back({zK, zL});
    auto serial =
        weak_duality_residuals(t.scenario, t.polytope, t.cones, f, pairs, policy, false);
    auto parallel =
        weak_duality_residuals(t.scenario, t.polytope, t.cones, f, pairs, policy, true);
    CHECK(serial == parallel);
}

TEST_CASE("full suite passes on the fixtures") {
    NumericPolicy policy;
    policy.grid_density = 8;  // keep the unit test quick; acceptance runs 20
    for (auto* make : {make_det1, make_bin1, make_tri1}) {
        Setup t = prepare(make());
        for (int family = 0; family < 2; ++family) {
            UtilityField f =
                family == 0 ? UtilityField::log_utility(t.scenario.tree.size())
                            : UtilityField::power_utility(t.scenario.tree.size(), 0.5);
            VerificationReport rep =
                run_verification(t.scenario, t.polytope, t.cones, f, policy);
            for (const auto& c : rep.checks) {
                INFO(c.name << ": residual " << c.worst_residual << " tol "
                            << c.tolerance << " note " << c.note);
                CHECK(c.pass);
            }
        }
    }
}

TEST_CASE("finiteness pattern matches on a fixture") {
    Setup t = prepare(make_tri1());
    UtilityField f = UtilityField::power_utility(t.scenario.tree.size(), -0.5);
    FinitenessReport rep = check_finiteness(t.scenario, t.polytope, t.cones, f);
    CHECK(rep.equivalence_holds);
    CHECK(rep.w_all_finite);
    CHECK(rep.u_all_finite);
}

TEST_CASE("foc record carries its residual breakdown") {
    Setup t = prepare(make_bin1());
    UtilityField f = UtilityField::log_utility(t.scenario.tree.size());
    CheckRecord rec = verify_foc(t.scenario, t.polytope, t.cones, f, 1.0, {});
    CHECK(rec.pass);
    CHECK(rec.note.find("budget") != std::string::npos);
}
