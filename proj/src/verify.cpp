#include "treedual/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "treedual/dual.hpp"
#include "treedual/errors.hpp"
#include "treedual/primal.hpp"
#include "treedual/rng.hpp"

namespace treedual {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Extended-value evaluation: u = -inf outside cl K or when mass is forced
// to zero consumption under a utility unbounded below; NaN flags a solver
// failure so searches skip the point instead of trusting it.
double u_eval(const MarketScenario& scenario, const MeasurePolytope& polytope,
              const UtilityField& field, const std::vector<double>& zK,
              const NumericPolicy& policy) {
    std::vector<double> q(zK.begin() + 1, zK.end());
    try {
        return solve_primal(scenario, polytope, field, zK[0], q, policy).value;
    } catch (const DomainError&) {
        return -kInf;
    } catch (const ConvergenceError&) {
        return kNaN;
    }
}

double v_eval(const MarketScenario& scenario, const MeasurePolytope& polytope,
              const ConePair& cones, const UtilityField& field,
              const std::vector<double>& zL, const NumericPolicy& policy) {
    std::vector<double> r(zL.begin() + 1, zL.end());
    try {
        return solve_dual(scenario, polytope, cones, field, zL[0], r, policy).value;
    } catch (const DomainError&) {
        return kInf;
    } catch (const ConvergenceError&) {
        return kNaN;
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Pattern (compass) minimization; f may return +inf or NaN for points it
// cannot evaluate.  Good enough in <= 3 dimensions on convex objectives.
double compass_min(std::vector<double> x, double step,
                   const std::function<double(const std::vector<double>&)>& f) {
    double fx = f(x);
    int evals = 1;
    while (step > 1e-9 && evals < 6000) {
        bool improved = false;
        for (size_t i = 0; i < x.size(); ++i) {
            for (double s : {step, -step}) {
                std::vector<double> cand = x;
                cand[i] += s;
                double fc = f(cand);
                ++evals;
                if (fc < fx - 1e-15 * (1.0 + std::abs(fx))) {
                    x = cand;
                    fx = fc;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return fx;
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
    std::vector<double> out = v;
    for (double& x : out) x *= s;
    return out;
}

std::vector<double> blend(const std::vector<double>& a,
                          const std::vector<double>& b, double theta) {
    std::vector<double> out(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        out[i] = (1.0 - theta) * a[i] + theta * b[i];
    return out;
}

// Geometric-sequence limit estimate for values converging like C * eps^a.
// One-sided by construction: the caller compares against the boundary
// value in the semicontinuity direction only.
double extrapolate_limit(const std::vector<double>& vals) {
    const size_t n = vals.size();
    double last = vals[n - 1];
    if (n < 3) return last;
    double d1 = vals[n - 3] - vals[n - 2];
    double d2 = vals[n - 2] - vals[n - 1];
    if (std::abs(d2) < 1e-13 * (1.0 + std::abs(last))) return last;
    double rho = d1 / d2;
    if (!(rho > 1.2)) return last;
    return last - d2 / (rho - 1.0);
}

bool diverges_down(const std::vector<double>& vals) {
    const size_t n = vals.size();
    if (n < 4) return false;
    for (size_t i = n - 4; i + 1 < n; ++i)
        if (!(vals[i + 1] < vals[i])) return false;
    return vals[n - 1] < vals[0] - 1.0;
}

bool diverges_up(const std::vector<double>& vals) {
    const size_t n = vals.size();
    if (n < 4) return false;
    for (size_t i = n - 4; i + 1 < n; ++i)
        if (!(vals[i + 1] > vals[i])) return false;
    return vals[n - 1] > vals[0] + 1.0;
}

}  // namespace

ProbeSet make_probes(const ConePair& cones, int per_family,
                     const NumericPolicy& policy) {
    ProbeSet ps;
    const size_t dim = static_cast<size_t>(cones.dim);

    std::vector<double> centerK(dim, 0.0);
    centerK[0] = 1.0;  // (1, 0) is interior to cl K for every market
    std::vector<double> centerL(dim, 0.0);
    for (const auto& ray : cones.L_rays)
        for (size_t i = 0; i < dim; ++i) centerL[i] += ray[i] / cones.L_rays.size();

    auto fill_interior = [&](const std::vector<std::vector<double>>& rays,
                             const std::vector<double>& center, ConeRegion region,
                             std::vector<std::vector<double>>& out) {
        const double scales[] = {0.5, 1.0, 2.0, 4.0};
        const double thetas[] = {0.25, 0.5, 0.75};
        for (double s : scales) {
            if (static_cast<int>(out.size()) >= per_family) break;
            out.push_back(scaled(center, s));
        }
        for (double th : thetas)
            for (const auto& ray : rays)
                for (double s : scales) {
                    if (static_cast<int>(out.size()) >= per_family) return;
                    auto z = scaled(blend(ray, center, th), s);
                    if (in_cone(cones, z, region, policy)) out.push_back(z);
                }
    };
    fill_interior(cones.K_rays, centerK, ConeRegion::K, ps.K_interior);
    fill_interior(cones.L_rays, centerL, ConeRegion::L, ps.L_interior);

    auto fill_boundary = [&](const std::vector<std::vector<double>>& cands,
                             std::function<double(const std::vector<double>&)> margin,
                             std::vector<std::vector<double>>& out) {
        std::vector<double> zero(dim, 0.0);
        out.push_back(zero);
        for (const auto& z : cands) {
            if (static_cast<int>(out.size()) >= per_family) break;
            double scale = 0.0;
            for (double c : z) scale = std::max(scale, std::abs(c));
            if (std::abs(margin(z)) <= policy.cone_tol * (1.0 + scale))
                out.push_back(z);
        }
    };
    std::vector<std::vector<double>> k_cands = cones.K_rays;
    for (const auto& lin : cones.lineality) {
        k_cands.push_back(lin);
        k_cands.push_back(scaled(lin, -1.0));
        if (!cones.K_rays.empty()) k_cands.push_back(blend(cones.K_rays[0], lin, 0.5));
    }
    fill_boundary(k_cands, [&](const std::vector<double>& z) { return clK_margin(cones, z); },
                  ps.K_boundary);
    fill_boundary(cones.L_rays,
                  [&](const std::vector<double>& z) { return clL_margin(cones, z); },
                  ps.L_boundary);
    return ps;
}

std::vector<double> weak_duality_residuals(
    const MarketScenario& scenario, const MeasurePolytope& polytope,
    const ConePair& cones, const UtilityField& field,
    const std::vector<ProbePair>& pairs, const NumericPolicy& policy,
    bool parallel) {
    std::vector<double> res(pairs.size(), -kInf);
    auto body = [&](int i) {
        const auto& pr = pairs[static_cast<size_t>(i)];
        double u = u_eval(scenario, polytope, field, pr.zK, policy);
        if (u == -kInf) return;
        double v = v_eval(scenario, polytope, cones, field, pr.zL, policy);
        if (v == kInf) return;
        if (std::isnan(u) || std::isnan(v)) {
            res[static_cast<size_t>(i)] = kInf;  // solver failure, flag loudly
            return;
        }
        res[static_cast<size_t>(i)] = u - v - dot(pr.zK, pr.zL);
    };
    const int n = static_cast<int>(pairs.size());
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) body(i);
        return res;
    }
#endif
    (void)parallel;
    for (int i = 0; i < n; ++i) body(i);
    return res;
}

CheckRecord verify_weak_duality(const MarketScenario& scenario,
                                const MeasurePolytope& polytope,
                                const ConePair& cones, const UtilityField& field,
                                const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "weak-duality";
    rec.statement = "u(x,q) <= v(y,r) + x*y + q.r on cl K x cl L";
    rec.tolerance = 1e-7;

    ProbeSet ps = make_probes(cones, policy.grid_density, policy);
    std::vector<ProbePair> pairs;
    for (const auto& zK : ps.K_interior)
        for (const auto& zL : ps.L_interior) pairs.push_back({zK, zL});
    auto res = weak_duality_residuals(scenario, polytope, cones, field, pairs,
                                      policy, policy.parallel);
    rec.probes = static_cast<int>(pairs.size());
    rec.worst_residual = 0.0;
    for (double r : res)
        if (r > -kInf) rec.worst_residual = std::max(rec.worst_residual, r);
    rec.pass = rec.worst_residual <= rec.tolerance;
    return rec;
}

CheckRecord verify_biconjugacy(const MarketScenario& scenario,
                               const MeasurePolytope& polytope,
                               const ConePair& cones, const UtilityField& field,
                               const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "biconjugacy";
    rec.statement =
        "u(x,q) = min over cl L of (v(y,r) + x*y + q.r); "
        "v(y,r) = max over cl K of (u(x,q) - x*y - q.r)";
    rec.tolerance = 1e-5;

    ProbeSet ps = make_probes(cones, std::min(policy.grid_density, 8), policy);
    double worst = 0.0;
    int probes = 0;

    for (const auto& zK : ps.K_interior) {
        std::vector<double> q(zK.begin() + 1, zK.end());
        PrimalSolution sol;
        try {
            sol = solve_primal(scenario, polytope, field, zK[0], q, policy);
        } catch (const ConvergenceError&) {
            worst = std::max(worst, kInf);
            continue;
        }
        if (sol.status != SolveStatus::Optimal) continue;
        std::vector<double> yr;
        yr.push_back(sol.subgrad_y);
        yr.insert(yr.end(), sol.subgrad_r.begin(), sol.subgrad_r.end());
        auto objective = [&](const std::vector<double>& p) {
            double v = v_eval(scenario, polytope, cones, field, p, policy);
            return std::isnan(v) ? kInf : v + dot(zK, p);
        };
        double norm = 0.0;
        for (double c : yr) norm = std::max(norm, std::abs(c));
        double best = compass_min(yr, 0.25 * (1.0 + norm), objective);
        worst = std::max(worst, std::abs(best - sol.value) / (1.0 + std::abs(sol.value)));
        ++probes;
    }

    for (const auto& zL : ps.L_interior) {
        double v = v_eval(scenario, polytope, cones, field, zL, policy);
        if (!(std::abs(v) < kInf)) continue;
        auto objective = [&](const std::vector<double>& p) {
            double u = u_eval(scenario, polytope, field, p, policy);
            if (std::isnan(u) || u == -kInf) return kInf;
            return -(u - dot(p, zL));
        };
        double best = kInf;
        std::vector<std::vector<double>> starts;
        {
            std::vector<double> e(zL.size(), 0.0);
            e[0] = 1.0;
            starts.push_back(e);
        }
        for (size_t i = 0; i < ps.K_interior.size() && i < 3; ++i)
            starts.push_back(ps.K_interior[i]);
        for (const auto& s : starts) {
            double norm = 0.0;
            for (double c : s) norm = std::max(norm, std::abs(c));
            best = std::min(best, compass_min(s, 0.25 * (1.0 + norm), objective));
        }
        worst = std::max(worst, std::abs(-best - v) / (1.0 + std::abs(v)));
        ++probes;
    }

    rec.probes = probes;
    rec.worst_residual = worst;
    rec.pass = worst <= rec.tolerance;
    return rec;
}

CheckRecord verify_foc(const MarketScenario& scenario,
                       const MeasurePolytope& polytope, const ConePair& cones,
                       const UtilityField& field, double x,
                       const std::vector<double>& q,
                       const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "first-order-conditions";
    rec.statement =
        "Y = U'(c) on the clock support; E[int Y c dkappa] = x*y + q.r; "
        "|v(y,r)| < inf; (y,r) supports u from above at (x,q)";
    rec.tolerance = 1e-7;

    PrimalSolution primal;
    try {
        primal = solve_primal(scenario, polytope, field, x, q, policy);
    } catch (const std::runtime_error& e) {
        rec.note = std::string("skipped: ") + e.what();
        rec.pass = true;
        return rec;
    }
    if (primal.status != SolveStatus::Optimal) {
        rec.note = std::string("skipped: primal status ") + to_string(primal.status);
        rec.pass = true;
        return rec;
    }

    const double y = primal.subgrad_y;
    const std::vector<double>& r = primal.subgrad_r;
    DualSolution dual;
    try {
        dual = solve_dual(scenario, polytope, cones, field, y, r, policy);
    } catch (const std::runtime_error& e) {
        rec.note = std::string("dual solve failed: ") + e.what();
        rec.pass = false;
        rec.worst_residual = kInf;
        return rec;
    }

    // (a) deflator equals the marginal at the optimal consumption
    double res_marginal = 0.0;
    for (int n = 0; n < scenario.tree.size(); ++n) {
        if (clock_weight(scenario, n) <= 0.0) continue;
        double c = primal.consumption[n];
        if (!(c > 0.0)) continue;
        double up = marginal(field, n, c);
        res_marginal = std::max(res_marginal,
                                std::abs(dual.deflator[n] - up) / (1.0 + std::abs(up)));
    }

    // (b) budget equality
    double spend = 0.0;
    for (int n = 0; n < scenario.tree.size(); ++n)
        spend += clock_weight(scenario, n) * dual.deflator[n] * primal.consumption[n];
    double rhs = x * y + dot(q, r);
    double res_budget = std::abs(spend - rhs) / (1.0 + std::abs(rhs));

    // (c) finite dual value, and the equality case of weak duality
    bool v_finite = std::abs(dual.value) < kInf;
    double res_equality =
        std::abs(primal.value - dual.value - rhs) / (1.0 + std::abs(primal.value));

    // (d) probe-star supergradient inequality
    std::vector<double> zK;
    zK.push_back(x);
    zK.insert(zK.end(), q.begin(), q.end());
    double norm = 0.0;
    for (double c : zK) norm = std::max(norm, std::abs(c));
    std::vector<double> yr;
    yr.push_back(y);
    yr.insert(yr.end(), r.begin(), r.end());
    double res_star = 0.0;
    int star = 0;
    for (size_t i = 0; i < zK.size(); ++i)
        for (double sign : {1.0, -1.0})
            for (double rad : {0.5, 0.1, 0.02}) {
                std::vector<double> zp = zK;
                zp[i] += sign * rad * (1.0 + norm);
                double up = u_eval(scenario, polytope, field, zp, policy);
                if (up == -kInf || std::isnan(up)) continue;
                double bound = primal.value + dot(yr, zp) - dot(yr, zK);
                res_star = std::max(res_star, (up - bound) / (1.0 + std::abs(bound)));
                ++star;
            }

    rec.probes = star;
    rec.worst_residual =
        std::max({res_marginal, res_budget, res_equality, res_star});
    rec.pass = res_marginal <= 1e-7 && res_budget <= 1e-8 && v_finite &&
               res_star <= 1e-7 && res_equality <= 1e-7;
    std::ostringstream os;
    os << "marginal " << res_marginal << ", budget " << res_budget
       << ", equality " << res_equality << ", star " << res_star
       << (v_finite ? "" : ", v infinite");
    rec.note = os.str();
    return rec;
}

CheckRecord verify_semicontinuity(const MarketScenario& scenario,
                                  const MeasurePolytope& polytope,
                                  const ConePair& cones,
                                  const UtilityField& field,
                                  const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "semicontinuity";
    rec.statement =
        "limsup u <= u at boundary points of cl K; liminf v >= v at boundary "
        "points of cl L (extended values allowed)";
    rec.tolerance = 1e-6;

    ProbeSet ps = make_probes(cones, 8, policy);
    double worst = 0.0;
    int probes = 0;

    auto run_side = [&](const std::vector<std::vector<double>>& boundary,
                        const std::vector<std::vector<double>>& anchors,
                        const std::function<double(const std::vector<double>&)>& eval,
                        bool upper) {
        for (const auto& zb : boundary) {
            double fb = eval(zb);
            if (std::isnan(fb)) continue;
            for (const auto& za : anchors) {
                std::vector<double> vals;
                bool bad = false;
                for (int k = 4; k <= 12; ++k) {
                    double eps = std::pow(4.0, -k);
                    double f = eval(blend(zb, za, eps));
                    if (std::isnan(f)) { bad = true; break; }
                    vals.push_back(f);
                }
                if (bad || vals.empty()) continue;
                ++probes;
                double res;
                if (upper ? fb == -kInf : fb == kInf) {
                    bool div = upper ? diverges_down(vals) : diverges_up(vals);
                    res = div ? 0.0 : 1.0;
                } else if (!std::isfinite(vals.back())) {
                    res = 1.0;
                } else {
                    double limit = extrapolate_limit(vals);
                    double gap = upper ? limit - fb : fb - limit;
                    res = std::max(0.0, gap) / (1.0 + std::abs(fb));
                }
                worst = std::max(worst, res);
            }
        }
    };

    run_side(ps.K_boundary, ps.K_interior,
             [&](const std::vector<double>& z) {
                 return u_eval(scenario, polytope, field, z, policy);
             },
             true);
    run_side(ps.L_boundary, ps.L_interior,
             [&](const std::vector<double>& z) {
                 return v_eval(scenario, polytope, cones, field, z, policy);
             },
             false);

    rec.probes = probes;
    rec.worst_residual = worst;
    rec.pass = worst <= rec.tolerance;
    return rec;
}

CheckRecord verify_geometry(const MarketScenario& scenario,
                            const MeasurePolytope& polytope,
                            const ConePair& cones, int samples,
                            const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "cone-geometry";
    rec.statement =
        "g.h >= 0 for generators g of cl K and h of cl L; (x,q) in cl K iff "
        "x >= superreplication price of -q.F";
    rec.tolerance = policy.cone_tol;

    double polarity = 0.0;
    std::vector<std::vector<double>> k_gens = cones.K_rays;
    for (const auto& lin : cones.lineality) {
        k_gens.push_back(lin);
        k_gens.push_back(scaled(lin, -1.0));
    }
    for (const auto& g : k_gens)
        for (const auto& h : cones.L_rays)
            polarity = std::max(polarity, -dot(g, h));
    for (const auto& h : cones.L_rays)
        polarity = std::max(polarity, -clL_margin(cones, h));

    const int N = scenario.n_claims;
    const auto& leaves = scenario.tree.leaves();
    Rng rng(policy.seed);
    int disagreements = 0;
    int tested = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<double> q(static_cast<size_t>(N));
        for (int i = 0; i < N; ++i) q[static_cast<size_t>(i)] = rng.uniform(-2.0, 2.0);
        std::vector<double> claim(leaves.size());
        for (size_t l = 0; l < leaves.size(); ++l) {
            double h = 0.0;
            for (int i = 0; i < N; ++i)
                h -= q[static_cast<size_t>(i)] * scenario.payoffs[l][static_cast<size_t>(i)];
            claim[l] = h;
        }
        double price = superreplication_price(scenario, polytope, claim);
        double x = price + rng.uniform(-1.0, 1.0);
        std::vector<double> z;
        z.push_back(x);
        z.insert(z.end(), q.begin(), q.end());
        double margin = clK_margin(cones, z);
        double gap = x - price;
        if (std::abs(gap) <= 1e-9 || std::abs(margin) <= 1e-9) continue;
        ++tested;
        if ((margin > 0.0) != (gap > 0.0)) ++disagreements;
    }

    rec.probes = tested;
    rec.worst_residual = std::max(polarity, disagreements > 0 ? 1.0 : 0.0);
    rec.pass = polarity <= policy.cone_tol && disagreements == 0 &&
               polytope.has_equivalent;
    if (!polytope.has_equivalent)
        rec.note = "no equivalent martingale measure";
    else if (disagreements > 0) {
        std::ostringstream os;
        os << disagreements << " membership/superreplication disagreements";
        rec.note = os.str();
    }
    return rec;
}

FinitenessReport check_finiteness(const MarketScenario& scenario,
                                  const MeasurePolytope& polytope,
                                  const ConePair& cones, const UtilityField& field,
                                  const NumericPolicy& policy) {
    FinitenessReport rep;
    ProbeSet ps = make_probes(cones, 6, policy);
    const double grid[] = {0.25, 0.5, 1.0, 2.0, 4.0};

    for (double x : grid) {
        double w = kNaN;
        try {
            w = value_w(scenario, polytope, field, x, policy);
        } catch (const std::runtime_error&) {}
        if (!std::isfinite(w)) rep.w_all_finite = false;
        double wt = kNaN;
        try {
            wt = value_wtilde(scenario, polytope, field, x, policy);
        } catch (const std::runtime_error&) {}
        if (!std::isfinite(wt)) rep.wtilde_all_finite = false;
    }
    for (const auto& zK : ps.K_interior)
        if (!std::isfinite(u_eval(scenario, polytope, field, zK, policy)))
            rep.u_all_finite = false;
    for (const auto& zL : ps.L_interior)
        if (!std::isfinite(v_eval(scenario, polytope, cones, field, zL, policy)))
            rep.v_all_finite = false;

    rep.equivalence_holds = (rep.w_all_finite && rep.wtilde_all_finite) ==
                            (rep.u_all_finite && rep.v_all_finite);
    if (!rep.equivalence_holds) {
        std::ostringstream os;
        os << "w finite=" << rep.w_all_finite << " wtilde finite=" << rep.wtilde_all_finite
           << " but u finite=" << rep.u_all_finite << " v finite=" << rep.v_all_finite;
        rep.counterexample = os.str();
    }
    return rep;
}

CheckRecord verify_finiteness(const MarketScenario& scenario,
                              const MeasurePolytope& polytope,
                              const ConePair& cones, const UtilityField& field,
                              const NumericPolicy& policy) {
    CheckRecord rec;
    rec.name = "finiteness-equivalence";
    rec.statement =
        "w, wtilde finite on the positive axis iff u finite on K and v finite on L";
    rec.tolerance = 0.5;
    FinitenessReport rep = check_finiteness(scenario, polytope, cones, field, policy);
    rec.probes = 10;
    rec.worst_residual = rep.equivalence_holds ? 0.0 : 1.0;
    rec.pass = rep.equivalence_holds;
    rec.note = rep.counterexample;
    return rec;
}

VerificationReport run_verification(const MarketScenario& scenario,
                                    const MeasurePolytope& polytope,
                                    const ConePair& cones,
                                    const UtilityField& field,
                                    const NumericPolicy& policy) {
    VerificationReport report;
    report.checks.push_back(verify_geometry(scenario, polytope, cones, 500, policy));
    report.checks.push_back(
        verify_weak_duality(scenario, polytope, cones, field, policy));
    report.checks.push_back(
        verify_biconjugacy(scenario, polytope, cones, field, policy));
    ProbeSet ps = make_probes(cones, 3, policy);
    for (const auto& zK : ps.K_interior) {
        std::vector<double> q(zK.begin() + 1, zK.end());
        report.checks.push_back(
            verify_foc(scenario, polytope, cones, field, zK[0], q, policy));
    }
    report.checks.push_back(
        verify_semicontinuity(scenario, polytope, cones, field, policy));
    report.checks.push_back(
        verify_finiteness(scenario, polytope, cones, field, policy));
    return report;
}

}  // namespace treedual
