#include "treedual/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "treedual/errors.hpp"
#include "treedual/lp.hpp"
#include "treedual/rng.hpp"
#include "treedual/utility.hpp"

namespace treedual {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
void for_each_combination(int n, int k, F f) {
    if (k > n) return;
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

// Vertices of { c >= 0 : B c <= beta }.  A vertex has at most J positive
// coordinates (the active set must contain Nn - J nonnegativity rows), so
// we enumerate supports of size k <= J against k active budget rows.
std::vector<Eigen::VectorXd> poly_vertices(const Eigen::MatrixXd& B,
                                           const Eigen::VectorXd& beta) {
    const int J = static_cast<int>(B.rows());
    const int Nn = static_cast<int>(B.cols());
    const double tol = 1e-8 * (1.0 + beta.cwiseAbs().maxCoeff());
    std::vector<Eigen::VectorXd> out;
    std::set<std::vector<long long>> seen;

    auto push = [&](const Eigen::VectorXd& c) {
        if ((c.array() < -tol).any()) return;
        if (((B * c - beta).array() > tol).any()) return;
        std::vector<long long> key(static_cast<size_t>(Nn));
        for (int n = 0; n < Nn; ++n)
            key[static_cast<size_t>(n)] = llround(c(n) * 1e9);
        if (seen.insert(key).second) out.push_back(c.cwiseMax(0.0));
    };

    push(Eigen::VectorXd::Zero(Nn));
    for (int k = 1; k <= std::min(J, Nn); ++k) {
        for_each_combination(Nn, k, [&](const std::vector<int>& S) {
            for_each_combination(J, k, [&](const std::vector<int>& T) {
                Eigen::MatrixXd M(k, k);
                Eigen::VectorXd rhs(k);
                for (int a = 0; a < k; ++a) {
                    rhs(a) = beta(T[static_cast<size_t>(a)]);
                    for (int b = 0; b < k; ++b)
                        M(a, b) = B(T[static_cast<size_t>(a)], S[static_cast<size_t>(b)]);
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
                if (lu.rank() < k) return;
                Eigen::VectorXd cs = lu.solve(rhs);
                Eigen::VectorXd c = Eigen::VectorXd::Zero(Nn);
                for (int b = 0; b < k; ++b) c(S[static_cast<size_t>(b)]) = cs(b);
                push(c);
            });
        });
    }
    return out;
}

// Budget matrix over the clock support: B(j, n) = w_n Z_j(n).
Eigen::MatrixXd budget_matrix(const MarketScenario& scenario,
                              const MeasurePolytope& polytope,
                              const std::vector<int>& support) {
    Eigen::MatrixXd B(polytope.count(), support.size());
    for (int j = 0; j < polytope.count(); ++j)
        for (size_t s = 0; s < support.size(); ++s)
            B(j, static_cast<Eigen::Index>(s)) =
                clock_weight(scenario, support[s]) * polytope.densities[j][support[s]];
    return B;
}

Eigen::VectorXd budget_vector(const MeasurePolytope& polytope, double x,
                              const std::vector<double>& q) {
    Eigen::VectorXd beta(polytope.count());
    for (int j = 0; j < polytope.count(); ++j) {
        double b = x;
        for (size_t i = 0; i < q.size(); ++i)
            b += q[i] * polytope.claim_expectations[j][i];
        beta(j) = b;
    }
    return beta;
}

// Dykstra's alternating projection onto { x >= 0, A x <= b }.
Eigen::VectorXd project_polyhedron(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& b,
                                   Eigen::VectorXd x) {
    const int m = static_cast<int>(A.rows());
    std::vector<Eigen::VectorXd> inc(static_cast<size_t>(m + 1),
                                     Eigen::VectorXd::Zero(x.size()));
    Eigen::VectorXd row_sq(m);
    for (int i = 0; i < m; ++i) row_sq(i) = A.row(i).squaredNorm();
    for (int cycle = 0; cycle < 400; ++cycle) {
        double moved = 0.0;
        for (int i = 0; i <= m; ++i) {
            Eigen::VectorXd z = x + inc[static_cast<size_t>(i)];
            Eigen::VectorXd px;
            if (i == m) {
                px = z.cwiseMax(0.0);
            } else if (row_sq(i) > 1e-30) {
                double viol = A.row(i).dot(z) - b(i);
                px = viol > 0.0 ? (z - (viol / row_sq(i)) * A.row(i).transpose()).eval() : z;
            } else {
                px = z;
            }
            inc[static_cast<size_t>(i)] = z - px;
            moved = std::max(moved, (px - x).cwiseAbs().maxCoeff());
            x = px;
        }
        double worst = (-x.minCoeff());
        if (m > 0) worst = std::max(worst, (A * x - b).maxCoeff());
        if (worst <= 1e-12 && moved <= 1e-13) break;
    }
    return x;
}

}  // namespace

std::vector<int> clock_support_nodes(const MarketScenario& scenario) {
    std::vector<int> support;
    for (int n = 0; n < scenario.tree.size(); ++n)
        if (clock_weight(scenario, n) > 0.0) support.push_back(n);
    return support;
}

std::vector<std::vector<double>> consumption_polytope_vertices(
    const MarketScenario& scenario, const MeasurePolytope& polytope, double x,
    const std::vector<double>& q) {
    auto support = clock_support_nodes(scenario);
    Eigen::MatrixXd B = budget_matrix(scenario, polytope, support);
    Eigen::VectorXd beta = budget_vector(polytope, x, q);
    auto verts = poly_vertices(B, beta);
    std::vector<std::vector<double>> out;
    out.reserve(verts.size());
    for (const auto& v : verts)
        out.emplace_back(v.data(), v.data() + v.size());
    return out;
}

double brute_force_primal(const MarketScenario& scenario,
                          const MeasurePolytope& polytope,
                          const UtilityField& field, double x,
                          const std::vector<double>& q, int restarts) {
    auto support = clock_support_nodes(scenario);
    const int Nn = static_cast<int>(support.size());
    Eigen::MatrixXd B = budget_matrix(scenario, polytope, support);
    Eigen::VectorXd beta = budget_vector(polytope, x, q);
    if ((beta.array() < -1e-12).any()) return -kInf;
    std::vector<double> w(support.size());
    for (size_t s = 0; s < support.size(); ++s)
        w[s] = clock_weight(scenario, support[s]);

    auto value = [&](const Eigen::VectorXd& c) {
        double v = 0.0;
        for (int n = 0; n < Nn; ++n) {
            double u = eval_U(field, support[static_cast<size_t>(n)], std::max(c(n), 0.0));
            if (u == -kInf) return -kInf;
            v += w[static_cast<size_t>(n)] * u;
        }
        return v;
    };

    // scale a positive direction into the feasible region
    auto feasible_from = [&](Eigen::VectorXd dir) -> Eigen::VectorXd {
        dir = dir.cwiseMax(1e-6);
        double s = kInf;
        Eigen::VectorXd spend = B * dir;
        for (int j = 0; j < spend.size(); ++j)
            if (spend(j) > 1e-300) s = std::min(s, beta(j) / spend(j));
        if (!(s < kInf)) s = 1.0;
        return 0.9 * s * dir;
    };

    double best = -kInf;
    Rng rng(12345);
    for (int trial = 0; trial <= restarts; ++trial) {
        Eigen::VectorXd dir = Eigen::VectorXd::Ones(Nn);
        if (trial > 0)
            for (int n = 0; n < Nn; ++n) dir(n) = 0.1 + rng.uniform();
        Eigen::VectorXd c = feasible_from(dir);
        double f = value(c);
        if (f == -kInf) continue;
        double step = 0.25 * (1.0 + c.maxCoeff());
        for (int it = 0; it < 4000; ++it) {
            Eigen::VectorXd g(Nn);
            for (int n = 0; n < Nn; ++n)
                g(n) = w[static_cast<size_t>(n)] *
                       marginal(field, support[static_cast<size_t>(n)],
                                std::max(c(n), 1e-12));
            double gn = g.norm();
            if (gn < 1e-300) break;
            Eigen::VectorXd cand =
                project_polyhedron(B, beta, c + (step / gn) * g);
            double fc = value(cand);
            if (fc > f + 1e-15 * (1.0 + std::abs(f))) {
                c = cand;
                f = fc;
                step *= 1.25;
            } else {
                step *= 0.5;
                if (step < 1e-12 * (1.0 + c.maxCoeff())) break;
            }
        }
        best = std::max(best, f);
    }
    return best;
}

double DeflatorTestSet::bound(size_t i, double y,
                              const std::vector<double>& r) const {
    double b = bounds_unit_y[i] * y;
    for (size_t k = 0; k < r.size(); ++k) b += bounds_r[i][k] * r[k];
    return b;
}

DeflatorTestSet build_deflator_test_set(const MarketScenario& scenario,
                                        const MeasurePolytope& polytope,
                                        const ConePair& cones) {
    DeflatorTestSet ts;
    ts.support = clock_support_nodes(scenario);
    Eigen::MatrixXd B = budget_matrix(scenario, polytope, ts.support);

    // Membership is E[int Y c dkappa] <= y z_0 + r.z' over the joint cone
    // { (c, z) : c >= 0, spend_j(c) <= budget_j(z) for all j }.  The
    // condition is linear in (c, z), so it suffices to test the vertices of
    // the cone's simplex slice.  z is split into positive and negative
    // parts to keep every variable nonnegative.
    const int Nn = static_cast<int>(ts.support.size());
    const int J = polytope.count();
    const int nz = cones.dim;
    const int dim = Nn + 2 * nz;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J + 2, dim);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(J + 2);
    for (int j = 0; j < J; ++j) {
        M.block(j, 0, 1, Nn) = B.row(j);
        M(j, Nn) = -1.0;
        M(j, Nn + nz) = 1.0;
        for (int i = 0; i + 1 < nz; ++i) {
            M(j, Nn + 1 + i) = -polytope.claim_expectations[j][static_cast<size_t>(i)];
            M(j, Nn + nz + 1 + i) = polytope.claim_expectations[j][static_cast<size_t>(i)];
        }
    }
    M.row(J).setOnes();
    beta(J) = 1.0;
    M.row(J + 1).setConstant(-1.0);
    beta(J + 1) = -1.0;

    std::set<std::vector<long long>> seen;
    for (const auto& v : poly_vertices(M, beta)) {
        std::vector<double> row(ts.support.size());
        std::vector<double> z(static_cast<size_t>(nz));
        std::vector<long long> key;
        key.reserve(row.size() + z.size());
        for (size_t s = 0; s < ts.support.size(); ++s) {
            row[s] = clock_weight(scenario, ts.support[s]) *
                     v(static_cast<Eigen::Index>(s));
            key.push_back(llround(row[s] * 1e10));
        }
        for (int i = 0; i < nz; ++i) {
            z[static_cast<size_t>(i)] = v(Nn + i) - v(Nn + nz + i);
            key.push_back(llround(z[static_cast<size_t>(i)] * 1e10));
        }
        if (!seen.insert(key).second) continue;
        ts.rows.push_back(row);
        ts.bounds_unit_y.push_back(z[0]);
        ts.bounds_r.emplace_back(z.begin() + 1, z.end());
    }
    return ts;
}

double deflator_membership_violation(const DeflatorTestSet& ts,
                                     const OptionalProcess& Y, double y,
                                     const std::vector<double>& r) {
    double worst = 0.0;
    for (int n : ts.support) worst = std::max(worst, -Y[n]);
    for (size_t i = 0; i < ts.rows.size(); ++i) {
        double lhs = 0.0;
        for (size_t s = 0; s < ts.support.size(); ++s)
            lhs += ts.rows[i][s] * Y[ts.support[s]];
        worst = std::max(worst, lhs - ts.bound(i, y, r));
    }
    return worst;
}

double brute_force_dual(const MarketScenario& scenario,
                        const MeasurePolytope& polytope, const ConePair& cones,
                        const UtilityField& field, double y,
                        const std::vector<double>& r, int restarts) {
    DeflatorTestSet ts = build_deflator_test_set(scenario, polytope, cones);
    const auto& support = ts.support;

    // rows with a zero right-hand side pin the touched coordinates to zero
    std::vector<bool> pinned(support.size(), false);
    for (size_t i = 0; i < ts.rows.size(); ++i) {
        if (ts.bound(i, y, r) > 1e-13) continue;
        for (size_t s = 0; s < support.size(); ++s)
            if (ts.rows[i][s] > 1e-14) pinned[s] = true;
    }
    double base = 0.0;
    std::vector<int> free;  // indices into support
    for (size_t s = 0; s < support.size(); ++s) {
        if (pinned[s]) {
            double v0 = eval_V(field, support[s], 0.0);
            if (v0 == kInf) return kInf;
            base += clock_weight(scenario, support[s]) * v0;
        } else {
            free.push_back(static_cast<int>(s));
        }
    }
    const int Nf = static_cast<int>(free.size());
    if (Nf == 0) return base;

    // assemble the free-coordinate polyhedron A Yf <= b
    std::vector<Eigen::VectorXd> arows;
    std::vector<double> bvals;
    for (size_t i = 0; i < ts.rows.size(); ++i) {
        Eigen::VectorXd a(Nf);
        for (int k = 0; k < Nf; ++k)
            a(k) = ts.rows[i][static_cast<size_t>(free[static_cast<size_t>(k)])];
        if (a.cwiseAbs().maxCoeff() < 1e-16) continue;
        arows.push_back(a);
        bvals.push_back(ts.bound(i, y, r));
    }
    Eigen::MatrixXd A(arows.size(), Nf);
    Eigen::VectorXd b(arows.size());
    for (size_t i = 0; i < arows.size(); ++i) {
        A.row(static_cast<Eigen::Index>(i)) = arows[i];
        b(static_cast<Eigen::Index>(i)) = bvals[i];
    }

    std::vector<double> wf(static_cast<size_t>(Nf));
    for (int k = 0; k < Nf; ++k)
        wf[static_cast<size_t>(k)] =
            clock_weight(scenario, support[static_cast<size_t>(free[static_cast<size_t>(k)])]);
    auto node_of = [&](int k) { return support[static_cast<size_t>(free[static_cast<size_t>(k)])]; };

    auto value = [&](const Eigen::VectorXd& Yf) {
        double v = base;
        for (int k = 0; k < Nf; ++k) {
            double vk = eval_V(field, node_of(k), std::max(Yf(k), 0.0));
            if (vk == kInf) return kInf;
            v += wf[static_cast<size_t>(k)] * vk;
        }
        return v;
    };

    auto feasible_from = [&](Eigen::VectorXd dir) -> Eigen::VectorXd {
        dir = dir.cwiseMax(1e-6);
        double s = kInf;
        if (A.rows() > 0) {
            Eigen::VectorXd lhs = A * dir;
            for (int i = 0; i < lhs.size(); ++i)
                if (lhs(i) > 1e-300) s = std::min(s, b(i) / lhs(i));
        }
        if (!(s < kInf)) s = 1.0;
        return 0.9 * s * dir;
    };

    double best = kInf;
    Rng rng(54321);
    for (int trial = 0; trial <= restarts; ++trial) {
        Eigen::VectorXd dir = Eigen::VectorXd::Ones(Nf);
        if (trial > 0)
            for (int k = 0; k < Nf; ++k) dir(k) = 0.1 + rng.uniform();
        Eigen::VectorXd Yf = feasible_from(dir);
        double f = value(Yf);
        if (f == kInf) continue;
        double step = 0.25 * (1.0 + Yf.maxCoeff());
        for (int it = 0; it < 4000; ++it) {
            Eigen::VectorXd g(Nf);
            for (int k = 0; k < Nf; ++k)
                g(k) = -wf[static_cast<size_t>(k)] *
                       marginal_inverse(field, node_of(k), std::max(Yf(k), 1e-12));
            double gn = g.norm();
            if (gn < 1e-300) break;
            Eigen::VectorXd cand = project_polyhedron(A, b, Yf - (step / gn) * g);
            double fc = value(cand);
            if (fc < f - 1e-15 * (1.0 + std::abs(f))) {
                Yf = cand;
                f = fc;
                step *= 1.25;
            } else {
                step *= 0.5;
                if (step < 1e-12 * (1.0 + Yf.maxCoeff())) break;
            }
        }
        best = std::min(best, f);
    }
    return best;
}

double max_over_measures(const MarketScenario& scenario,
                         const std::vector<double>& leaf_objective) {
    const auto& tree = scenario.tree;
    const auto& leaves = tree.leaves();
    const size_t L = leaves.size();

    // ancestor of each leaf at every depth, for the one-step rows
    auto ancestor_at = [&](int leaf, int time) {
        int n = leaf;
        while (tree.node(n).time > time) n = tree.node(n).parent;
        return n;
    };

    std::vector<std::vector<double>> A;
    std::vector<double> b;
    A.emplace_back(L, 1.0);  // total mass one
    b.push_back(1.0);
    for (int n = 0; n < tree.size(); ++n) {
        if (tree.node(n).is_leaf()) continue;
        for (int a = 0; a < scenario.n_assets; ++a) {
            std::vector<double> row(L, 0.0);
            bool nonzero = false;
            for (size_t l = 0; l < L; ++l) {
                if (ancestor_at(leaves[l], tree.node(n).time) != n) continue;
                int child = ancestor_at(leaves[l], tree.node(n).time + 1);
                row[l] = scenario.prices[static_cast<size_t>(child)][static_cast<size_t>(a)] -
                         scenario.prices[static_cast<size_t>(n)][static_cast<size_t>(a)];
                if (row[l] != 0.0) nonzero = true;
            }
            if (nonzero) {
                A.push_back(row);
                b.push_back(0.0);
            }
        }
    }
    std::vector<double> cost(L);
    for (size_t l = 0; l < L; ++l) cost[l] = -leaf_objective[l];
    LpResult res = solve_lp(A, b, cost);
    if (res.status != LpStatus::Optimal)
        throw ArbitrageError("martingale polytope is empty");
    return -res.value;
}

double consumption_violation_lp(const MarketScenario& scenario,
                                const OptionalProcess& consumption, double x,
                                const std::vector<double>& q) {
    const auto& tree = scenario.tree;
    const auto& leaves = tree.leaves();
    std::vector<double> objective(leaves.size(), 0.0);
    for (size_t l = 0; l < leaves.size(); ++l) {
        for (int n = leaves[l]; n >= 0; n = tree.node(n).parent)
            objective[l] +=
                scenario.clock.increments[static_cast<size_t>(n)] * consumption[n];
        for (size_t i = 0; i < q.size(); ++i)
            objective[l] -= q[i] * scenario.payoffs[l][i];
    }
    return max_over_measures(scenario, objective) - x;
}

}  // namespace treedual
