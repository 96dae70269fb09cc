#include "treedual/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "treedual/errors.hpp"
#include "treedual/lp.hpp"

namespace treedual {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CapRow {
    std::vector<double> a;  // per vertex, nonnegative
    double b = 0.0;
};

// Minimizes sum_n w_n V(n, sum_j lambda_j Z^j(n)) over lambda >= 0 subject
// to the cap rows a_k . lambda <= b_k.  Log-barrier path following; the
// barrier keeps iterates strictly interior, which also keeps the deflator
// positive wherever that is possible.
struct CapResult {
    std::vector<double> lambda;
    double value = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
};

CapResult minimize_over_caps(const MarketScenario& scenario,
                             const MeasurePolytope& polytope,
                             const UtilityField& field,
                             std::vector<CapRow> rows,
                             const NumericPolicy& policy) {
    const int J = polytope.count();
    CapResult out;
    out.lambda.assign(static_cast<size_t>(J), 0.0);

    // clock support
    std::vector<int> nodes;
    std::vector<double> wn;
    for (int n = 0; n < scenario.tree.size(); ++n) {
        double cw = clock_weight(scenario, n);
        if (cw > 0.0) { nodes.push_back(n); wn.push_back(cw); }
    }

    // Rows with zero budget pin every vertex they touch to lambda = 0.
    std::vector<bool> fixed(static_cast<size_t>(J), false);
    for (const CapRow& row : rows)
        if (row.b <= 1e-14)
            for (int j = 0; j < J; ++j)
                if (row.a[j] > 1e-14) fixed[j] = true;
    std::vector<int> free;
    for (int j = 0; j < J; ++j)
        if (!fixed[j]) free.push_back(j);
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const CapRow& r) { return r.b <= 1e-14; }),
               rows.end());

    // Support nodes not reachable by any free vertex contribute V(n, 0).
    const int Jf = static_cast<int>(free.size());
    std::vector<int> covered;
    std::vector<double> wcov;
    double base = 0.0;
    bool trapped = Jf < J;
    for (size_t s = 0; s < nodes.size(); ++s) {
        bool cov = false;
        for (int a = 0; a < Jf && !cov; ++a)
            cov = polytope.densities[free[a]][nodes[s]] > 1e-14;
        if (cov) {
            covered.push_back(nodes[s]);
            wcov.push_back(wn[s]);
        } else {
            double v0 = eval_V(field, nodes[s], 0.0);
            if (v0 == kInf) {
                out.value = kInf;
                out.status = SolveStatus::ValuePlusInfinity;
                return out;
            }
            base += wn[s] * v0;
        }
    }
    if (Jf == 0 || covered.empty()) {
        out.value = base;
        out.status = trapped ? SolveStatus::BoundaryDegenerate : SolveStatus::Optimal;
        return out;
    }

    const int Nn = static_cast<int>(covered.size());
    Eigen::MatrixXd Z(Jf, Nn);
    for (int a = 0; a < Jf; ++a)
        for (int b = 0; b < Nn; ++b) Z(a, b) = polytope.densities[free[a]][covered[b]];
    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd A(m, Jf);
    Eigen::VectorXd bvec(m);
    for (int k = 0; k < m; ++k) {
        for (int a = 0; a < Jf; ++a) A(k, a) = rows[k].a[free[a]];
        bvec(k) = rows[k].b;
    }

    auto objective = [&](const Eigen::VectorXd& lam) {
        Eigen::VectorXd y = Z.transpose() * lam;
        double f = 0.0;
        for (int b = 0; b < Nn; ++b) {
            if (!(y(b) > 0.0)) return kInf;
            f += wcov[b] * eval_V(field, covered[b], y(b));
        }
        return f;
    };

    // strictly feasible start
    double delta = kInf;
    for (int k = 0; k < m; ++k) {
        double rowsum = A.row(k).sum();
        if (rowsum > 0.0) delta = std::min(delta, 0.5 * bvec(k) / rowsum);
    }
    if (!(delta < kInf)) delta = 1.0;  // no binding caps on the free vertices
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(Jf, delta);

    const int n_con = m + Jf;
    double f = objective(lam);
    double t = std::max(1.0, n_con / std::max(std::abs(f), 1.0));
    int total_it = 0;
    const double target_gap = 1e-10;

    while (true) {
        // inner Newton for the barrier problem at this t
        for (int inner = 0; inner < 80; ++inner) {
            if (++total_it > policy.max_iterations * 40)
                throw ConvergenceError("solve_dual: barrier method iteration cap", f);
            Eigen::VectorXd y = Z.transpose() * lam;
            Eigen::VectorXd gf = Eigen::VectorXd::Zero(Jf);
            Eigen::MatrixXd Hf = Eigen::MatrixXd::Zero(Jf, Jf);
            for (int b = 0; b < Nn; ++b) {
                double vp = -marginal_inverse(field, covered[b], y(b));
                double vpp = conjugate_second_derivative(field, covered[b], y(b));
                for (int a = 0; a < Jf; ++a) {
                    gf(a) += wcov[b] * vp * Z(a, b);
                    for (int c = a; c < Jf; ++c)
                        Hf(a, c) += wcov[b] * vpp * Z(a, b) * Z(c, b);
                }
            }
            Hf = Hf.selfadjointView<Eigen::Upper>();
            Eigen::VectorXd s = bvec - A * lam;
            Eigen::VectorXd g = t * gf;
            Eigen::MatrixXd H = t * Hf;
            for (int k = 0; k < m; ++k) {
                g += A.row(k).transpose() / s(k);
                H += A.row(k).transpose() * A.row(k) / (s(k) * s(k));
            }
            for (int a = 0; a < Jf; ++a) {
                g(a) -= 1.0 / lam(a);
                H(a, a) += 1.0 / (lam(a) * lam(a));
            }
            Eigen::VectorXd d = H.ldlt().solve(-g);
            double decrement = -g.dot(d);
            if (!(decrement > 1e-18)) break;

            // largest feasible step
            double alpha = 1.0;
            for (int a = 0; a < Jf; ++a)
                if (d(a) < 0.0) alpha = std::min(alpha, -0.99 * lam(a) / d(a));
            Eigen::VectorXd Ad = A * d;
            for (int k = 0; k < m; ++k)
                if (Ad(k) > 0.0) alpha = std::min(alpha, 0.99 * s(k) / Ad(k));
            auto barrier = [&](const Eigen::VectorXd& l) {
                double phi = t * objective(l);
                Eigen::VectorXd sl = bvec - A * l;
                for (int k = 0; k < m; ++k) {
                    if (!(sl(k) > 0.0)) return kInf;
                    phi -= std::log(sl(k));
                }
                for (int a = 0; a < Jf; ++a) {
                    if (!(l(a) > 0.0)) return kInf;
                    phi -= std::log(l(a));
                }
                return phi;
            };
            double phi0 = barrier(lam);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::VectorXd cand = lam + alpha * d;
                double phic = barrier(cand);
                if (phic < phi0 - 1e-4 * alpha * decrement) {
                    lam = cand;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            if (decrement < 1e-14) break;
        }
        f = objective(lam);
        if (n_con / t <= target_gap * (1.0 + std::abs(f))) break;
        t *= 20.0;
    }

    out.value = base + f;
    out.status = trapped ? SolveStatus::BoundaryDegenerate : SolveStatus::Optimal;
    out.iterations = total_it;
    for (int a = 0; a < Jf; ++a) out.lambda[free[a]] = lam(a);
    return out;
}

std::vector<int> clock_support(const MarketScenario& scenario) {
    std::vector<int> nodes;
    for (int n = 0; n < scenario.tree.size(); ++n)
        if (clock_weight(scenario, n) > 0.0) nodes.push_back(n);
    return nodes;
}

}  // namespace

bool is_in_Y(const MarketScenario& scenario, const MeasurePolytope& polytope,
             const OptionalProcess& Y, double y, const NumericPolicy& policy) {
    const int J = polytope.count();
    std::vector<std::vector<double>> A_ub{std::vector<double>(static_cast<size_t>(J), 1.0)};
    std::vector<double> b_ub{y};
    std::vector<std::vector<double>> A_lb;
    std::vector<double> b_lb;
    for (int n : clock_support(scenario)) {
        std::vector<double> row(static_cast<size_t>(J));
        for (int j = 0; j < J; ++j) row[j] = polytope.densities[j][n];
        A_lb.push_back(std::move(row));
        b_lb.push_back(Y[n]);
    }
    return lp_feasibility(A_ub, b_ub, A_lb, b_lb, J).violation <= policy.membership_tol;
}

bool is_in_Y_yr(const MarketScenario& scenario, const MeasurePolytope& polytope,
                const ConePair& cones, const OptionalProcess& Y, double y,
                const std::vector<double>& r, const NumericPolicy& policy) {
    std::vector<double> yr;
    yr.push_back(y);
    yr.insert(yr.end(), r.begin(), r.end());
    if (clL_margin(cones, yr) < -policy.cone_tol)
        throw DomainError("is_in_Y_yr: (y,r) outside cl L");

    const int J = polytope.count();
    std::vector<std::vector<double>> A_ub;
    std::vector<double> b_ub;
    for (const auto& k : cones.K_rays) {
        std::vector<double> row(static_cast<size_t>(J));
        for (int j = 0; j < J; ++j) {
            double kg = k[0];
            for (size_t i = 0; i + 1 < k.size(); ++i)
                kg += k[i + 1] * polytope.claim_expectations[j][i];
            row[j] = kg;
        }
        double b = k[0] * y;
        for (size_t i = 0; i + 1 < k.size(); ++i) b += k[i + 1] * r[i];
        A_ub.push_back(std::move(row));
        b_ub.push_back(std::max(b, 0.0));
    }
    std::vector<std::vector<double>> A_lb;
    std::vector<double> b_lb;
    for (int n : clock_support(scenario)) {
        std::vector<double> row(static_cast<size_t>(J));
        for (int j = 0; j < J; ++j) row[j] = polytope.densities[j][n];
        A_lb.push_back(std::move(row));
        b_lb.push_back(Y[n]);
    }
    return lp_feasibility(A_ub, b_ub, A_lb, b_lb, J).violation <= policy.membership_tol;
}

DualSolution solve_dual(const MarketScenario& scenario,
                        const MeasurePolytope& polytope, const ConePair& cones,
                        const UtilityField& field, double y,
                        const std::vector<double>& r, const NumericPolicy& policy) {
    std::vector<double> yr;
    yr.push_back(y);
    yr.insert(yr.end(), r.begin(), r.end());
    if (clL_margin(cones, yr) < -policy.cone_tol)
        throw DomainError("solve_dual: (y,r) outside cl L, v = +inf by convention");

    const int J = polytope.count();
    std::vector<CapRow> rows;
    for (const auto& k : cones.K_rays) {
        CapRow row;
        row.a.resize(static_cast<size_t>(J));
        for (int j = 0; j < J; ++j) {
            double kg = k[0];
            for (size_t i = 0; i + 1 < k.size(); ++i)
                kg += k[i + 1] * polytope.claim_expectations[j][i];
            row.a[j] = std::max(kg, 0.0);  // polarity: k.(1,p_j) >= 0
        }
        double b = k[0] * y;
        for (size_t i = 0; i + 1 < k.size(); ++i) b += k[i + 1] * r[i];
        row.b = std::max(b, 0.0);
        rows.push_back(std::move(row));
    }

    CapResult res = minimize_over_caps(scenario, polytope, field, std::move(rows), policy);

    DualSolution sol;
    sol.weights = res.lambda;
    sol.value = res.value;
    sol.status = res.status;
    sol.iterations = res.iterations;
    sol.deflator = OptionalProcess::constant(scenario.tree.size(), 0.0);
    for (int n = 0; n < scenario.tree.size(); ++n) {
        double v = 0.0;
        for (int j = 0; j < J; ++j) v += res.lambda[j] * polytope.densities[j][n];
        sol.deflator[n] = v;
    }
    sol.slack_y = y;
    sol.slack_r = r;
    for (int j = 0; j < J; ++j) {
        sol.slack_y -= res.lambda[j];
        for (size_t i = 0; i < sol.slack_r.size(); ++i)
            sol.slack_r[i] -= res.lambda[j] * polytope.claim_expectations[j][i];
    }
    std::vector<double> slack;
    slack.push_back(sol.slack_y);
    slack.insert(slack.end(), sol.slack_r.begin(), sol.slack_r.end());
    sol.slack_margin = clL_margin(cones, slack);
    return sol;
}

double value_wtilde(const MarketScenario& scenario,
                    const MeasurePolytope& polytope, const UtilityField& field,
                    double y, const NumericPolicy& policy) {
    if (!(y > 0.0)) throw DomainError("value_wtilde: y must be positive");
    CapRow row;
    row.a.assign(static_cast<size_t>(polytope.count()), 1.0);
    row.b = y;
    return minimize_over_caps(scenario, polytope, field, {row}, policy).value;
}

}  // namespace treedual
