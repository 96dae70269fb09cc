#include "treedual/primal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "treedual/errors.hpp"

namespace treedual {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::ValueMinusInfinity: return "value_minus_infinity";
        case SolveStatus::ValuePlusInfinity: return "value_plus_infinity";
        case SolveStatus::BoundaryDegenerate: return "boundary_degenerate";
    }
    return "?";
}

FeasibilityCheck is_feasible_consumption(const MarketScenario& scenario,
                                         const MeasurePolytope& polytope,
                                         const OptionalProcess& consumption,
                                         double x, const std::vector<double>& q,
                                         const NumericPolicy& policy) {
    FeasibilityCheck out;
    out.worst_violation = -kInf;
    for (int j = 0; j < polytope.count(); ++j) {
        double budget = x;
        for (size_t i = 0; i < q.size(); ++i)
            budget += q[i] * polytope.claim_expectations[j][i];
        if (budget < -policy.cone_tol)
            throw DomainError("is_feasible_consumption: (x,q) outside cl K");
        double spend = 0.0;
        const OptionalProcess& z = polytope.densities[j];
        for (int n = 0; n < scenario.tree.size(); ++n)
            spend += clock_weight(scenario, n) * z[n] * consumption[n];
        out.worst_violation = std::max(out.worst_violation, spend - budget);
    }
    out.feasible = out.worst_violation <= policy.feasibility_tol;
    return out;
}

PrimalSolution solve_primal(const MarketScenario& scenario,
                            const MeasurePolytope& polytope,
                            const UtilityField& field, double x,
                            const std::vector<double>& q,
                            const NumericPolicy& policy) {
    const int J = polytope.count();
    const int n_nodes = scenario.tree.size();

    std::vector<double> budget(static_cast<size_t>(J));
    for (int j = 0; j < J; ++j) {
        double b = x;
        for (size_t i = 0; i < q.size(); ++i)
            b += q[i] * polytope.claim_expectations[j][i];
        if (b < -policy.cone_tol)
            throw DomainError("solve_primal: (x,q) outside cl K, u = -inf by convention");
        budget[j] = std::max(b, 0.0);
    }

    PrimalSolution sol;
    sol.consumption = OptionalProcess::constant(n_nodes, 0.0);
    sol.multipliers.assign(static_cast<size_t>(J), 0.0);
    sol.budget_slack.assign(budget.begin(), budget.end());
    sol.subgrad_r.assign(q.size(), 0.0);

    // clock-support nodes
    std::vector<int> support;
    std::vector<double> w;
    for (int n = 0; n < n_nodes; ++n) {
        double cw = clock_weight(scenario, n);
        if (cw > 0.0) { support.push_back(n); w.push_back(cw); }
    }

    // Vertices with zero budget pin consumption to zero on their support.
    std::vector<bool> zero_budget(static_cast<size_t>(J), false);
    for (int j = 0; j < J; ++j) zero_budget[j] = budget[j] <= 1e-14;
    std::vector<int> nodes;       // reduced clock support
    std::vector<double> wn;
    bool trapped_mass = false;    // clock mass forced to zero consumption
    bool minus_infinity = false;
    for (size_t s = 0; s < support.size(); ++s) {
        int n = support[s];
        bool forced = false;
        for (int j = 0; j < J && !forced; ++j)
            forced = zero_budget[j] && polytope.densities[j][n] > 1e-14;
        if (forced) {
            trapped_mass = true;
            if (field.value_at_zero(n) == -kInf) minus_infinity = true;
        } else {
            nodes.push_back(n);
            wn.push_back(w[s]);
        }
    }

    if (minus_infinity) {
        sol.value = -kInf;
        sol.status = SolveStatus::ValueMinusInfinity;
        return sol;
    }
    double boundary_value = 0.0;  // utility collected on forced-zero nodes
    for (size_t s = 0; s < support.size(); ++s) {
        bool in_reduced = std::find(nodes.begin(), nodes.end(), support[s]) != nodes.end();
        if (!in_reduced) boundary_value += w[s] * eval_U(field, support[s], 0.0);
    }
    if (nodes.empty()) {
        sol.value = boundary_value;
        sol.status = trapped_mass ? SolveStatus::BoundaryDegenerate : SolveStatus::Optimal;
        return sol;
    }

    // active vertices for the reduced problem
    std::vector<int> verts;
    for (int j = 0; j < J; ++j)
        if (!zero_budget[j]) verts.push_back(j);
    const int Jr = static_cast<int>(verts.size());
    const int Nn = static_cast<int>(nodes.size());

    Eigen::MatrixXd Z(Jr, Nn);  // densities on the reduced support
    for (int a = 0; a < Jr; ++a)
        for (int b = 0; b < Nn; ++b)
            Z(a, b) = polytope.densities[verts[a]][nodes[b]];
    Eigen::VectorXd beta(Jr);
    for (int a = 0; a < Jr; ++a) beta(a) = budget[verts[a]];

    auto deflator = [&](const Eigen::VectorXd& mu) -> Eigen::VectorXd {
        return Z.transpose() * mu;
    };
    auto dual_value = [&](const Eigen::VectorXd& mu, const Eigen::VectorXd& y) {
        double f = mu.dot(beta);
        for (int b = 0; b < Nn; ++b) {
            if (!(y(b) > 0.0)) return kInf;
            f += wn[b] * eval_V(field, nodes[b], y(b));
        }
        return f;
    };

    // Initial scale: total spending at mu = t * uniform matches the mean budget.
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(Jr, 1.0 / Jr);
    {
        Eigen::VectorXd zbar = deflator(mu);
        double target = beta.mean();
        double lo = -40, hi = 40;
        for (int it = 0; it < 120; ++it) {
            double t = std::exp(0.5 * (lo + hi));
            double spend = 0.0;
            for (int b = 0; b < Nn; ++b)
                spend += wn[b] * zbar(b) * marginal_inverse(field, nodes[b], t * zbar(b));
            (spend > target ? lo : hi) = 0.5 * (lo + hi);
        }
        mu *= std::exp(0.5 * (lo + hi));
    }

    const double scale = std::max(1.0, beta.lpNorm<Eigen::Infinity>());
    double f = dual_value(mu, deflator(mu));
    int it = 0;
    for (; it < policy.max_iterations; ++it) {
        Eigen::VectorXd y = deflator(mu);
        Eigen::VectorXd grad = beta;
        Eigen::VectorXd ivals(Nn), vpp(Nn);
        for (int b = 0; b < Nn; ++b) {
            ivals(b) = marginal_inverse(field, nodes[b], y(b));
            vpp(b) = conjugate_second_derivative(field, nodes[b], y(b));
        }
        for (int a = 0; a < Jr; ++a)
            for (int b = 0; b < Nn; ++b) grad(a) -= wn[b] * Z(a, b) * ivals(b);

        // projected-gradient residual
        double res = 0.0;
        for (int a = 0; a < Jr; ++a) {
            double r = mu(a) > 0.0 ? grad(a) : std::min(grad(a), 0.0);
            res = std::max(res, std::abs(r));
        }
        sol.stationarity_residual = res;
        // aim below the feasibility tolerance so the recovered plan passes
        // the budget check with margin
        if (res <= std::min(policy.stationarity_tol, 0.1 * policy.feasibility_tol) * scale)
            break;

        // Newton direction on the free set
        std::vector<int> free;
        for (int a = 0; a < Jr; ++a)
            if (mu(a) > 1e-14 || grad(a) < 0.0) free.push_back(a);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(Jr);
        if (!free.empty()) {
            const int F = static_cast<int>(free.size());
            Eigen::MatrixXd H(F, F);
            for (int a = 0; a < F; ++a)
                for (int b2 = a; b2 < F; ++b2) {
                    double h = 0.0;
                    for (int n = 0; n < Nn; ++n)
                        h += wn[n] * Z(free[a], n) * Z(free[b2], n) * vpp(n);
                    H(a, b2) = H(b2, a) = h;
                }
            H.diagonal().array() += 1e-12 * (1.0 + H.trace());
            Eigen::VectorXd gf(F);
            for (int a = 0; a < F; ++a) gf(a) = grad(free[a]);
            Eigen::VectorXd df = H.ldlt().solve(-gf);
            if (gf.dot(df) >= 0.0) df = -gf;  // fall back to steepest descent
            for (int a = 0; a < F; ++a) d(free[a]) = df(a);
        }

        // backtracking with projection onto mu >= 0
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd cand = (mu + alpha * d).cwiseMax(0.0);
            double fc = dual_value(cand, deflator(cand));
            if (fc < f - 1e-16 * std::abs(f)) {
                mu = cand;
                f = fc;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;  // stalled at numerical precision
    }
    if (sol.stationarity_residual > 1e3 * policy.stationarity_tol * scale)
        throw ConvergenceError("solve_primal: projected Newton did not converge",
                               sol.stationarity_residual);
    sol.iterations = it;

    // recover consumption and assemble residuals
    Eigen::VectorXd y = deflator(mu);
    double uval = boundary_value;
    for (int b = 0; b < Nn; ++b) {
        double c = marginal_inverse(field, nodes[b], y(b));
        sol.consumption[nodes[b]] = c;
        uval += wn[b] * eval_U(field, nodes[b], c);
    }
    sol.value = uval;
    sol.complementarity = 0.0;
    for (int a = 0; a < Jr; ++a) {
        int j = verts[a];
        sol.multipliers[j] = mu(a);
        double spend = 0.0;
        for (int b = 0; b < Nn; ++b) spend += wn[b] * Z(a, b) * sol.consumption[nodes[b]];
        sol.budget_slack[j] = budget[j] - spend;
        sol.complementarity = std::max(sol.complementarity,
                                       std::abs(mu(a) * sol.budget_slack[j]));
    }
    sol.subgrad_y = 0.0;
    for (int j = 0; j < J; ++j) sol.subgrad_y += sol.multipliers[j];
    for (size_t i = 0; i < q.size(); ++i) {
        double r = 0.0;
        for (int j = 0; j < J; ++j)
            r += sol.multipliers[j] * polytope.claim_expectations[j][i];
        sol.subgrad_r[i] = r;
    }
    sol.status = trapped_mass ? SolveStatus::BoundaryDegenerate : SolveStatus::Optimal;
    return sol;
}

double value_w(const MarketScenario& scenario, const MeasurePolytope& polytope,
               const UtilityField& field, double x, const NumericPolicy& policy) {
    if (!(x > 0.0)) throw DomainError("value_w: x must be positive");
    std::vector<double> q(static_cast<size_t>(scenario.n_claims), 0.0);
    return solve_primal(scenario, polytope, field, x, q, policy).value;
}

}  // namespace treedual
