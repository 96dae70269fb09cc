#include "treedual/cones.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "treedual/errors.hpp"
#include "treedual/lp.hpp"

namespace treedual {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<std::vector<double>> dedupe(std::vector<std::vector<double>> pts,
                                        double tol) {
    std::vector<std::vector<double>> out;
    for (auto& p : pts) {
        bool dup = false;
        for (const auto& q : out) {
            double d = 0.0;
            for (size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
            if (d <= tol) { dup = true; break; }
        }
        if (!dup) out.push_back(std::move(p));
    }
    return out;
}

// Extreme points of conv{pts}: p_i is extreme iff it cannot be written as
// a convex combination of the remaining points.
std::vector<std::vector<double>> hull_vertices(
    const std::vector<std::vector<double>>& pts) {
    const int n = pts.empty() ? 0 : static_cast<int>(pts[0].size());
    if (pts.size() <= 1 || n == 0) return pts;
    std::vector<std::vector<double>> out;
    for (size_t i = 0; i < pts.size(); ++i) {
        // lambda >= 0 over the other points, sum = 1, combination = pts[i]
        std::vector<std::vector<double>> A_ub, A_lb;
        std::vector<double> b_ub, b_lb;
        auto add_eq = [&](std::vector<double> row, double rhs) {
            A_ub.push_back(row);
            b_ub.push_back(rhs);
            A_lb.push_back(std::move(row));
            b_lb.push_back(rhs);
        };
        const int m = static_cast<int>(pts.size()) - 1;
        for (int c = 0; c < n; ++c) {
            std::vector<double> row;
            for (size_t k = 0; k < pts.size(); ++k)
                if (k != i) row.push_back(pts[k][c]);
            add_eq(std::move(row), pts[i][c]);
        }
        add_eq(std::vector<double>(static_cast<size_t>(m), 1.0), 1.0);
        FeasibilityResult fr = lp_feasibility(A_ub, b_ub, A_lb, b_lb, m);
        if (fr.violation > 1e-10) out.push_back(pts[i]);
    }
    return out;
}

}  // namespace

ConePair build_cones(const MeasurePolytope& polytope, const NumericPolicy& policy) {
    if (!polytope.has_equivalent)
        throw ArbitrageError("build_cones requires an equivalent martingale measure");
    ConePair cones;
    const int N = polytope.claim_expectations.empty()
                      ? 0
                      : static_cast<int>(polytope.claim_expectations[0].size());
    const int n = N + 1;
    cones.dim = n;

    std::vector<std::vector<double>> ps = dedupe(polytope.claim_expectations, 1e-12);
    cones.P_set = N == 0 ? std::vector<std::vector<double>>{{}} : hull_vertices(ps);

    for (const auto& p : cones.P_set) {
        std::vector<double> g(static_cast<size_t>(n), 0.0);
        g[0] = 1.0;
        for (int i = 0; i < N; ++i) g[i + 1] = p[i];
        cones.K_halfspaces.push_back(g);
        cones.L_rays.push_back(std::move(g));
    }

    // L_open iff the p_j affinely span R^N (dim conv{p_j} = N)
    {
        Eigen::MatrixXd D(static_cast<int>(cones.P_set.size()), std::max(N, 1));
        D.setZero();
        for (int i = 0; i < static_cast<int>(cones.P_set.size()); ++i)
            for (int c = 0; c < N; ++c)
                D(i, c) = cones.P_set[i][c] - cones.P_set[0][c];
        int adim = 0;
        if (N > 0) {
            Eigen::FullPivLU<Eigen::MatrixXd> affine_lu(D);
            affine_lu.setThreshold(1e-10);
            adim = static_cast<int>(affine_lu.rank());
        }
        cones.L_open = adim == N;
    }

    // lineality of cl K = nullspace of the half-space matrix
    const int m = static_cast<int>(cones.K_halfspaces.size());
    Eigen::MatrixXd G(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = cones.K_halfspaces[i][j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd null = lu.kernel();
    const int ell = lu.dimensionOfKernel();
    for (int c = 0; c < ell; ++c) {
        Eigen::VectorXd v = null.col(c).normalized();
        cones.lineality.push_back(std::vector<double>(v.data(), v.data() + n));
    }

    // pointed rays, enumerated in the orthogonal complement of the lineality
    const int k = n - ell;
    Eigen::MatrixXd W(n, k);
    {
        // orthonormal basis of lineality^perp from the SVD of G
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
        W = svd.matrixV().leftCols(k);
    }
    Eigen::MatrixXd Gp = G * W;  // m x k

    std::vector<std::vector<double>> rays;
    std::vector<int> stack;
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k - 1) {
            Eigen::MatrixXd S(std::max(k - 1, 1), k);
            S.setZero();
            for (int i = 0; i < k - 1; ++i) S.row(i) = Gp.row(stack[i]);
            Eigen::FullPivLU<Eigen::MatrixXd> slu(S);
            slu.setThreshold(1e-10);
            if (slu.dimensionOfKernel() != 1) return;
            Eigen::VectorXd u = slu.kernel().col(0).normalized();
            for (int sgn : {+1, -1}) {
                Eigen::VectorXd cand = sgn * u;
                bool ok = true;
                for (int i = 0; i < m && ok; ++i)
                    ok = Gp.row(i).dot(cand) >= -1e-10;
                if (ok) {
                    Eigen::VectorXd z = W * cand;
                    // canonical scaling: largest absolute entry = 1
                    double scale = z.cwiseAbs().maxCoeff();
                    z /= scale;
                    rays.push_back(std::vector<double>(z.data(), z.data() + n));
                }
            }
            return;
        }
        for (int r = start; r < m; ++r) {
            stack.push_back(r);
            rec(r + 1, depth + 1);
            stack.pop_back();
            if (static_cast<int>(rays.size()) > policy.vertex_cap)
                throw CapacityError("cone ray enumeration exceeded cap");
        }
    };
    if (k >= 1) rec(0, 0);
    cones.K_rays = dedupe(std::move(rays), 1e-9);

    cones.L_halfspaces = cones.K_rays;
    for (const auto& l : cones.lineality) {
        cones.L_halfspaces.push_back(l);
        std::vector<double> neg(l);
        for (double& v : neg) v = -v;
        cones.L_halfspaces.push_back(std::move(neg));
    }
    return cones;
}

double clK_margin(const ConePair& cones, const std::vector<double>& point) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& g : cones.K_halfspaces) worst = std::min(worst, dot(g, point));
    return worst;
}

double clL_margin(const ConePair& cones, const std::vector<double>& point) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& h : cones.L_halfspaces) worst = std::min(worst, dot(h, point));
    return worst;
}

bool in_cone(const ConePair& cones, const std::vector<double>& point,
             ConeRegion which, const NumericPolicy& policy) {
    if (static_cast<int>(point.size()) != cones.dim)
        throw std::invalid_argument("in_cone: point has wrong dimension");
    switch (which) {
        case ConeRegion::ClK:
            return clK_margin(cones, point) >= -policy.cone_tol;
        case ConeRegion::K:
            return clK_margin(cones, point) > policy.interior_tol;
        case ConeRegion::ClL:
            return clL_margin(cones, point) >= -policy.cone_tol;
        case ConeRegion::L: {
            // relative interior: strict on half-spaces that are active
            // somewhere on cl L, equality on those identically zero on it
            for (const auto& h : cones.L_halfspaces) {
                double on_cone = 0.0;
                for (const auto& r : cones.L_rays)
                    on_cone = std::max(on_cone, dot(h, r));
                double v = dot(h, point);
                if (on_cone > policy.cone_tol) {
                    if (!(v > policy.interior_tol)) return false;
                } else {
                    if (std::abs(v) > policy.cone_tol) return false;
                }
            }
            return true;
        }
    }
    return false;
}

}  // namespace treedual
