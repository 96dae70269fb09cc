#include "treedual/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "treedual/errors.hpp"

namespace treedual {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact double -> rational conversion (doubles are dyadic rationals).
Rational to_rational(double x) {
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
    // 53 bits of mantissa
    auto imant = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(imant);
    if (exp >= 0)
        r *= Rational(BigInt(1) << exp);
    else
        r /= Rational(BigInt(1) << -exp);
    return r;
}

using RMatrix = std::vector<std::vector<Rational>>;

// Vertices of { q >= 0 : A q = b } by exact basic-solution enumeration.
// Returns an empty list when the system is infeasible.
std::vector<std::vector<Rational>> polytope_vertices(RMatrix A,
                                                     std::vector<Rational> b) {
    const int m = static_cast<int>(A.size());
    const int n = m > 0 ? static_cast<int>(A[0].size()) : 0;

    // Gaussian elimination on [A | b]: find pivot rows / detect inconsistency.
    RMatrix aug(A);
    for (int i = 0; i < m; ++i) aug[i].push_back(b[i]);
    std::vector<int> pivot_rows;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int p = -1;
        for (int i = row; i < m; ++i)
            if (aug[i][col] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(aug[p], aug[row]);
        for (int i = 0; i < m; ++i) {
            if (i == row || aug[i][col] == 0) continue;
            Rational f = aug[i][col] / aug[row][col];
            for (int j = col; j <= n; ++j) aug[i][j] -= f * aug[row][j];
        }
        ++row;
    }
    const int rank = row;
    for (int i = rank; i < m; ++i)
        if (aug[i][n] != 0) return {};  // inconsistent

    // Work with the `rank` independent rows of the reduced system.
    std::vector<std::vector<Rational>> out;
    std::set<std::vector<Rational>> seen;
    std::vector<int> subset(static_cast<size_t>(rank));
    for (int i = 0; i < rank; ++i) subset[i] = i;

    auto try_basis = [&](const std::vector<int>& cols) {
        // solve the rank x rank system on the reduced rows
        RMatrix M(static_cast<size_t>(rank),
                  std::vector<Rational>(static_cast<size_t>(rank + 1)));
        for (int i = 0; i < rank; ++i) {
            for (int j = 0; j < rank; ++j) M[i][j] = aug[i][cols[j]];
            M[i][rank] = aug[i][n];
        }
        for (int col = 0; col < rank; ++col) {
            int p = -1;
            for (int i = col; i < rank; ++i)
                if (M[i][col] != 0) { p = i; break; }
            if (p < 0) return;  // singular basis
            std::swap(M[p], M[col]);
            for (int i = 0; i < rank; ++i) {
                if (i == col || M[i][col] == 0) continue;
                Rational f = M[i][col] / M[col][col];
                for (int j = col; j <= rank; ++j) M[i][j] -= f * M[col][j];
            }
        }
        std::vector<Rational> q(static_cast<size_t>(n), Rational(0));
        for (int i = 0; i < rank; ++i) {
            Rational v = M[i][rank] / M[i][i];
            if (v < 0) return;  // infeasible basic solution
            q[cols[i]] = v;
        }
        if (seen.insert(q).second) out.push_back(std::move(q));
    };

    // all column subsets of size `rank`
    std::vector<int> cols(static_cast<size_t>(rank));
    std::vector<int> stack;
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == rank) {
            try_basis(stack);
            return;
        }
        for (int c = start; c <= n - (rank - depth); ++c) {
            stack.push_back(c);
            rec(c + 1, depth + 1);
            stack.pop_back();
        }
    };
    if (rank == 0) {
        // no binding equalities: only q = 0, feasible iff b == 0 (handled above)
        std::vector<Rational> q(static_cast<size_t>(n), Rational(0));
        out.push_back(q);
    } else {
        rec(0, 0);
    }
    return out;
}

}  // namespace

MeasurePolytope enumerate_martingale_vertices(const MarketScenario& scenario,
                                              const NumericPolicy& policy) {
    const EventTree& tree = scenario.tree;
    const int n_leaves = static_cast<int>(tree.leaves().size());

    // Local one-step vertex sets, per internal node.
    std::vector<std::vector<std::vector<Rational>>> local(
        static_cast<size_t>(tree.size()));
    for (int i = 0; i < tree.size(); ++i) {
        const TreeNode& nd = tree.node(i);
        if (nd.is_leaf()) continue;
        const int m = static_cast<int>(nd.children.size());
        RMatrix A(static_cast<size_t>(scenario.n_assets + 1),
                  std::vector<Rational>(static_cast<size_t>(m)));
        std::vector<Rational> b(static_cast<size_t>(scenario.n_assets + 1));
        for (int j = 0; j < m; ++j) A[0][j] = 1;
        b[0] = 1;
        for (int a = 0; a < scenario.n_assets; ++a) {
            for (int j = 0; j < m; ++j)
                A[a + 1][j] = to_rational(scenario.prices[nd.children[j]][a]);
            b[a + 1] = to_rational(scenario.prices[i][a]);
        }
        local[i] = polytope_vertices(std::move(A), std::move(b));
        if (i == 0 && local[i].empty())
            throw ArbitrageError(
                "set of martingale measures is empty: no one-step measure at the root");
    }

    MeasurePolytope poly;
    std::vector<std::vector<bool>> supports;

    // DFS over local vertex choices; `mass[i]` is the rational mass at node i.
    std::vector<Rational> mass(static_cast<size_t>(tree.size()), Rational(0));
    mass[0] = 1;
    // order nodes so parents precede children (flat storage guarantees root
    // first but not full topological order, so sort by time)
    std::vector<int> order(static_cast<size_t>(tree.size()));
    for (int i = 0; i < tree.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b2) {
        return tree.node(a).time < tree.node(b2).time;
    });

    std::function<void(int)> dfs = [&](int pos) {
        if (pos == static_cast<int>(order.size())) {
            std::vector<double> v(static_cast<size_t>(n_leaves), 0.0);
            std::vector<bool> supp(static_cast<size_t>(n_leaves), false);
            for (int l = 0; l < n_leaves; ++l) {
                const Rational& q = mass[tree.leaves()[l]];
                v[l] = q.convert_to<double>();
                supp[l] = q != 0;
            }
            poly.vertices.push_back(std::move(v));
            supports.push_back(std::move(supp));
            if (poly.count() > policy.vertex_cap)
                throw CapacityError("martingale vertex enumeration exceeded cap");
            return;
        }
        int node = order[pos];
        const TreeNode& nd = tree.node(node);
        if (nd.is_leaf()) {
            dfs(pos + 1);
            return;
        }
        if (mass[node] == 0) {
            // unreachable subtree: children keep zero mass, one canonical branch
            for (int c : nd.children) mass[c] = 0;
            dfs(pos + 1);
            return;
        }
        if (local[node].empty()) return;  // dead end: no conditional exists here
        for (const auto& lv : local[node]) {
            for (size_t j = 0; j < nd.children.size(); ++j)
                mass[nd.children[j]] = mass[node] * lv[j];
            dfs(pos + 1);
        }
    };
    dfs(0);

    if (poly.vertices.empty())
        throw ArbitrageError("set of martingale measures is empty");

    // An everywhere-positive measure exists iff the uniform mixture of the
    // vertices is positive at every leaf (the mixture solves the
    // strict-feasibility program with the largest support).
    poly.has_equivalent = true;
    for (int l = 0; l < n_leaves; ++l) {
        bool covered = false;
        for (const auto& s : supports) covered = covered || s[l];
        if (!covered) { poly.has_equivalent = false; break; }
    }
    if (!poly.has_equivalent)
        throw ArbitrageError(
            "set of equivalent martingale measures is empty: every martingale "
            "measure vanishes on some leaf");

    for (int j = 0; j < poly.count(); ++j)
        poly.densities.push_back(density_process(poly, j, scenario));
    poly.claim_expectations = endowment_expectations(poly, scenario);
    return poly;
}

OptionalProcess density_process(const MeasurePolytope& polytope, int vertex,
                                const MarketScenario& scenario) {
    if (vertex < 0 || vertex >= polytope.count())
        throw std::out_of_range("density_process: bad vertex index");
    const EventTree& tree = scenario.tree;
    std::vector<double> marg =
        node_marginals(scenario, polytope.vertices[vertex]);
    OptionalProcess z = OptionalProcess::constant(tree.size(), 0.0);
    for (int i = 0; i < tree.size(); ++i) z[i] = marg[i] / tree.path_prob(i);
    return z;
}

std::vector<std::vector<double>> endowment_expectations(
    const MeasurePolytope& polytope, const MarketScenario& scenario) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(polytope.count()));
    for (const auto& q : polytope.vertices) {
        std::vector<double> p(static_cast<size_t>(scenario.n_claims), 0.0);
        for (size_t l = 0; l < q.size(); ++l)
            for (int i = 0; i < scenario.n_claims; ++i)
                p[i] += q[l] * scenario.payoffs[l][i];
        out.push_back(std::move(p));
    }
    return out;
}

double superreplication_price(const MarketScenario& scenario,
                              const MeasurePolytope& polytope,
                              const std::vector<double>& claim) {
    if (claim.size() != scenario.tree.leaves().size())
        throw std::invalid_argument("superreplication_price: claim size mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& q : polytope.vertices) {
        double e = 0.0;
        for (size_t l = 0; l < q.size(); ++l) e += q[l] * claim[l];
        best = std::max(best, e);
    }
    return best;
}

}  // namespace treedual
