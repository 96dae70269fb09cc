#include "treedual/testgen.hpp"

#include <algorithm>
#include <cmath>

namespace treedual {
namespace {

TreeNode node(int parent, int time, double prob, std::vector<int> children) {
    TreeNode n;
    n.parent = parent;
    n.time = time;
    n.prob = prob;
    n.children = std::move(children);
    return n;
}

}  // namespace

MarketScenario make_det1() {
    MarketScenario s;
    s.tree = EventTree({node(-1, 0, 1.0, {})});
    s.n_assets = 1;
    s.n_claims = 0;
    s.prices = {{1.0}};
    s.payoffs = {{}};
    s.clock.increments = {1.0};
    s.clock.bound = 1.0;
    return s;
}

MarketScenario make_bin1() {
    MarketScenario s;
    s.tree = EventTree({node(-1, 0, 1.0, {1, 2}), node(0, 1, 0.5, {}),
                        node(0, 1, 0.5, {})});
    s.n_assets = 1;
    s.n_claims = 0;
    s.prices = {{1.0}, {2.0}, {0.5}};
    s.payoffs = {{}, {}};
    s.clock.increments = {0.0, 1.0, 1.0};
    s.clock.bound = 1.0;
    return s;
}

MarketScenario make_tri1() {
    MarketScenario s;
    s.tree = EventTree({node(-1, 0, 1.0, {1, 2, 3}), node(0, 1, 1.0 / 3.0, {}),
                        node(0, 1, 1.0 / 3.0, {}), node(0, 1, 1.0 / 3.0, {})});
    s.n_assets = 1;
    s.n_claims = 1;
    s.prices = {{1.0}, {2.0}, {1.0}, {0.5}};
    s.payoffs = {{1.0}, {0.0}, {0.0}};  // digital claim on the up state
    s.clock.increments = {0.0, 1.0, 1.0, 1.0};
    s.clock.bound = 1.0;
    return s;
}

MarketScenario random_scenario(Rng& rng, int max_leaves, int n_assets,
                               int n_claims) {
    const int depth = 1 + rng.below(3);

    // grow the tree structure first
    std::vector<TreeNode> nodes;
    nodes.push_back(node(-1, 0, 1.0, {}));
    int leaves = 1;
    std::vector<int> frontier = {0};
    for (int t = 0; t < depth; ++t) {
        std::vector<int> next;
        for (int p : frontier) {
            int branch = 2 + rng.below(2);
            if (leaves - 1 + branch > max_leaves) branch = 0;
            if (branch == 0) continue;
            leaves += branch - 1;
            std::vector<double> w(static_cast<size_t>(branch));
            double total = 0.0;
            for (double& v : w) { v = 0.2 + rng.uniform(); total += v; }
            for (int c = 0; c < branch; ++c) {
                int id = static_cast<int>(nodes.size());
                nodes.push_back(node(p, t + 1, w[static_cast<size_t>(c)] / total, {}));
                nodes[static_cast<size_t>(p)].children.push_back(id);
                next.push_back(id);
            }
        }
        if (next.empty()) break;
        frontier = next;
    }

    MarketScenario s;
    s.tree = EventTree(std::move(nodes));
    s.n_assets = std::max(1, n_assets);
    s.n_claims = std::max(0, n_claims);

    // prices bottom-up: leaves get random positive prices, every parent a
    // strictly positive convex mixture of its children, which guarantees a
    // full-support martingale measure.  Prices sit on a dyadic grid and the
    // mixture weights are 64ths, so the martingale identities hold exactly
    // in double arithmetic (the enumeration works in exact rationals and
    // would reject rounded data as arbitrage).
    s.prices.assign(static_cast<size_t>(s.tree.size()),
                    std::vector<double>(static_cast<size_t>(s.n_assets), 0.0));
    for (int i = s.tree.size() - 1; i >= 0; --i) {
        const TreeNode& nd = s.tree.node(i);
        if (nd.is_leaf()) {
            for (int a = 0; a < s.n_assets; ++a)
                s.prices[static_cast<size_t>(i)][static_cast<size_t>(a)] =
                    (32 + rng.below(97)) / 64.0;  // [0.5, 2] in 64ths
        } else {
            const int k = static_cast<int>(nd.children.size());
            std::vector<int> weight(static_cast<size_t>(k), 8);
            for (int extra = 64 - 8 * k; extra > 0; --extra)
                ++weight[static_cast<size_t>(rng.below(k))];
            for (int a = 0; a < s.n_assets; ++a) {
                double price = 0.0;
                for (int c = 0; c < k; ++c)
                    price += weight[static_cast<size_t>(c)] / 64.0 *
                             s.prices[static_cast<size_t>(nd.children[static_cast<size_t>(c)])]
                                     [static_cast<size_t>(a)];
                s.prices[static_cast<size_t>(i)][static_cast<size_t>(a)] = price;
            }
        }
    }

    for (int l : s.tree.leaves()) {
        (void)l;
        std::vector<double> f(static_cast<size_t>(s.n_claims));
        for (double& v : f) v = rng.uniform(0.0, 2.0);
        s.payoffs.push_back(f);
    }

    // clock: random mass, terminal nodes always charged so the support is
    // nonempty on every path
    s.clock.increments.assign(static_cast<size_t>(s.tree.size()), 0.0);
    for (int i = 0; i < s.tree.size(); ++i) {
        if (s.tree.node(i).is_leaf())
            s.clock.increments[static_cast<size_t>(i)] = rng.uniform(0.5, 1.0);
        else if (rng.uniform() < 0.4)
            s.clock.increments[static_cast<size_t>(i)] = rng.uniform(0.0, 0.5);
    }
    double bound = 0.0;
    for (int l : s.tree.leaves()) {
        double path = 0.0;
        for (int i = l; i >= 0; i = s.tree.node(i).parent)
            path += s.clock.increments[static_cast<size_t>(i)];
        bound = std::max(bound, path);
    }
    s.clock.bound = bound;
    return s;
}

}  // namespace treedual
