#include "treedual/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treedual/policy.hpp"

namespace treedual {

EventTree::EventTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    const int n = size();
    path_prob_.assign(n, 0.0);
    leaf_index_.assign(n, -1);
    if (n == 0) return;
    path_prob_[0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const TreeNode& nd = nodes_[i];
        if (nd.parent < 0 || nd.parent >= n)
            throw std::invalid_argument("EventTree: node has no valid parent");
        path_prob_[i] = path_prob_[nd.parent] * nd.prob;
    }
    for (int i = 0; i < n; ++i) {
        horizon_ = std::max(horizon_, nodes_[i].time);
        if (nodes_[i].is_leaf()) {
            leaf_index_[i] = static_cast<int>(leaves_.size());
            leaves_.push_back(i);
        }
    }
}

std::vector<Violation> validate_scenario(const MarketScenario& scenario) {
    std::vector<Violation> out;
    const EventTree& tree = scenario.tree;
    const int n = tree.size();
    if (n == 0) {
        out.push_back({"tree nonempty", -1, "tree has no nodes"});
        return out;
    }
    if (tree.node(0).parent != -1 || tree.node(0).time != 0)
        out.push_back({"root", 0, "node 0 must be the root at time 0"});

    for (int i = 1; i < n; ++i) {
        const TreeNode& nd = tree.node(i);
        if (nd.parent < 0 || nd.parent >= n) {
            out.push_back({"parent link", i, "missing parent"});
            continue;
        }
        if (nd.time != tree.node(nd.parent).time + 1)
            out.push_back({"time index", i, "time must be parent time + 1"});
        bool listed = false;
        for (int c : tree.node(nd.parent).children) listed = listed || c == i;
        if (!listed)
            out.push_back({"parent link", i, "node missing from parent's child list"});
        if (!(nd.prob > 0.0))
            out.push_back({"branch probabilities", i,
                           "branch probability must be strictly positive"});
    }
    for (int i = 0; i < n; ++i) {
        const TreeNode& nd = tree.node(i);
        if (nd.is_leaf()) continue;
        double s = 0.0;
        for (int c : nd.children) s += tree.node(c).prob;
        if (std::abs(s - 1.0) > 1e-12)
            out.push_back({"branch probabilities", i,
                           "child probabilities sum to " + std::to_string(s)});
    }

    // clock
    if (static_cast<int>(scenario.clock.increments.size()) != n) {
        out.push_back({"clock increments", -1, "one increment per node required"});
        return out;
    }
    bool positive_path = false;
    for (int i = 0; i < n; ++i) {
        double dk = scenario.clock.increments[i];
        if (!(dk >= 0.0) || !std::isfinite(dk))
            out.push_back({"clock increments", i, "increment must be nonnegative and finite"});
    }
    // path sums, checked leaf by leaf
    for (int leaf : tree.leaves()) {
        double total = 0.0;
        for (int i = leaf; i != -1; i = tree.node(i).parent)
            total += scenario.clock.increments[i];
        if (total > 0.0) positive_path = true;
        if (total > scenario.clock.bound + 1e-12)
            out.push_back({"clock bound", leaf,
                           "path sum " + std::to_string(total) + " exceeds bound"});
    }
    if (!positive_path)
        out.push_back({"P[kappa_T>0]>0 fails", -1,
                       "every root-to-leaf clock path sum is zero"});

    // prices
    if (static_cast<int>(scenario.prices.size()) != n) {
        out.push_back({"prices", -1, "prices must be defined at every node"});
    } else {
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(scenario.prices[i].size()) != scenario.n_assets) {
                out.push_back({"prices", i, "wrong number of assets"});
                continue;
            }
            for (double s : scenario.prices[i])
                if (!std::isfinite(s))
                    out.push_back({"prices", i, "price not finite"});
        }
    }

    // terminal payoffs, leaves only
    if (static_cast<int>(scenario.payoffs.size()) !=
        static_cast<int>(tree.leaves().size())) {
        out.push_back({"payoffs", -1, "payoffs must be defined exactly at leaves"});
    } else {
        for (size_t l = 0; l < scenario.payoffs.size(); ++l) {
            if (static_cast<int>(scenario.payoffs[l].size()) != scenario.n_claims) {
                out.push_back({"payoffs", tree.leaves()[l], "wrong number of claims"});
                continue;
            }
            for (double f : scenario.payoffs[l])
                if (!std::isfinite(f))
                    out.push_back({"payoffs", tree.leaves()[l], "payoff not finite"});
        }
    }
    return out;
}

double clock_weight(const MarketScenario& scenario, int node) {
    if (node < 0 || node >= scenario.tree.size())
        throw std::out_of_range("clock_weight: unknown node");
    return scenario.tree.path_prob(node) * scenario.clock.increments[node];
}

std::vector<double> node_marginals(const MarketScenario& scenario,
                                   const std::vector<double>& leaf_measure) {
    const EventTree& tree = scenario.tree;
    std::vector<double> q(static_cast<size_t>(tree.size()), 0.0);
    for (size_t l = 0; l < leaf_measure.size(); ++l) {
        int node = tree.leaves()[l];
        for (int i = node; i != -1; i = tree.node(i).parent) q[i] += leaf_measure[l];
    }
    return q;
}

double expectation_under(const MarketScenario& scenario,
                         const std::vector<double>& leaf_measure,
                         const OptionalProcess& process) {
    if (leaf_measure.size() != scenario.tree.leaves().size())
        throw std::invalid_argument("expectation_under: measure size mismatch");
    double mass = 0.0;
    for (double m : leaf_measure) {
        if (m < 0.0)
            throw std::invalid_argument("expectation_under: negative measure entry");
        mass += m;
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw std::invalid_argument("expectation_under: measure does not sum to 1");
    std::vector<double> q = node_marginals(scenario, leaf_measure);
    double total = 0.0;
    for (int i = 0; i < scenario.tree.size(); ++i)
        total += q[i] * scenario.clock.increments[i] * process[i];
    return total;
}

void NumericPolicy::validate() const {
    if (!(feasibility_tol > 0 && stationarity_tol > 0 && gap_tol > 0 &&
          membership_tol > 0 && cone_tol > 0 && interior_tol > 0))
        throw std::invalid_argument("NumericPolicy: tolerances must be positive");
    if (max_iterations <= 0 || vertex_cap <= 0 || grid_density <= 0)
        throw std::invalid_argument("NumericPolicy: caps must be positive");
}

}  // namespace treedual
