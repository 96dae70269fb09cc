#pragma once

#include <string>
#include <vector>

namespace treedual {

// One node of the event tree.  Nodes are stored in a flat vector; index 0
// is the root.  `prob` is the conditional branch probability given the
// parent (1 at the root).
struct TreeNode {
    int parent = -1;
    int time = 0;
    double prob = 1.0;
    std::vector<int> children;

    bool is_leaf() const { return children.empty(); }
};

// Finite filtered probability space.  Immutable after construction; all
// accessors are const.
class EventTree {
public:
    EventTree() = default;
    explicit EventTree(std::vector<TreeNode> nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    const TreeNode& node(int i) const { return nodes_[i]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    int horizon() const { return horizon_; }
    const std::vector<int>& leaves() const { return leaves_; }

    // Unconditional probability of reaching a node: product of branch
    // probabilities along the path from the root.
    double path_prob(int i) const { return path_prob_[i]; }

    // Position of a leaf node in leaves(), -1 for internal nodes.
    int leaf_index(int i) const { return leaf_index_[i]; }

private:
    std::vector<TreeNode> nodes_;
    std::vector<int> leaves_;
    std::vector<int> leaf_index_;
    std::vector<double> path_prob_;
    int horizon_ = 0;
};

// Stochastic clock: nonnegative mass charged per node, with every
// root-to-leaf path sum bounded by `bound`.
struct ClockSpec {
    std::vector<double> increments;  // one per node
    double bound = 1.0;
};

// A scalar process indexed by tree nodes (consumption plans, deflators,
// densities).
struct OptionalProcess {
    std::vector<double> values;

    double operator[](int node) const { return values[node]; }
    double& operator[](int node) { return values[node]; }
    int size() const { return static_cast<int>(values.size()); }

    static OptionalProcess constant(int n, double v) {
        return OptionalProcess{std::vector<double>(static_cast<size_t>(n), v)};
    }
};

// The finite market: event tree, asset prices per node, terminal claim
// payoffs per leaf, and a stochastic clock.  Endowment claims are stored
// through their terminal payoffs only.
struct MarketScenario {
    EventTree tree;
    int n_assets = 0;
    int n_claims = 0;
    std::vector<std::vector<double>> prices;    // [node][asset]
    std::vector<std::vector<double>> payoffs;   // [leaf index][claim]
    ClockSpec clock;
};

// One violated invariant: which rule and where.
struct Violation {
    std::string rule;
    int node = -1;
    std::string detail;
};

// Checks all structural invariants of the scenario.  Returns an empty
// list iff the scenario is valid; violations are data, not exceptions.
std::vector<Violation> validate_scenario(const MarketScenario& scenario);

// P(node) * dkappa(node); these weights turn clock integrals into plain
// sums over nodes: E[int c dkappa] = sum_n clock_weight(n) * c(n).
double clock_weight(const MarketScenario& scenario, int node);

// E_Q[int c dkappa] for a measure given by leaf masses: the node marginal
// Q(node) is the total leaf mass below the node.
double expectation_under(const MarketScenario& scenario,
                         const std::vector<double>& leaf_measure,
                         const OptionalProcess& process);

// Node marginals Q(node) of a leaf measure.
std::vector<double> node_marginals(const MarketScenario& scenario,
                                   const std::vector<double>& leaf_measure);

}  // namespace treedual
