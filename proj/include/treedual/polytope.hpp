#pragma once

#include <vector>

#include "treedual/policy.hpp"
#include "treedual/scenario.hpp"

namespace treedual {

// The polytope of (not necessarily equivalent) martingale measures on the
// tree, represented by its vertices as leaf-probability vectors.
//
// Vertex enumeration is exact: inputs are converted to rationals and the
// one-step martingale systems are pivoted in exact arithmetic, so the
// stored vertices are correct to double rounding.
struct MeasurePolytope {
    std::vector<std::vector<double>> vertices;          // [j][leaf index]
    std::vector<OptionalProcess> densities;             // Z^j per node, Z^j(root) = 1
    std::vector<std::vector<double>> claim_expectations;  // p_j = E_{Q_j}[F_T]
    bool has_equivalent = false;

    int count() const { return static_cast<int>(vertices.size()); }
};

// Enumerates the vertex measures of
//   { Q >= 0 on leaves : sum Q = 1, one-step martingale constraints }.
//
// The polytope factorizes over the tree: a measure is a vertex iff its
// conditional at every positively-charged node is a vertex of that node's
// local one-step polytope, so enumeration recurses over nodes and takes
// products of local vertices.
//
// Throws ArbitrageError when the polytope is empty or contains no
// everywhere-positive measure, CapacityError past policy.vertex_cap.
MeasurePolytope enumerate_martingale_vertices(const MarketScenario& scenario,
                                              const NumericPolicy& policy = {});

// Density process of vertex j: Z(node) = Q_j(node) / P(node).
OptionalProcess density_process(const MeasurePolytope& polytope, int vertex,
                                const MarketScenario& scenario);

// Endowment expectation vectors p_j = E_{Q_j}[F_T] for every vertex.
std::vector<std::vector<double>> endowment_expectations(
    const MeasurePolytope& polytope, const MarketScenario& scenario);

// Superreplication price of a terminal claim h (one value per leaf):
// the largest vertex expectation max_j E_{Q_j}[h].
double superreplication_price(const MarketScenario& scenario,
                              const MeasurePolytope& polytope,
                              const std::vector<double>& claim);

}  // namespace treedual
