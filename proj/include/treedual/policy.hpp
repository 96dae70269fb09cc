#pragma once

#include <cstdint>

namespace treedual {

// Shared numeric policy for solvers and verification checks.  All
// tolerances are pinned here so that primal and dual sides agree.
struct NumericPolicy {
    double feasibility_tol = 1e-9;
    double stationarity_tol = 1e-8;
    double gap_tol = 1e-6;           // relative duality-gap tolerance
    double membership_tol = 1e-9;    // LP membership slack
    double cone_tol = 1e-10;         // cone polarity / halfspace residuals
    double interior_tol = 1e-12;     // strict-inequality margin for interior tests
    int max_iterations = 500;
    int vertex_cap = 10000;
    int grid_density = 20;           // probe-grid points per axis
    std::uint64_t seed = 42;
    bool parallel = true;            // OpenMP over independent probe solves

    void validate() const;
};

}  // namespace treedual
