#pragma once

#include "treedual/rng.hpp"
#include "treedual/scenario.hpp"

namespace treedual {

// Shipped fixtures.
//
// DET1: single node, one asset S = 1, dkappa = 1.  Complete and
// deterministic; every closed form is elementary.
MarketScenario make_det1();

// BIN1: one-period binomial, S_0 = 1, S_1 in {2, 1/2} with physical
// probabilities (1/2, 1/2); clock mass at the terminal date.  The unique
// martingale measure is (1/3, 2/3).
MarketScenario make_bin1();

// TRI1: one-period trinomial, S_1 in {2, 1, 1/2} uniform, plus a digital
// claim paying on the up state.  Incomplete: two vertex measures with
// claim prices {0, 1/3}.
MarketScenario make_tri1();

// Random arbitrage-free tree: each parent price is a strictly positive
// convex mixture of its children's prices, so an equivalent martingale
// measure exists by construction.  Depth <= 3, branching 2..3, capped at
// `max_leaves` leaves, `n_assets` <= 2 assets, `n_claims` <= 2 claims.
MarketScenario random_scenario(Rng& rng, int max_leaves = 27, int n_assets = 2,
                               int n_claims = 2);

}  // namespace treedual
