#pragma once

#include <cstdint>

#include "riskdp/distribution.hpp"
#include "riskdp/mdp.hpp"

namespace riskdp {

// Seeded generators for randomized consistency sweeps. Probability masses
// are multiples of 1/mass_grain, so cumulative tails and initial mixtures
// stay exact in binary floating point and threshold comparisons have no
// rounding fuzz. Draws map raw engine output directly (no distribution
// adapters), so a seed yields the same instance on every platform.

struct RandomMdpParams {
    int min_states = 1;  // state count uniform in [min_states, max_states]
    int max_states = 3;  // at most 9
    int min_actions = 1; // action count uniform in [min_actions, max_actions]
    int max_actions = 3; // at most 9
    int horizon = 1;
    double reward_lo = -10.0;
    double reward_hi = 10.0;
    bool integer_rewards = false;
    int mass_grain = 64;
};

Mdp random_mdp(std::uint64_t seed, const RandomMdpParams& params = {});

// Dyadic-mass distribution with up to max_atoms outcomes in [lo, hi].
FiniteDistribution random_distribution(std::uint64_t seed, int max_atoms = 8,
                                       double lo = -10.0, double hi = 10.0);

} // namespace riskdp
