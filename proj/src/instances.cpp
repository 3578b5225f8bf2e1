#include "riskdp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "riskdp/errors.hpp"

namespace riskdp {

namespace {

int draw_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double draw_real(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1p-53;
}

// Positive masses summing to 1, each a multiple of 1/grain: differences of
// `parts - 1` distinct cuts in (0, grain).
std::vector<double> dyadic_masses(std::mt19937_64& rng, int parts, int grain) {
    if (parts > grain) throw Error("more mass parts than grain steps");
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < parts - 1) {
        int c = draw_int(rng, 1, grain - 1);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    cuts.push_back(0);
    cuts.push_back(grain);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w(static_cast<std::size_t>(parts));
    for (int i = 0; i < parts; ++i)
        w[static_cast<std::size_t>(i)] =
            static_cast<double>(cuts[static_cast<std::size_t>(i) + 1] -
                                cuts[static_cast<std::size_t>(i)]) /
            grain;
    return w;
}

} // namespace

Mdp random_mdp(std::uint64_t seed, const RandomMdpParams& params) {
    if (params.min_states < 1 || params.max_states < params.min_states ||
        params.max_states > 9 || params.min_actions < 1 ||
        params.max_actions < params.min_actions || params.max_actions > 9)
        throw Error("state and action counts must lie in 1..9");
    std::mt19937_64 rng(seed);
    const int S = draw_int(rng, params.min_states, params.max_states);
    const int A = draw_int(rng, params.min_actions, params.max_actions);

    std::vector<std::string> states, actions;
    for (int s = 0; s < S; ++s) states.push_back("s" + std::to_string(s + 1));
    for (int a = 0; a < A; ++a) actions.push_back("a" + std::to_string(a + 1));
    Mdp m(std::move(states), std::move(actions), params.horizon);

    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            // Random successor support, never empty.
            std::vector<int> supp;
            for (int sp = 0; sp < S; ++sp)
                if (rng() & 1) supp.push_back(sp);
            if (supp.empty()) supp.push_back(draw_int(rng, 0, S - 1));
            auto w = dyadic_masses(rng, static_cast<int>(supp.size()),
                                   params.mass_grain);
            for (std::size_t i = 0; i < supp.size(); ++i) {
                m.set_transition(s, a, supp[i], w[i]);
                double r = params.integer_rewards
                               ? static_cast<double>(
                                     draw_int(rng, static_cast<int>(params.reward_lo),
                                              static_cast<int>(params.reward_hi)))
                               : draw_real(rng, params.reward_lo, params.reward_hi);
                m.set_reward(s, a, supp[i], r);
            }
        }
    }
    m.set_initial(dyadic_masses(rng, S, params.mass_grain));
    return m;
}

FiniteDistribution random_distribution(std::uint64_t seed, int max_atoms, double lo,
                                       double hi) {
    std::mt19937_64 rng(seed);
    const int n = draw_int(rng, 1, max_atoms);
    auto ps = dyadic_masses(rng, n, 64);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = draw_real(rng, lo, hi);
    return make_distribution(std::move(xs), std::move(ps));
}

} // namespace riskdp
