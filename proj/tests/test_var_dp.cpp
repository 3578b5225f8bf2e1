#include <doctest.h>

#include <cmath>
#include <limits>

#include "riskdp/var_dp.hpp"

using namespace riskdp;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Mdp make_mc() {
    Mdp m({"s1", "s2"}, {"a1", "a2"}, 1);
    m.set_transition(0, 0, 0, 0.4);
    m.set_reward(0, 0, 0, -50.0);
    m.set_transition(0, 0, 1, 0.6);
    m.set_reward(0, 0, 1, 100.0);
    m.set_transition(0, 1, 0, 0.5);
    m.set_transition(0, 1, 1, 0.5);
    m.set_transition(1, 0, 0, 0.5);
    m.set_reward(1, 0, 0, 10.0);
    m.set_transition(1, 0, 1, 0.5);
    m.set_reward(1, 0, 1, 10.0);
    m.set_available(1, {0});
    m.set_initial({0.5, 0.5});
    return m;
}

// Two stages, single action: s1 splits evenly between staying (reward 0) and
// moving to the absorbing s2 (reward 1); s2 pays nothing. Started in s1 the
// return is Bernoulli-like: {0: 1/4, 1: 3/4}.
Mdp make_chain() {
    Mdp m({"s1", "s2"}, {"a1"}, 2);
    m.set_transition(0, 0, 0, 0.5);
    m.set_transition(0, 0, 1, 0.5);
    m.set_reward(0, 0, 1, 1.0);
    m.set_transition(1, 0, 1, 1.0);
    m.set_initial({1.0, 0.0});
    return m;
}

} // namespace

TEST_CASE("uniform level grids require an integral number of steps") {
    auto g = AlphaGrid::uniform(0.25);
    REQUIRE(g.size() == 5);
    CHECK(g.levels.front() == 0.0);
    CHECK(g.levels[2] == 0.5);
    CHECK(g.levels.back() == 1.0);
    CHECK_THROWS_AS(AlphaGrid::uniform(0.3), Error);
    CHECK_THROWS_AS(AlphaGrid::uniform(0.0), Error);

    AlphaGrid bad;
    bad.levels = {0.1, 0.5, 1.0};
    CHECK_THROWS_AS(var_dp_horizon(make_mc(), RiskLevel(0.5), bad), Error);
}

TEST_CASE("one-stage DP reproduces the exhaustive VaR optimum") {
    auto m = make_mc();
    auto grid = AlphaGrid::uniform(0.1);
    // Exhaustive values over the two stationary policies:
    //   risky mixture {-50:.2, 10:.5, 100:.3}, flat mixture {0:.5, 10:.5}.
    const double expect[][2] = {{0.0, 0.0}, {0.1, 0.0}, {0.5, 10.0}, {0.9, 100.0}};
    for (auto [a, v] : expect) {
        auto res = var_dp_horizon(m, RiskLevel(a), grid);
        CHECK(res.v0 == v);
    }
    CHECK(var_dp_horizon(m, RiskLevel(1.0), grid).v0 == kInf);

    // Query levels are used exactly, not snapped to the grid: at 0.15 the
    // cheapest way to reach 10 costs 0.2, so the optimum stays at 0.
    CHECK(var_dp_horizon(m, RiskLevel(0.15), grid).v0 == 0.0);

    // v0 is monotone in the level.
    double prev = -kInf;
    for (int k = 0; k <= 10; ++k) {
        double v = var_dp_horizon(m, RiskLevel(k / 10.0), grid).v0;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("two-stage chain: exact value, witness, and extracted policy") {
    auto m = make_chain();
    auto res = var_dp_horizon(m, RiskLevel(0.25), AlphaGrid::uniform(0.25));
    CHECK(res.v0 == 1.0);

    // Minimal certifying level at the only initial state is the full budget.
    CHECK(res.initial_levels[0] == 0.25);
    CHECK(res.initial_allocation.weights[0] + res.initial_allocation.weights[1] ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Stage-1 cell spends level 1/2 on staying and 0 on the jump branch.
    REQUIRE(res.policy.policy.choice.size() == 3);
    CHECK(res.policy.policy.action_at({0}) == 0);
    CHECK(res.policy.levels.at({0}) == 0.25);
    CHECK(res.policy.levels.at({0, 0, 0}) == 0.5);
    CHECK(res.policy.levels.at({0, 0, 1}) == 0.0);

    // The extracted policy certifies v0: VaR of its return at the query level.
    auto dist = return_distribution(m, res.policy.policy);
    CHECK(var(dist, RiskLevel(0.25)) == 1.0);

    // Below the reachable tail mass the threshold drops to 0.
    CHECK(var_dp_horizon(m, RiskLevel(0.2), AlphaGrid::uniform(0.25)).v0 == 0.0);

    // A grid that cannot represent the 1/4 tail snaps downward, never up.
    auto coarse = var_dp_horizon(m, RiskLevel(0.25), AlphaGrid::uniform(1.0 / 3.0));
    CHECK(coarse.v0 <= 1.0);

    // Finer grids refine the same answer.
    CHECK(var_dp_horizon(m, RiskLevel(0.25), AlphaGrid::uniform(1.0 / 512.0)).v0 ==
          1.0);
}
