#include <doctest.h>

#include <cmath>
#include <limits>

#include "riskdp/decomposition.hpp"

using namespace riskdp;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Two states; s1 chooses between a risky bet (-50/.4, +100/.6) and a flat 0,
// s2 pays 10 surely. Initial mass is split evenly.
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

// Bernoulli mixture: s1 returns 1 surely, s2 returns 0 surely.
Mdp make_me() {
    Mdp m({"s1", "s2"}, {"a1"}, 1);
    m.set_transition(0, 0, 0, 0.5);
    m.set_reward(0, 0, 0, 1.0);
    m.set_transition(0, 0, 1, 0.5);
    m.set_reward(0, 0, 1, 1.0);
    m.set_transition(1, 0, 0, 0.5);
    m.set_transition(1, 0, 1, 0.5);
    m.set_initial({0.5, 0.5});
    return m;
}

double recombined(const DecompositionReport& rep) {
    double v = 0.0;
    for (std::size_t s = 0; s < rep.allocation.weights.size(); ++s)
        v += rep.allocation.weights[s] * rep.inner_values[s];
    return v;
}

} // namespace

TEST_CASE("CVaR evaluation decomposition is exact for both stationary policies") {
    auto m = make_mc();
    DecompositionOptions opt;
    opt.method = CvarMethod::ExactTwoState;

    // Risky policy: theta(z) = max(10 - 60 z, 90 z - 50), minimized at the
    // tail knot z = 0.4 with value -14 = CVaR of the mixture.
    auto risky = cvar_eval_decomposition(m, DeterministicPolicy{{0, 0}}, RiskLevel(0.5),
                                         opt);
    CHECK(risky.value == doctest::Approx(-14.0).epsilon(1e-12));
    CHECK(risky.oracle_value == doctest::Approx(-14.0).epsilon(1e-12));
    CHECK(std::fabs(risky.oracle_gap) <= 1e-9);
    CHECK(risky.allocation.weights[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(recombined(risky) == doctest::Approx(risky.value).epsilon(1e-12));

    // Flat policy: theta(z) = 10 - 10 z, minimized at the right endpoint.
    auto flat = cvar_eval_decomposition(m, DeterministicPolicy{{1, 0}}, RiskLevel(0.5),
                                        opt);
    CHECK(flat.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(flat.oracle_gap) <= 1e-9);
    CHECK(flat.allocation.weights[0] == doctest::Approx(1.0).epsilon(1e-12));

    // The grid path with refinement lands on the same minimizer.
    DecompositionOptions gridded;
    gridded.h = 1e-3;
    auto g = cvar_eval_decomposition(m, DeterministicPolicy{{0, 0}}, RiskLevel(0.5),
                                     gridded);
    CHECK(g.value == doctest::Approx(-14.0).epsilon(1e-6));
}

TEST_CASE("CVaR optimization decomposition overshoots the best policy by 4") {
    auto m = make_mc();
    DecompositionOptions opt;
    opt.method = CvarMethod::ExactTwoState;
    auto rep = cvar_opt_decomposition(m, RiskLevel(0.5), opt);

    // Inner-max envelope: state s1 contributes max(0, 100 z - 60), state s2
    // contributes 10 (1 - z); the minimum sits at the crossing z = 0.6 with
    // value 4, while the best stationary policy only reaches CVaR 0.
    CHECK(rep.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.oracle_value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.oracle_gap == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.allocation.weights[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(recombined(rep) == doctest::Approx(4.0).epsilon(1e-12));

    // At the crossing both actions in s1 tie at 0; ties keep the lower index.
    CHECK(rep.inner_actions[0] == 0);
    CHECK(rep.inner_actions[1] == 0);

    DecompositionOptions gridded;
    gridded.h = 1e-3;
    auto g = cvar_opt_decomposition(m, RiskLevel(0.5), gridded);
    CHECK(g.value == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(g.oracle_gap > 3.9);
}

TEST_CASE("theta samples the capped simplex line of the evaluation objective") {
    auto m = make_mc();
    DeterministicPolicy risky{{0, 0}};
    CHECK(theta_value(m, risky, RiskLevel(0.5), 0.4) ==
          doctest::Approx(-14.0).epsilon(1e-12));
    CHECK(theta_value(m, risky, RiskLevel(0.5), 0.0) ==
          doctest::Approx(10.0).epsilon(1e-12));
    CHECK(theta_value(m, risky, RiskLevel(0.5), 1.0) ==
          doctest::Approx(40.0).epsilon(1e-12));

    auto curve = theta_curve(m, risky, RiskLevel(0.5), 5);
    REQUIRE(curve.size() == 5);
    const double expect[] = {10.0, -5.0, -5.0, 17.5, 40.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(curve[i].zeta1 == doctest::Approx(0.25 * i).epsilon(1e-12));
        CHECK(curve[i].theta == doctest::Approx(expect[i]).epsilon(1e-12));
    }

    DeterministicPolicy flat{{1, 0}};
    for (double z : {0.0, 0.25, 0.5, 0.75, 1.0})
        CHECK(theta_value(m, flat, RiskLevel(0.5), z) ==
              doctest::Approx(10.0 - 10.0 * z).epsilon(1e-12));

    CHECK_THROWS_AS(theta_value(m, risky, RiskLevel(0.5), 1.5), Error);
    Mdp three({"x", "y", "z"}, {"a"}, 1);
    CHECK_THROWS_AS(theta_value(three, DeterministicPolicy{{0, 0, 0}}, RiskLevel(0.5),
                                0.5),
                    NotTwoStates);
}

TEST_CASE("entropic decompositions on the Bernoulli mixture") {
    auto m = make_me();
    DeterministicPolicy pi{{0, 0}};
    const double golden = 0.14027650699746483; // EVaR_{3/4} of a fair 0/1 coin
    DecompositionOptions opt;
    opt.h = 1e-2;

    auto ni = evar_ni_decomposition(m, pi, RiskLevel(0.75), opt);
    // Conditional returns are constants, so the objective is xi_1 itself and
    // the KL ball lets it drop only to the simplex cap 1/3.
    CHECK(ni.value >= 1.0 / 3.0 - 1e-9);
    CHECK(ni.value <= 1.0 / 3.0 + 1e-6);
    CHECK(ni.oracle_value == doctest::Approx(golden).epsilon(1e-9));
    CHECK(ni.value - ni.oracle_value > 1e-3); // strict overestimation

    auto fixed = evar_corrected_decomposition(m, pi, RiskLevel(0.75), opt);
    CHECK(std::fabs(fixed.value - golden) <= 2e-3);
    CHECK(std::fabs(fixed.oracle_gap) <= 2e-3);
    CHECK(ni.value >= fixed.value - 1e-9);
    CHECK(recombined(fixed) == doctest::Approx(fixed.value).epsilon(1e-9));

    // CVaR of the same mixture for scale: exactly 1/3 via the two-knot path.
    DecompositionOptions exact;
    exact.method = CvarMethod::ExactTwoState;
    auto cv = cvar_eval_decomposition(m, pi, RiskLevel(0.75), exact);
    CHECK(cv.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("VaR decomposition matches the mixture quantile exactly") {
    auto me = make_me();
    DeterministicPolicy pi{{0, 0}};

    auto rep = var_decomposition(me, pi, RiskLevel(0.5));
    CHECK(rep.value == 1.0);
    CHECK(rep.oracle_value == 1.0);
    CHECK(rep.oracle_gap == 0.0);
    double wsum = rep.allocation.weights[0] + rep.allocation.weights[1];
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    // Participating states (level < 1) recombine through the min.
    double lo = kInf;
    for (std::size_t s = 0; s < 2; ++s)
        if (rep.inner_levels[s] < 1.0) lo = std::min(lo, rep.inner_values[s]);
    CHECK(lo == 1.0);

    auto full = var_decomposition(me, pi, RiskLevel(1.0));
    CHECK(full.value == kInf);
    CHECK(full.oracle_gap == 0.0);

    auto zero = var_decomposition(me, pi, RiskLevel(0.0));
    CHECK(zero.value == 0.0); // essential infimum of the mixture
    CHECK(zero.oracle_gap == 0.0);
}

TEST_CASE("VaR optimization decomposition keeps the interchange exact") {
    auto mc = make_mc();
    auto rep = var_opt_decomposition(mc, RiskLevel(0.5));
    // Both stationary policies reach VaR 10; the per-state threshold scan
    // picks the risky action in s1 (smaller tail below 10: 0.4 vs 1).
    CHECK(rep.value == 10.0);
    CHECK(rep.oracle_value == 10.0);
    CHECK(rep.oracle_gap == 0.0);
    CHECK(rep.inner_actions[0] == 0);
    double lo = kInf;
    for (std::size_t s = 0; s < 2; ++s)
        if (rep.inner_levels[s] < 1.0) lo = std::min(lo, rep.inner_values[s]);
    CHECK(lo == 10.0);

    auto hi = var_opt_decomposition(mc, RiskLevel(0.9));
    CHECK(hi.value == 100.0);
    CHECK(hi.oracle_gap == 0.0);
}

TEST_CASE("quantile optimization uses the strict-sum box") {
    auto me = make_me();
    auto rep = quantile_opt_decomposition(me, RiskLevel(0.5));
    CHECK(rep.value == 0.0);
    CHECK(rep.oracle_value == 0.0);
    CHECK(rep.oracle_gap == 0.0);
    // Bumped witness: every level sits strictly inside (0, 1) and the sum
    // constraint stays strict.
    double dot = 0.0;
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(rep.inner_levels[s] > 0.0);
        CHECK(rep.inner_levels[s] < 1.0);
        dot += me.initial()[s] * rep.inner_levels[s];
    }
    CHECK(dot < 0.5);
    double lo = kInf;
    for (std::size_t s = 0; s < 2; ++s)
        if (rep.inner_levels[s] < 1.0) lo = std::min(lo, rep.inner_values[s]);
    CHECK(lo == 0.0);

    auto zero = quantile_opt_decomposition(me, RiskLevel(0.0));
    CHECK(zero.value == -kInf);
    CHECK(zero.oracle_gap == 0.0);
}
