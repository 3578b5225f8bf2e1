#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "riskdp/risk_measures.hpp"

using namespace riskdp;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

// Mixture reached by the risk-seeking policy in the two-state evaluation
// counterexample: P(-50) = 0.2, P(10) = 0.5, P(100) = 0.3.
FiniteDistribution mix_pi1() {
    return make_distribution({-50.0, 10.0, 100.0}, {0.2, 0.5, 0.3});
}

FiniteDistribution bernoulli01() { return make_distribution({0.0, 1.0}, {0.5, 0.5}); }
} // namespace

TEST_CASE("upper quantile (VaR)") {
    auto d = mix_pi1();
    // P(x < 10) = 0.2 <= 0.5 and P(x < 100) = 0.7 > 0.5.
    CHECK(var(d, RiskLevel(0.5)) == 10.0);
    CHECK(var(d, RiskLevel(0.1)) == -50.0);
    CHECK(var(d, RiskLevel(0.2)) == 10.0);   // boundary: 0.2 <= 0.2
    CHECK(var(d, RiskLevel(0.7)) == 100.0);  // boundary: 0.7 <= 0.7
    CHECK(var(d, RiskLevel(1.0)) == kInf);
    CHECK(var(d, RiskLevel(0.0)) == -50.0);
    // Median pair on a fair coin: upper quantile picks the high atom.
    CHECK(var(bernoulli01(), RiskLevel(0.5)) == 1.0);
}

TEST_CASE("lower quantile") {
    auto d = mix_pi1();
    CHECK(lower_quantile(d, RiskLevel(0.0)) == -kInf);
    CHECK(lower_quantile(d, RiskLevel(0.2)) == -50.0); // P(x <= -50) = 0.2 >= 0.2
    CHECK(lower_quantile(d, RiskLevel(0.5)) == 10.0);
    CHECK(lower_quantile(d, RiskLevel(0.9)) == 100.0);
    CHECK(lower_quantile(d, RiskLevel(1.0)) == 100.0);
    CHECK(lower_quantile(bernoulli01(), RiskLevel(0.5)) == 0.0);
    // Lower never exceeds upper.
    for (double a : {0.1, 0.2, 0.35, 0.5, 0.7, 0.9})
        CHECK(lower_quantile(d, RiskLevel(a)) <= var(d, RiskLevel(a)));
}

TEST_CASE("cvar by sorted tail with fractional boundary atom") {
    auto d = mix_pi1();
    // 0.5-tail: all of -50 (0.2) plus 0.3 of the 10-atom: (-10 + 3)/0.5.
    CHECK(cvar(d, RiskLevel(0.5)) == doctest::Approx(-14.0).epsilon(1e-12));
    CHECK(cvar(d, RiskLevel(0.2)) == doctest::Approx(-50.0).epsilon(1e-12));
    CHECK(cvar(d, RiskLevel(0.25)) == doctest::Approx(-38.0).epsilon(1e-12));
    CHECK(cvar(d, RiskLevel(0.0)) == -50.0);                  // ess inf
    CHECK(cvar(d, RiskLevel(1.0)) == doctest::Approx(25.0)); // mean
    // Fair coin at 0.75: (0.5*0 + 0.25*1)/0.75 = 1/3, the counterexample value.
    CHECK(cvar(bernoulli01(), RiskLevel(0.75)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("kl divergence") {
    // (5/3) log 2 - log 3, the budget spent by the worst-case tilt (1/3, 2/3).
    double expected = (5.0 / 3.0) * std::log(2.0) - std::log(3.0);
    CHECK(kl_divergence({1.0 / 3.0, 2.0 / 3.0}, {0.5, 0.5}) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == 0.0);
    CHECK(kl_divergence({0.0, 1.0}, {0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Mass where the reference has none.
    CHECK(kl_divergence({0.5, 0.5}, {1.0, 0.0}) == kInf);
    // 0 log 0 = 0 on the other side.
    CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(kl_divergence({1.0}, {0.5, 0.5}), BadMass);
}

TEST_CASE("evar endpoints and closed forms") {
    auto d = mix_pi1();
    CHECK(evar(d, RiskLevel(0.0)).value == -50.0);
    CHECK(evar(d, RiskLevel(1.0)).value == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(!evar(d, RiskLevel(0.0)).beta_star.has_value());
    // alpha <= p_min: the point mass on the minimum is inside the KL ball.
    CHECK(evar(d, RiskLevel(0.2)).value == -50.0);
    CHECK(evar(d, RiskLevel(0.1)).value == -50.0);
    CHECK(!evar(d, RiskLevel(0.2)).beta_star.has_value());
    // Degenerate distribution at any level.
    auto point = make_distribution({3.0}, {1.0});
    CHECK(evar(point, RiskLevel(0.4)).value == 3.0);
}

TEST_CASE("evar primal agrees with the independent KL-ball dual") {
    EvarOptions opt;
    opt.with_dual = true;
    auto r = evar(bernoulli01(), RiskLevel(0.75), opt);
    REQUIRE(r.dual_value.has_value());
    CHECK(std::abs(r.value - *r.dual_value) <= 1e-6);
    // Strictly inside (ess inf, CVaR) at this level.
    CHECK(r.value > 0.0);
    CHECK(r.value < 1.0 / 3.0 - 1e-3);
    REQUIRE(r.beta_star.has_value());
    CHECK(*r.beta_star > 0.0);

    auto r2 = evar(mix_pi1(), RiskLevel(0.5), opt);
    REQUIRE(r2.dual_value.has_value());
    CHECK(std::abs(r2.value - *r2.dual_value) <= 1e-6 * 150.0);
}

TEST_CASE("evar golden value on the fair coin at 0.75") {
    // Frozen from the 1-D KL boundary solve: smallest w with
    // (1-w) log(2(1-w)) + w log(2w) = log(4/3); agrees with the primal
    // golden-section to ~1e-10. See the dual cross-check test above.
    auto r = evar(bernoulli01(), RiskLevel(0.75));
    CHECK(r.value == doctest::Approx(0.14027650699746483).epsilon(1e-7));
}

TEST_CASE("risk measure ordering and monotonicity on random distributions") {
    std::mt19937_64 rng(20260816ull);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> nat(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        int m = nat(rng);
        std::vector<double> xs, ws;
        for (int i = 0; i < m; ++i) {
            xs.push_back(-10.0 + 20.0 * u(rng));
            ws.push_back(0.05 + u(rng));
        }
        double tot = 0.0;
        for (double w : ws) tot += w;
        for (double& w : ws) w /= tot;
        auto d = make_distribution(xs, ws);

        double prev_var = -kInf, prev_cvar = -kInf, prev_evar = -kInf;
        for (int k = 0; k <= 10; ++k) {
            RiskLevel a(k / 10.0);
            double v = var(d, a);
            double c = cvar(d, a);
            double e = evar(d, a).value;
            double mean = d.mean();
            CHECK(d.min_outcome() <= e + 1e-9);
            CHECK(e <= c + 1e-9);
            CHECK(c <= std::min(mean, v) + 1e-9);
            CHECK(v >= prev_var);
            CHECK(c >= prev_cvar - 1e-12);
            CHECK(e >= prev_evar - 1e-7);
            prev_var = v;
            prev_cvar = c;
            prev_evar = e;
        }
    }
}

TEST_CASE("cvar and evar are cash invariant and positively homogeneous") {
    std::mt19937_64 rng(77ull);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> xs = {u(rng) * 4 - 2, u(rng) * 4 - 2, u(rng) * 4 + 1};
        std::vector<double> ws = {0.2 + 0.3 * u(rng), 0.2 + 0.3 * u(rng), 0.2};
        double tot = ws[0] + ws[1] + ws[2];
        for (double& w : ws) w /= tot;
        auto d = make_distribution(xs, ws);
        double lam = 0.5 + 2.0 * u(rng);
        double c = 4.0 * u(rng) - 2.0;
        std::vector<double> ys;
        for (double x : xs) ys.push_back(lam * x + c);
        auto dt = make_distribution(ys, ws);
        RiskLevel a(0.3 + 0.5 * u(rng));
        CHECK(cvar(dt, a) == doctest::Approx(lam * cvar(d, a) + c).epsilon(1e-10));
        CHECK(evar(dt, a).value ==
              doctest::Approx(lam * evar(d, a).value + c).epsilon(1e-8));
    }
}

TEST_CASE("risk level validation") {
    CHECK_THROWS_AS(RiskLevel(-0.1), BadRiskLevel);
    CHECK_THROWS_AS(RiskLevel(1.1), BadRiskLevel);
    CHECK_THROWS_AS(RiskLevel(std::nan("")), BadRiskLevel);
}

TEST_CASE("measures reject raw (unconsolidated) input") {
    FiniteDistribution raw({2.0, 1.0}, {0.5, 0.5}); // out of order
    CHECK_THROWS_AS(var(raw, RiskLevel(0.5)), BadMass);
    CHECK_THROWS_AS(cvar(raw, RiskLevel(0.5)), BadMass);
}
