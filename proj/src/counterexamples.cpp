#include "riskdp/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskdp/oracle.hpp"

namespace riskdp {

Mdp make_cvar_gap_mdp() {
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

Mdp make_evar_gap_mdp() {
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

Mdp make_action_window_mdp(double magnitude, double p_s2) {
    Mdp m({"s1", "s2"}, {"a1", "a2", "a3"}, 1);
    // a1: heavy symmetric bet whose loss scales with the magnitude.
    m.set_transition(0, 0, 0, 0.25);
    m.set_reward(0, 0, 0, -magnitude);
    m.set_transition(0, 0, 1, 0.75);
    m.set_reward(0, 0, 1, magnitude);
    // a2: flat zero.
    m.set_transition(0, 1, 0, 0.5);
    m.set_transition(0, 1, 1, 0.5);
    // a3: moderate bet, optimal on an intermediate level window.
    m.set_transition(0, 2, 0, 0.5);
    m.set_reward(0, 2, 0, -100.0);
    m.set_transition(0, 2, 1, 0.5);
    m.set_reward(0, 2, 1, 400.0);
    // s2: sure payoff.
    m.set_transition(1, 0, 0, 0.5);
    m.set_reward(1, 0, 0, 200.0);
    m.set_transition(1, 0, 1, 0.5);
    m.set_reward(1, 0, 1, 200.0);
    m.set_available(1, {0});
    m.set_initial({1.0 - p_s2, p_s2});
    return m;
}

CvarGapReport verify_cvar_gap(double h) {
    auto m = make_cvar_gap_mdp();
    CvarGapReport rep;
    DecompositionOptions exact;
    exact.method = CvarMethod::ExactTwoState;
    rep.exact_report = cvar_opt_decomposition(m, RiskLevel(0.5), exact);
    DecompositionOptions gridded;
    gridded.h = h;
    rep.grid_report = cvar_opt_decomposition(m, RiskLevel(0.5), gridded);
    rep.oracle = rep.exact_report.oracle_value;
    rep.exact_value = rep.exact_report.value;
    rep.grid_value = rep.grid_report.value;
    rep.gap = rep.exact_value - rep.oracle;
    return rep;
}

EntropicGapReport verify_evar_gap(double h) {
    auto m = make_evar_gap_mdp();
    DeterministicPolicy pi{{0, 0}};
    EntropicGapReport rep;

    DecompositionOptions exact;
    exact.method = CvarMethod::ExactTwoState;
    rep.cvar_value = cvar_eval_decomposition(m, pi, RiskLevel(0.75), exact).value;

    DecompositionOptions opts;
    opts.h = h;
    rep.ball_report = evar_ni_decomposition(m, pi, RiskLevel(0.75), opts);
    rep.corrected_report = evar_corrected_decomposition(m, pi, RiskLevel(0.75), opts);
    rep.ball_value = rep.ball_report.value;
    rep.corrected_value = rep.corrected_report.value;
    rep.evar_value = rep.ball_report.oracle_value;

    EvarOptions with_dual;
    with_dual.with_dual = true;
    auto pd = evar(return_distribution(m, pi), RiskLevel(0.75), with_dual);
    rep.primal_dual_gap = std::fabs(pd.value - pd.dual_value.value());
    return rep;
}

namespace {

// Optimal action in the first state at this level (first attaining on ties).
int oracle_action(const Mdp& m, RiskLevel alpha, double* value) {
    auto best = optimize_stationary(m, Measure::CVaR, alpha);
    if (value) *value = best.value;
    return best.policy.action[0];
}

} // namespace

SweepResult sweep_alpha(double magnitude, double p_s2,
                        const std::vector<double>& alphas) {
    auto m = make_action_window_mdp(magnitude, p_s2);
    SweepResult out;
    out.magnitude = magnitude;
    out.p_s2 = p_s2;

    DecompositionOptions exact;
    exact.method = CvarMethod::ExactTwoState;
    for (double a : alphas) {
        SweepRow row;
        row.alpha = a;
        auto rep = cvar_opt_decomposition(m, RiskLevel(a), exact);
        row.decomposition = rep.value;
        row.oracle = rep.oracle_value;
        row.oracle_action = oracle_action(m, RiskLevel(a), nullptr);
        row.greedy_action = rep.inner_actions[0];
        DeterministicPolicy greedy{{row.greedy_action, 0}};
        row.realized = cvar(return_distribution(m, greedy), RiskLevel(a));
        out.rows.push_back(row);
    }

    // Level window where the moderate bet is the exhaustive optimum: locate
    // it on a coarse scan, then bisect both boundaries. The window is an
    // interval because the per-policy CVaR curves cross at most once on
    // either side of it.
    const int middle = 2;
    const int kScan = 256;
    auto is_middle = [&](double a) { return oracle_action(m, RiskLevel(a), nullptr) == middle; };
    int first = -1, last = -1;
    for (int k = 1; k < kScan; ++k) {
        if (is_middle(static_cast<double>(k) / kScan)) {
            if (first < 0) first = k;
            last = k;
        }
    }
    if (first < 0) {
        out.window_lo = std::numeric_limits<double>::quiet_NaN();
        out.window_hi = std::numeric_limits<double>::quiet_NaN();
    } else {
        auto bisect = [&](double in, double not_in) {
            for (int it = 0; it < 60 && std::fabs(in - not_in) > 1e-9; ++it) {
                double mid = 0.5 * (in + not_in);
                (is_middle(mid) ? in : not_in) = mid;
            }
            return 0.5 * (in + not_in);
        };
        out.window_lo = bisect(static_cast<double>(first) / kScan,
                               static_cast<double>(first - 1) / kScan);
        out.window_hi = bisect(static_cast<double>(last) / kScan,
                               static_cast<double>(last + 1) / kScan);
    }

    // Greedy envelope check, independent of alpha: the inner objective in
    // the first state is (phat/alpha) * u CVaR_u(d_a), so the greedy choice
    // at inner level u maximizes u CVaR_u(d_a) over the three actions.
    std::vector<FiniteDistribution> arms;
    for (int a : m.available(0)) {
        std::vector<double> xs, ps;
        for (int sp = 0; sp < m.num_states(); ++sp)
            if (m.p(0, a, sp) > 0.0) {
                xs.push_back(m.r(0, a, sp));
                ps.push_back(m.p(0, a, sp));
            }
        arms.push_back(make_distribution(std::move(xs), std::move(ps)));
    }
    for (int k = 1; k <= 1024 && !out.greedy_ever_middle; ++k) {
        double u = static_cast<double>(k) / 1024;
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (std::size_t a = 0; a < arms.size(); ++a) {
            double v = u * cvar(arms[a], RiskLevel(u));
            if (v > best) {
                best = v;
                best_a = static_cast<int>(a);
            }
        }
        if (best_a == middle) out.greedy_ever_middle = true;
    }
    return out;
}

} // namespace riskdp
