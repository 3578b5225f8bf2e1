#pragma once

#include <vector>

#include "riskdp/decomposition.hpp"
#include "riskdp/mdp.hpp"

namespace riskdp {

// Two-state, two-action model on which the CVaR optimization decomposition
// overshoots every stationary policy: the inner max is allowed to mix
// actions across allocation points no single policy can realize.
Mdp make_cvar_gap_mdp();

// Fair 0/1 mixture on which the plain KL-ball level reallocation tracks the
// CVaR value instead of the strictly smaller entropic value.
Mdp make_evar_gap_mdp();

// Three-action family: a1 is a heavy bet scaling with `magnitude`, a2 is
// flat, a3 is a fixed moderate bet. a3's optimal level window widens with
// the magnitude, yet the per-level greedy envelope never picks it, so the
// decomposition's recommendation misses it for every magnitude.
Mdp make_action_window_mdp(double magnitude, double p_s2);

struct CvarGapReport {
    double oracle = 0.0;      // best stationary CVaR
    double exact_value = 0.0; // breakpoint-exact decomposition value
    double grid_value = 0.0;  // lattice decomposition at step h
    double gap = 0.0;         // exact_value - oracle
    DecompositionReport exact_report;
    DecompositionReport grid_report;
};
CvarGapReport verify_cvar_gap(double h);

struct EntropicGapReport {
    double cvar_value = 0.0;      // exact CVaR decomposition of the mixture
    double ball_value = 0.0;      // KL-ball reallocation value
    double corrected_value = 0.0; // per-state level reallocation value
    double evar_value = 0.0;      // exhaustive EVaR of the mixture
    double primal_dual_gap = 0.0; // |primal - dual| on the mixture
    DecompositionReport ball_report;
    DecompositionReport corrected_report;
};
EntropicGapReport verify_evar_gap(double h);

struct SweepRow {
    double alpha = 0.0;
    double decomposition = 0.0; // breakpoint-exact decomposition value
    double oracle = 0.0;        // best stationary CVaR
    int oracle_action = -1;     // optimal action in the first state
    int greedy_action = -1;     // decomposition's inner action there
    double realized = 0.0;      // CVaR of the greedy stationary policy
};

struct SweepResult {
    double magnitude = 0.0;
    double p_s2 = 0.0;
    std::vector<SweepRow> rows;
    // Level window on which the moderate bet a3 is strictly optimal; NaN
    // when it is optimal nowhere on (0, 1).
    double window_lo = 0.0;
    double window_hi = 0.0;
    // Whether any level's greedy envelope ever selects a3.
    bool greedy_ever_middle = false;
};
SweepResult sweep_alpha(double magnitude, double p_s2,
                        const std::vector<double>& alphas);

} // namespace riskdp
