#pragma once

#include <string>
#include <vector>

namespace riskdp {

// One end-to-end verification check: a named pass/fail verdict with a short
// numeric summary and the wall-clock time the check took. Checks that carry
// a runtime budget fold "fast enough" into `pass`.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Individual checks, exposed so the CLI can run a subset by name.
CheckResult check_cvar_opt_two_state_gap();
CheckResult check_theta_curve_anchors();
CheckResult check_cvar_eval_random();
CheckResult check_entropic_gap_anchors();
CheckResult check_corrected_entropic_random();
CheckResult check_threshold_exactness_random();
CheckResult check_action_window_sweep();
CheckResult check_horizon_dp_random();
CheckResult check_measure_axioms_random();

// The full battery, in a fixed order. Pure computation: callers decide how
// to render the results.
std::vector<CheckResult> run_acceptance_suite();

} // namespace riskdp
