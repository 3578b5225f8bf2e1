#pragma once

#include <optional>
#include <vector>

#include "riskdp/distribution.hpp"
#include "riskdp/errors.hpp"

namespace riskdp {

// Risk level alpha in [0, 1]. Construction validates the range once so the
// measure implementations can use the raw double freely.
class RiskLevel {
public:
    explicit RiskLevel(double alpha) : alpha_(alpha) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw BadRiskLevel("risk level must lie in [0, 1]");
    }
    double value() const { return alpha_; }

private:
    double alpha_;
};

// Extended reals are represented as plain doubles: +infinity appears only
// as VaR at alpha = 1 (and DP values derived from it), -infinity only as
// the lower quantile at alpha = 0. NaN never appears in any result.

// Upper quantile  VaR_alpha(x) = sup{ z : P(x < z) <= alpha }.
// Thresholds compare with plain floating <=; +infinity at alpha = 1.
double var(const FiniteDistribution& d, RiskLevel alpha);

// Lower quantile  Q_alpha(x) = inf{ z : P(x <= z) >= alpha }.
// -infinity at alpha = 0.
double lower_quantile(const FiniteDistribution& d, RiskLevel alpha);

// Conditional value-at-risk, dual form min{ xi.x : xi in simplex,
// alpha*xi <= p }. Computed exactly by averaging the lower tail with a
// fractional boundary atom. CVaR_0 = ess inf, CVaR_1 = mean.
double cvar(const FiniteDistribution& d, RiskLevel alpha);

struct EvarOptions {
    double beta_min_scale = 1e-8; // initial bracket = [min,max scale]/range
    double beta_max_scale = 1e4;
    double beta_tol = 1e-10;      // golden-section interval tolerance on beta
    double value_tol = 1e-9;      // early-stop tolerance on the objective
    bool with_dual = false;       // also solve the KL-ball dual as a cross-check
    double dual_grid_step = 1e-3; // simplex grid step for the dual search
};

struct EvarResult {
    double value = 0.0;
    // Maximizing beta of the primal; absent when a closed form applied
    // (alpha in {0, 1}, single atom, or alpha <= smallest atom mass, where
    // the supremum is approached only as beta -> infinity).
    std::optional<double> beta_star;
    // Independent KL-ball dual value, present when options.with_dual.
    std::optional<double> dual_value;
};

// Entropic value-at-risk, primal form
//   EVaR_alpha(x) = sup_{beta>0} -(1/beta) * log( E[exp(-beta x)] / alpha ).
// The log-sum-exp is stabilized by shifting outcomes by their minimum, which
// keeps every exponent in (0, 1] and the sum in [p_min, 1]. EVaR_0 = ess inf,
// EVaR_1 = mean, and EVaR_alpha = ess inf exactly when alpha <= p_min.
EvarResult evar(const FiniteDistribution& d, RiskLevel alpha,
                const EvarOptions& options = {});

// KL divergence sum_i p_i log(p_i / q_i) between same-length weight vectors;
// +infinity when p puts mass where q does not; 0 log 0 = 0.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

} // namespace riskdp
