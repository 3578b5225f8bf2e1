#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskdp/allocation.hpp"
#include "riskdp/lattice.hpp"
#include "riskdp/mdp.hpp"
#include "riskdp/risk_measures.hpp"

namespace riskdp {

// How the CVaR schemes optimize over the allocation set.
//   Grid          lattice sweep at step h plus optional pattern-search polish
//   ExactTwoState S = 2 only: the per-state curves zeta * CVaR_{alpha
//                 zeta/phat}(d) are piecewise linear with knots at scaled
//                 cumulative masses, so the optimum is found exactly at a
//                 knot, an action-envelope crossing, or an interval endpoint
enum class CvarMethod { Grid, ExactTwoState };

struct DecompositionOptions {
    double h = 1e-3;          // lattice step for grid searches
    bool refine = true;       // pattern-search polish after the sweep
    CvarMethod method = CvarMethod::Grid;
    RunMode run_mode = RunMode::Auto;
    std::int64_t atom_budget = kDefaultAtomBudget;
    EvarOptions evar;         // inner EVaR solver settings
};

// Result of one decomposition run. `value` is the decomposed objective;
// oracle_value is the exact risk of the relevant return distribution
// (evaluation schemes) or the brute-force optimum over deterministic
// policies (optimization schemes); oracle_gap = value - oracle_value.
//
// Recombination invariants, checked by tests:
//   weighted schemes  value = sum_s allocation.weights[s] * inner_values[s]
//   quantile/var      value = min over participating states of inner_values
struct DecompositionReport {
    std::string scheme;
    double alpha = 0.0;
    double value = 0.0;
    RiskAllocation allocation;
    std::vector<double> inner_levels;  // per state: alpha*zeta_s/phat_s or zeta_s
    std::vector<double> inner_values;  // per state: inner risk at that level
    std::vector<int> inner_actions;    // optimization schemes; -1 elsewhere
    double oracle_value = 0.0;
    double oracle_gap = 0.0;
};

// Exact CVaR evaluation decomposition (one stage): the mixture CVaR equals
// the minimum over the capped simplex Z_C of
//   sum_s zeta_s CVaR_{alpha zeta_s / phat_s}(return | s).
// oracle_gap is the lattice/knot optimum minus the direct mixture CVaR;
// it is nonnegative up to grid error and vanishes as h -> 0.
DecompositionReport cvar_eval_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                            RiskLevel alpha,
                                            const DecompositionOptions& options = {});

// Risk-level CVaR "optimization" decomposition (inner maximization over
// deterministic actions per state). Generally a strict upper bound on the
// true optimal CVaR: the saddle point need not exist, so oracle_gap > 0 on
// the documented counterexamples.
DecompositionReport cvar_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                           const DecompositionOptions& options = {});

// theta_pi(zeta1) = zeta1 CVaR_{alpha zeta1/phat1}(d_{s1}) +
//                   (1-zeta1) CVaR_{alpha (1-zeta1)/phat2}(d_{s2})
// along the 1-D parameterization of the two-state simplex. Throws
// NotTwoStates otherwise; zeta must satisfy the Z_C caps.
double theta_value(const Mdp& m, const DeterministicPolicy& pi, RiskLevel alpha,
                   double zeta1, std::int64_t atom_budget = kDefaultAtomBudget);

struct ThetaSample {
    double zeta1 = 0.0;
    double theta = 0.0;
};
// Evenly spaced feasible zeta1 values (inclusive endpoints of the feasible
// interval), for curve reproduction.
std::vector<ThetaSample> theta_curve(const Mdp& m, const DeterministicPolicy& pi,
                                     RiskLevel alpha, int samples,
                                     std::int64_t atom_budget = kDefaultAtomBudget);

// EVaR decomposition over the KL-capped set Z_E (simplex cap plus
// sum xi_s log(xi_s/phat_s) <= -log alpha). Upper-bounds the mixture EVaR
// even for plain evaluation; the gap is strict on the documented
// counterexample.
DecompositionReport evar_ni_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                          RiskLevel alpha,
                                          const DecompositionOptions& options = {});

// Corrected EVaR decomposition: infimum over per-state levels
// zeta in (0,1]^S and weights xi in the relative-entropy set Z'_E(zeta) of
// sum_s xi_s EVaR_{zeta_s}(return | s). Recovers the mixture EVaR; the
// infimum may be approached rather than attained, so the report carries the
// best point found at the search resolution.
DecompositionReport evar_corrected_decomposition(const Mdp& m,
                                                 const DeterministicPolicy& pi,
                                                 RiskLevel alpha,
                                                 const DecompositionOptions& options = {});

// Exact VaR evaluation decomposition via threshold feasibility: z is
// achievable iff sum_s phat_s P(return < z | s) <= alpha. The witness
// allocation is reconstructed in tail-probability space, so oracle_gap is
// exactly zero.
DecompositionReport var_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                      RiskLevel alpha,
                                      std::int64_t atom_budget = kDefaultAtomBudget);

// Exact VaR optimization decomposition: the per-state inner maximization
// over actions commutes with the threshold test (z feasible iff
// sum_s phat_s min_a P(return < z | s, a) <= alpha).
DecompositionReport var_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                          std::int64_t atom_budget = kDefaultAtomBudget);

// Exact lower-quantile optimization decomposition: strict threshold
// (sum_s phat_s min_a P(< z) < alpha), box allocation with the states at
// level 1 excluded from the recombining minimum; -infinity at alpha = 0.
DecompositionReport quantile_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                               std::int64_t atom_budget = kDefaultAtomBudget);

} // namespace riskdp
