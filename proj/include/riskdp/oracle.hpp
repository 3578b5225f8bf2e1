#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskdp/mdp.hpp"
#include "riskdp/risk_measures.hpp"

namespace riskdp {

enum class Measure { VaR, CVaR, EVaR, Quantile };

const char* measure_name(Measure m); // "var", "cvar", "evar", "quantile"

// Risk functional applied to a finite return distribution.
double measure_value(const FiniteDistribution& d, Measure m, RiskLevel alpha,
                     const EvarOptions& evar_opts = {});

// Exhaustive evaluation of one policy: build the exact return distribution
// and apply the measure.
double evaluate_policy(const Mdp& m, const DeterministicPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts = {},
                       std::int64_t atom_budget = kDefaultAtomBudget);
double evaluate_policy(const Mdp& m, const RandomizedPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts = {},
                       std::int64_t atom_budget = kDefaultAtomBudget);
double evaluate_policy(const Mdp& m, const HistoryPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts = {},
                       std::int64_t atom_budget = kDefaultAtomBudget);

// Brute-force optimum over stationary deterministic policies (the optimal
// class for one-stage models). Ties keep the first policy in enumeration
// order; policy_values holds every enumerated value in that order.
struct StationaryOracle {
    double value = 0.0;
    std::size_t policy_index = 0;
    DeterministicPolicy policy;
    std::vector<double> policy_values;
};
StationaryOracle optimize_stationary(const Mdp& m, Measure measure, RiskLevel alpha,
                                     const EvarOptions& evar_opts = {},
                                     std::int64_t atom_budget = kDefaultAtomBudget);

// Brute-force optimum over deterministic history-dependent policies, the
// optimal class for any horizon. For one-stage models this coincides with
// the stationary oracle restricted to initial states.
struct ExhaustiveOracle {
    double value = 0.0;
    std::size_t policy_index = 0;
    HistoryPolicy policy;
    std::vector<double> policy_values;
};
ExhaustiveOracle optimize_exhaustive(const Mdp& m, Measure measure, RiskLevel alpha,
                                     const EvarOptions& evar_opts = {},
                                     std::int64_t atom_budget = kDefaultAtomBudget);

} // namespace riskdp
