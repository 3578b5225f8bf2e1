#pragma once

#include <vector>

#include "riskdp/errors.hpp"

namespace riskdp {

// Constraint families for risk-budget allocations over states.
//
//   SimplexCapped     zeta in simplex, alpha*zeta_s <= phat_s        (Z_C)
//   KlCapped          Z_C plus sum zeta_s log(zeta_s/phat_s) <= -log alpha  (Z_E)
//   KlRelative        xi in simplex, xi << phat,
//                     sum xi_s (log(xi_s/phat_s) - log zeta_s) <= -log alpha,
//                     for a fixed per-state level vector zeta in (0,1]^S
//   Box01StrictSum    zeta in [0,1]^S, sum zeta_s phat_s < alpha (strict)
//   SimplexCappedSup  same set as SimplexCapped; the name records that the
//                     enclosing problem maximizes over it
enum class AllocationMode {
    SimplexCapped,
    KlCapped,
    KlRelative,
    Box01StrictSum,
    SimplexCappedSup,
};

const char* allocation_mode_name(AllocationMode mode);

// A constraint set instance: mode plus its data. phat is the reference
// weight vector (initial state distribution); zeta is used by KlRelative.
struct FeasibleSet {
    AllocationMode mode;
    double alpha = 0.0;
    std::vector<double> phat;
    std::vector<double> zeta; // KlRelative only

    std::size_t dim() const { return phat.size(); }
    bool simplex_constrained() const { return mode != AllocationMode::Box01StrictSum; }

    // Membership at tolerance tol (1e-12 in the decompositions). The strict
    // inequality of Box01StrictSum is checked without slack.
    bool feasible(const std::vector<double>& w, double tol = 1e-12) const;
};

// Optimizer output: the chosen weights plus the constraint family they
// satisfy, as reported in decomposition results.
struct RiskAllocation {
    std::vector<double> weights;
    AllocationMode mode = AllocationMode::SimplexCapped;
};

} // namespace riskdp
