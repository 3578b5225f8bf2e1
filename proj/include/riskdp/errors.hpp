#pragma once

#include <stdexcept>
#include <string>

namespace riskdp {

// All library errors derive from Error so callers can catch one type.
// Input problems (bad mass, malformed documents) and resource guards
// (enumeration explosion) are separated from internal numeric failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Distribution outcomes must be finite reals.
struct NonFiniteOutcome : Error {
    using Error::Error;
};

// Probability vector violates nonnegativity or deviates from unit mass
// by more than the admission tolerance (1e-9).
struct BadMass : Error {
    using Error::Error;
};

// Risk level outside [0, 1].
struct BadRiskLevel : Error {
    using Error::Error;
};

// EVaR golden-section bracket could not be closed: the objective is still
// rising at the largest admissible beta, which signals a numeric range
// problem (the analytic non-attainment case alpha <= p_min is handled in
// closed form before the solver runs).
struct BracketFailure : Error {
    using Error::Error;
};

// Exhaustive enumeration (policies or return atoms) would exceed the
// configured budget.
struct ExplosionGuard : Error {
    using Error::Error;
};

// A lattice scan found no feasible point (and no seeded candidate was
// feasible either). For the strict-sum box mode this is the alpha = 0
// case, which callers report as -infinity.
struct EmptyFeasibleSet : Error {
    using Error::Error;
};

// Monotonicity repair on a DP value grid moved a value by more than the
// declared tolerance: the alpha grid is too coarse for the instance.
struct GridTooCoarse : Error {
    using Error::Error;
};

// Curve sampling along the 1-D simplex parameterization requires S = 2.
struct NotTwoStates : Error {
    using Error::Error;
};

// Malformed input document (JSON schema violation, unknown key, duplicate
// entry, bad reference).
struct ParseError : Error {
    using Error::Error;
};

// A verified counterexample property failed to hold at its tolerance.
struct AssertionFailure : Error {
    using Error::Error;
};

} // namespace riskdp
