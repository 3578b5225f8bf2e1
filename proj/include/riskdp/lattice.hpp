#pragma once

#include <functional>
#include <vector>

#include "riskdp/allocation.hpp"

namespace riskdp {

// Objective evaluated at an allocation vector. Must be a pure function:
// the parallel scan calls it concurrently from several threads.
using Objective = std::function<double(const std::vector<double>&)>;

enum class RunMode {
    Serial,   // reference implementation
    Parallel, // OpenMP over the first lattice coordinate
    Auto,     // Parallel when compiled with OpenMP, Serial otherwise
};

struct ScanResult {
    bool found = false;
    double value = 0.0;
    std::vector<double> point;
};

// Sweep the lattice of the feasible set at resolution N (simplex modes:
// compositions k/N; box mode: product grid {0,...,N}/N) plus the seeded
// candidate points, keeping the best objective value. Ties are broken toward
// the lexicographically smallest point; because the winner is the minimum
// under that total order, the parallel scan returns a bit-identical result
// to the serial one for any schedule or thread count.
ScanResult scan_lattice(const FeasibleSet& set, int resolution, const Objective& f,
                        bool maximize, const std::vector<std::vector<double>>& seeds,
                        RunMode mode);

// Derivative-free polish: pairwise mass transfers (simplex modes) or
// per-coordinate steps (box mode), best-improvement per sweep, step halved
// from step0 until below step_min. Stays inside the feasible set.
ScanResult refine_pattern_search(const FeasibleSet& set, const ScanResult& start,
                                 double step0, double step_min, const Objective& f,
                                 bool maximize);

// Grid-plus-refinement optimizer over one constraint family: the search
// engine behind the grid-based decompositions. h is the lattice step
// (resolution = round(1/h)); refinement polishes to step 1e-9. Throws
// EmptyFeasibleSet when neither the lattice nor a seed yields a feasible
// point.
struct GridOptimum {
    double value = 0.0;
    RiskAllocation allocation;
};
GridOptimum simplex_grid_optimize(const FeasibleSet& set, double h, const Objective& f,
                                  bool maximize, bool refine,
                                  const std::vector<std::vector<double>>& seeds = {},
                                  RunMode mode = RunMode::Auto);

} // namespace riskdp
