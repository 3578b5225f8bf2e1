#pragma once

#include <map>
#include <vector>

#include "riskdp/allocation.hpp"
#include "riskdp/mdp.hpp"
#include "riskdp/risk_measures.hpp"

namespace riskdp {

// Risk-level grid for the threshold DP: sorted levels with pinned endpoints
// 0 and 1.
struct AlphaGrid {
    std::vector<double> levels;

    // Uniform grid {0, h, 2h, ..., 1}; 1/h must be an integer.
    static AlphaGrid uniform(double h);

    std::size_t size() const { return levels.size(); }
};

// History-dependent policy extracted from the DP, with the grid level
// assigned to every reachable decision point (keys match policy.choice).
struct ExtractedPolicy {
    HistoryPolicy policy;
    std::map<std::vector<int>, double> levels;
};

struct VarDpResult {
    double v0 = 0.0;
    AlphaGrid grid;
    // values[t][s][a][k]: optimal threshold at stage t+1 playing a in s with
    // level budget grid.levels[k]. +inf at level 1, -inf for unavailable
    // actions.
    std::vector<std::vector<std::vector<std::vector<double>>>> values;
    ExtractedPolicy policy;
    // Minimal per-state grid levels certifying v0 at the initial stage, and
    // the padded simplex witness derived from them (weights sum to one).
    std::vector<double> initial_levels;
    RiskAllocation initial_allocation;
};

// Value-at-risk dynamic program over a finite level grid. Successor level
// budgets snap downward onto the grid, so v0 lower-bounds the true optimum
// and is exact whenever every reachable tail probability lies on the grid.
VarDpResult var_dp_horizon(const Mdp& m, RiskLevel alpha, const AlphaGrid& grid);

} // namespace riskdp
