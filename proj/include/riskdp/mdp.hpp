#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "riskdp/distribution.hpp"
#include "riskdp/errors.hpp"

namespace riskdp {

// Finite-horizon MDP with reward on transitions. States and actions carry
// string ids; indices follow the lexicographic order of those ids so that a
// document always maps to the same dense layout. Desk scale: transition and
// reward tables are stored dense (S*A*S row-major).
class Mdp {
public:
    Mdp(std::vector<std::string> state_ids, std::vector<std::string> action_ids,
        int horizon);

    int num_states() const { return static_cast<int>(states_.size()); }
    int num_actions() const { return static_cast<int>(actions_.size()); }
    int horizon() const { return horizon_; }

    const std::vector<std::string>& state_ids() const { return states_; }
    const std::vector<std::string>& action_ids() const { return actions_; }
    int state_index(const std::string& id) const;  // -1 when absent
    int action_index(const std::string& id) const; // -1 when absent

    void set_available(int s, std::vector<int> actions);
    const std::vector<int>& available(int s) const { return available_[s]; }

    void set_transition(int s, int a, int sp, double p);
    void set_reward(int s, int a, int sp, double r);
    void set_initial(std::vector<double> weights);

    double p(int s, int a, int sp) const { return prob_[idx(s, a, sp)]; }
    double r(int s, int a, int sp) const { return reward_[idx(s, a, sp)]; }
    const std::vector<double>& initial() const { return initial_; }

private:
    std::size_t idx(int s, int a, int sp) const {
        return (static_cast<std::size_t>(s) * actions_.size() + a) * states_.size() + sp;
    }
    std::vector<std::string> states_, actions_;
    int horizon_;
    std::vector<std::vector<int>> available_;
    std::vector<double> prob_, reward_, initial_;
};

// One structural defect found by validate(); code names the rule, detail
// names the offending row or entry (e.g. {"RowMass", "s1,a2"}).
struct Violation {
    std::string code;
    std::string detail;
    std::string format() const { return code + "(" + detail + ")"; }
};

// Structural checks: per-(s,a) transition rows sum to 1 within 1e-9 with
// nonnegative entries, initial mass sums to 1 and is strictly positive on
// every state (the decompositions divide by it), every state offers at
// least one action, horizon >= 1, rewards finite.
std::vector<Violation> validate(const Mdp& m);

// Stationary deterministic policy: one action index per state.
struct DeterministicPolicy {
    std::vector<int> action;
};

// Stationary randomized policy: weights over available(s), aligned with
// Mdp::available(s); rows must sum to 1 within 1e-9.
struct RandomizedPolicy {
    std::vector<std::vector<double>> weights;
};

// Deterministic history-dependent policy. A history is the alternating
// sequence [s1, a1, s2, ..., st] (odd length, ends in the current state);
// the map covers exactly the histories reachable under the policy's own
// earlier choices through positive-probability transitions.
struct HistoryPolicy {
    std::map<std::vector<int>, int> choice;
    int action_at(const std::vector<int>& history) const;
};

// Default cap on raw return atoms / enumerated policies before consolidation;
// the CLI can override it through RISKDP_ATOM_BUDGET.
inline constexpr std::int64_t kDefaultAtomBudget = 10'000'000;

// Exact distribution of the accumulated reward over `horizon` stages from
// the initial distribution. Enumeration is exact (no sampling); raw atom
// count beyond the budget throws ExplosionGuard.
FiniteDistribution return_distribution(const Mdp& m, const DeterministicPolicy& pi,
                                       std::int64_t atom_budget = kDefaultAtomBudget);
FiniteDistribution return_distribution(const Mdp& m, const RandomizedPolicy& pi,
                                       std::int64_t atom_budget = kDefaultAtomBudget);
FiniteDistribution return_distribution(const Mdp& m, const HistoryPolicy& pi,
                                       std::int64_t atom_budget = kDefaultAtomBudget);

// Same, conditioned on the chain starting in state s.
FiniteDistribution conditional_return_distribution(
    const Mdp& m, const DeterministicPolicy& pi, int s,
    std::int64_t atom_budget = kDefaultAtomBudget);

// All stationary deterministic policies (product of available sets), in
// lexicographic order of the per-state action indices.
std::vector<DeterministicPolicy> enumerate_deterministic_policies(
    const Mdp& m, std::int64_t budget = kDefaultAtomBudget);

// All deterministic history-dependent policies, each given canonically on
// its own reachable histories: exhaustive and duplicate-free. For T = 1
// these coincide with the stationary policies restricted to initial states.
std::vector<HistoryPolicy> enumerate_history_policies(
    const Mdp& m, std::int64_t budget = kDefaultAtomBudget);

} // namespace riskdp
