#pragma once

#include <string>
#include <vector>

#include "riskdp/counterexamples.hpp"
#include "riskdp/decomposition.hpp"
#include "riskdp/mdp.hpp"

namespace riskdp {

// Parse an MDP document. Schema (any other key is rejected):
//   states:      [string...]                 required, unique ids
//   actions:     [string...]                 required, unique ids
//   horizon:     integer >= 1                optional, default 1
//   available:   {state: [action, ...]}      optional, default all actions
//   transitions: [{s, a, sp, p}, ...]        required, duplicates rejected
//   rewards:     [{s, a, sp, r}, ...]        optional, must land on declared
//                                            transitions, duplicates rejected
//   initial:     {state: weight}             required, missing states get 0
// Indices follow the lexicographic order of the id strings regardless of
// document order. Parsing is structural; call validate() for semantics.
Mdp parse_mdp_json(const std::string& text);
Mdp load_mdp_file(const std::string& path);

// Policy document {state: action}: exactly one entry per state; the action
// must be available in that state.
DeterministicPolicy parse_policy_json(const Mdp& m, const std::string& text);
DeterministicPolicy load_policy_file(const Mdp& m, const std::string& path);

// Number formatting for reproducible output: JSON carries %.17g (exact
// round trip), CSV carries %.12g. Non-finite values are spelled "inf",
// "-inf", "nan" (quoted in JSON).
std::string format_double(double v);
std::string csv_double(double v);
std::string json_number(double v); // %.17g, quoted when non-finite

std::string report_to_json(const DecompositionReport& rep);
std::string sweep_to_csv(const SweepResult& sweep);
std::string curve_to_csv(const std::vector<ThetaSample>& curve);

// Canonical model document: ids in index (lexicographic) order, transition
// and reward rows in index order, only nonzero entries. For any model m,
// parse_mdp_json(mdp_to_json(m)) reproduces m exactly. Rewards on
// zero-probability transitions are dropped (the schema has no way to state
// them).
std::string mdp_to_json(const Mdp& m);

} // namespace riskdp
