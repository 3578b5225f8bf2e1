#include "riskdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace riskdp {

Mdp::Mdp(std::vector<std::string> state_ids, std::vector<std::string> action_ids,
         int horizon)
    : states_(std::move(state_ids)), actions_(std::move(action_ids)), horizon_(horizon) {
    if (states_.empty()) throw ParseError("MDP needs at least one state");
    if (actions_.empty()) throw ParseError("MDP needs at least one action");
    available_.assign(states_.size(), {});
    // Default: every action available everywhere.
    for (auto& row : available_) {
        row.resize(actions_.size());
        for (int a = 0; a < static_cast<int>(actions_.size()); ++a) row[a] = a;
    }
    prob_.assign(states_.size() * actions_.size() * states_.size(), 0.0);
    reward_.assign(prob_.size(), 0.0);
    initial_.assign(states_.size(), 0.0);
}

int Mdp::state_index(const std::string& id) const {
    auto it = std::find(states_.begin(), states_.end(), id);
    return it == states_.end() ? -1 : static_cast<int>(it - states_.begin());
}

int Mdp::action_index(const std::string& id) const {
    auto it = std::find(actions_.begin(), actions_.end(), id);
    return it == actions_.end() ? -1 : static_cast<int>(it - actions_.begin());
}

void Mdp::set_available(int s, std::vector<int> actions) {
    std::sort(actions.begin(), actions.end());
    available_[s] = std::move(actions);
}

void Mdp::set_transition(int s, int a, int sp, double p) { prob_[idx(s, a, sp)] = p; }
void Mdp::set_reward(int s, int a, int sp, double r) { reward_[idx(s, a, sp)] = r; }

void Mdp::set_initial(std::vector<double> weights) {
    if (static_cast<int>(weights.size()) != num_states())
        throw ParseError("initial weight vector has wrong length");
    initial_ = std::move(weights);
}

std::vector<Violation> validate(const Mdp& m) {
    std::vector<Violation> out;
    const int S = m.num_states();
    if (m.horizon() < 1)
        out.push_back({"BadHorizon", std::to_string(m.horizon())});
    for (int s = 0; s < S; ++s) {
        if (m.available(s).empty())
            out.push_back({"NoActions", m.state_ids()[s]});
        for (int a : m.available(s)) {
            double mass = 0.0;
            for (int sp = 0; sp < S; ++sp) {
                double p = m.p(s, a, sp);
                if (p < 0.0)
                    out.push_back({"NegativeProb", m.state_ids()[s] + "," +
                                                       m.action_ids()[a] + "," +
                                                       m.state_ids()[sp]});
                if (!std::isfinite(m.r(s, a, sp)))
                    out.push_back({"NonFiniteReward", m.state_ids()[s] + "," +
                                                          m.action_ids()[a] + "," +
                                                          m.state_ids()[sp]});
                mass += p;
            }
            if (std::abs(mass - 1.0) > 1e-9)
                out.push_back({"RowMass", m.state_ids()[s] + "," + m.action_ids()[a]});
        }
    }
    double init_mass = 0.0;
    for (int s = 0; s < S; ++s) {
        double w = m.initial()[s];
        if (w <= 0.0)
            out.push_back({"ZeroInitialMass", m.state_ids()[s]});
        init_mass += w;
    }
    if (std::abs(init_mass - 1.0) > 1e-9)
        out.push_back({"InitialMass", std::to_string(init_mass)});
    return out;
}

int HistoryPolicy::action_at(const std::vector<int>& history) const {
    auto it = choice.find(history);
    if (it == choice.end())
        throw ParseError("history policy has no action for a reachable history");
    return it->second;
}

namespace {

// Exact forward enumeration of (path probability, accumulated reward) pairs.
// `pick` yields the action weights for the current history; deterministic
// policies return a single (action, 1.0) entry. The raw atom count is checked
// against the budget before consolidation.
FiniteDistribution enumerate_returns(
    const Mdp& m, const std::vector<double>& initial, std::int64_t atom_budget,
    const std::function<void(const std::vector<int>& history, int state,
                             std::vector<std::pair<int, double>>&)>& pick) {
    std::vector<double> xs, ps;
    std::int64_t atoms = 0;
    std::vector<int> history;

    std::function<void(int, int, double, double)> walk = [&](int t, int s, double mass,
                                                             double total) {
        if (t > m.horizon()) {
            if (++atoms > atom_budget)
                throw ExplosionGuard("return enumeration exceeds atom budget");
            xs.push_back(total);
            ps.push_back(mass);
            return;
        }
        std::vector<std::pair<int, double>> acts; // per level: walk recurses below
        pick(history, s, acts);
        for (auto [a, w] : acts) {
            if (w <= 0.0) continue;
            history.push_back(a);
            for (int sp = 0; sp < m.num_states(); ++sp) {
                double p = m.p(s, a, sp);
                if (p <= 0.0) continue;
                history.push_back(sp);
                walk(t + 1, sp, mass * w * p, total + m.r(s, a, sp));
                history.pop_back();
            }
            history.pop_back();
        }
    };

    for (int s = 0; s < m.num_states(); ++s) {
        if (initial[s] <= 0.0) continue;
        history.assign(1, s);
        walk(1, s, initial[s], 0.0);
    }
    return make_distribution(std::move(xs), std::move(ps));
}

} // namespace

FiniteDistribution return_distribution(const Mdp& m, const DeterministicPolicy& pi,
                                       std::int64_t atom_budget) {
    return enumerate_returns(m, m.initial(), atom_budget,
                             [&](const std::vector<int>&, int s, auto& acts) {
                                 acts.emplace_back(pi.action[s], 1.0);
                             });
}

FiniteDistribution return_distribution(const Mdp& m, const RandomizedPolicy& pi,
                                       std::int64_t atom_budget) {
    return enumerate_returns(m, m.initial(), atom_budget,
                             [&](const std::vector<int>&, int s, auto& acts) {
                                 const auto& avail = m.available(s);
                                 for (std::size_t k = 0; k < avail.size(); ++k)
                                     acts.emplace_back(avail[k], pi.weights[s][k]);
                             });
}

FiniteDistribution return_distribution(const Mdp& m, const HistoryPolicy& pi,
                                       std::int64_t atom_budget) {
    return enumerate_returns(m, m.initial(), atom_budget,
                             [&](const std::vector<int>& history, int, auto& acts) {
                                 acts.emplace_back(pi.action_at(history), 1.0);
                             });
}

FiniteDistribution conditional_return_distribution(const Mdp& m,
                                                   const DeterministicPolicy& pi, int s,
                                                   std::int64_t atom_budget) {
    std::vector<double> initial(m.num_states(), 0.0);
    initial[s] = 1.0;
    return enumerate_returns(m, initial, atom_budget,
                             [&](const std::vector<int>&, int st, auto& acts) {
                                 acts.emplace_back(pi.action[st], 1.0);
                             });
}

std::vector<DeterministicPolicy> enumerate_deterministic_policies(const Mdp& m,
                                                                  std::int64_t budget) {
    const int S = m.num_states();
    std::int64_t count = 1;
    for (int s = 0; s < S; ++s) {
        count *= static_cast<std::int64_t>(m.available(s).size());
        if (count > budget)
            throw ExplosionGuard("deterministic policy count exceeds budget");
    }
    std::vector<DeterministicPolicy> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> pick(S, 0);
    while (true) {
        DeterministicPolicy pi;
        pi.action.resize(S);
        for (int s = 0; s < S; ++s) pi.action[s] = m.available(s)[pick[s]];
        out.push_back(std::move(pi));
        // Mixed-radix increment, last state fastest.
        int s = S - 1;
        while (s >= 0) {
            if (++pick[s] < m.available(s).size()) break;
            pick[s] = 0;
            --s;
        }
        if (s < 0) break;
    }
    return out;
}

std::vector<HistoryPolicy> enumerate_history_policies(const Mdp& m,
                                                      std::int64_t budget) {
    std::vector<HistoryPolicy> out;
    // Frontier-by-frontier recursion: fix actions for every stage-t history
    // reachable under the choices made so far, then expand stage t+1. This
    // enumerates canonical policies (defined exactly on their own reachable
    // histories), so no two emitted policies coincide.
    std::function<void(int, std::vector<std::vector<int>>&, HistoryPolicy&)> expand =
        [&](int t, std::vector<std::vector<int>>& frontier, HistoryPolicy& partial) {
            if (t > m.horizon()) {
                if (static_cast<std::int64_t>(out.size()) >= budget)
                    throw ExplosionGuard("history policy count exceeds budget");
                out.push_back(partial);
                return;
            }
            // Assign an action to each frontier history (mixed radix).
            std::vector<std::size_t> pick(frontier.size(), 0);
            while (true) {
                std::vector<std::vector<int>> next;
                for (std::size_t i = 0; i < frontier.size(); ++i) {
                    int s = frontier[i].back();
                    int a = m.available(s)[pick[i]];
                    partial.choice[frontier[i]] = a;
                    for (int sp = 0; sp < m.num_states(); ++sp) {
                        if (m.p(s, a, sp) <= 0.0) continue;
                        auto h = frontier[i];
                        h.push_back(a);
                        h.push_back(sp);
                        next.push_back(std::move(h));
                    }
                }
                expand(t + 1, next, partial);
                for (const auto& h : frontier) partial.choice.erase(h);
                std::size_t i = 0;
                while (i < frontier.size()) {
                    int s = frontier[i].back();
                    if (++pick[i] < m.available(s).size()) break;
                    pick[i] = 0;
                    ++i;
                }
                if (i >= frontier.size()) break;
            }
        };

    std::vector<std::vector<int>> roots;
    for (int s = 0; s < m.num_states(); ++s)
        if (m.initial()[s] > 0.0) roots.push_back({s});
    HistoryPolicy partial;
    expand(1, roots, partial);
    return out;
}

} // namespace riskdp
