#include "riskdp/oracle.hpp"

#include "riskdp/errors.hpp"

namespace riskdp {

const char* measure_name(Measure m) {
    switch (m) {
        case Measure::VaR: return "var";
        case Measure::CVaR: return "cvar";
        case Measure::EVaR: return "evar";
        case Measure::Quantile: return "quantile";
    }
    throw Error("unknown measure");
}

double measure_value(const FiniteDistribution& d, Measure m, RiskLevel alpha,
                     const EvarOptions& evar_opts) {
    switch (m) {
        case Measure::VaR: return var(d, alpha);
        case Measure::CVaR: return cvar(d, alpha);
        case Measure::EVaR: return evar(d, alpha, evar_opts).value;
        case Measure::Quantile: return lower_quantile(d, alpha);
    }
    throw Error("unknown measure");
}

double evaluate_policy(const Mdp& m, const DeterministicPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts,
                       std::int64_t atom_budget) {
    return measure_value(return_distribution(m, pi, atom_budget), measure, alpha,
                         evar_opts);
}

double evaluate_policy(const Mdp& m, const RandomizedPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts,
                       std::int64_t atom_budget) {
    return measure_value(return_distribution(m, pi, atom_budget), measure, alpha,
                         evar_opts);
}

double evaluate_policy(const Mdp& m, const HistoryPolicy& pi, Measure measure,
                       RiskLevel alpha, const EvarOptions& evar_opts,
                       std::int64_t atom_budget) {
    return measure_value(return_distribution(m, pi, atom_budget), measure, alpha,
                         evar_opts);
}

StationaryOracle optimize_stationary(const Mdp& m, Measure measure, RiskLevel alpha,
                                     const EvarOptions& evar_opts,
                                     std::int64_t atom_budget) {
    auto policies = enumerate_deterministic_policies(m, atom_budget);
    StationaryOracle out;
    out.policy_values.reserve(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i) {
        double v = evaluate_policy(m, policies[i], measure, alpha, evar_opts,
                                   atom_budget);
        out.policy_values.push_back(v);
        if (i == 0 || v > out.value) {
            out.value = v;
            out.policy_index = i;
        }
    }
    out.policy = policies[out.policy_index];
    return out;
}

ExhaustiveOracle optimize_exhaustive(const Mdp& m, Measure measure, RiskLevel alpha,
                                     const EvarOptions& evar_opts,
                                     std::int64_t atom_budget) {
    auto policies = enumerate_history_policies(m, atom_budget);
    ExhaustiveOracle out;
    out.policy_values.reserve(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i) {
        double v = evaluate_policy(m, policies[i], measure, alpha, evar_opts,
                                   atom_budget);
        out.policy_values.push_back(v);
        if (i == 0 || v > out.value) {
            out.value = v;
            out.policy_index = i;
        }
    }
    out.policy = policies[out.policy_index];
    return out;
}

} // namespace riskdp
