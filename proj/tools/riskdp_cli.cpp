// riskdp: risk measures and risk-level decompositions on finite MDPs.
//
// Subcommands
//   eval            risk of a fixed policy's return distribution
//   opt             brute-force optimum over policies
//   decompose       one of the seven decomposition schemes, JSON report
//   dp              value-at-risk dynamic program over a level grid
//   counterexample  verified gap reproductions (cvar | evar | sweep)
//   suite           the full verification battery
//
// Exit codes: 0 success, 1 input error, 2 verified property violated.
// All numeric output is deterministic for a fixed invocation.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskdp/counterexamples.hpp"
#include "riskdp/decomposition.hpp"
#include "riskdp/errors.hpp"
#include "riskdp/json_io.hpp"
#include "riskdp/mdp.hpp"
#include "riskdp/oracle.hpp"
#include "riskdp/suite.hpp"
#include "riskdp/var_dp.hpp"

namespace {

using namespace riskdp;

std::int64_t atom_budget_from_env() {
    const char* raw = std::getenv("RISKDP_ATOM_BUDGET");
    if (raw == nullptr) return kDefaultAtomBudget;
    char* end = nullptr;
    const long long v = std::strtoll(raw, &end, 10);
    if (end == raw || *end != '\0' || v <= 0)
        throw Error("RISKDP_ATOM_BUDGET must be a positive integer");
    return static_cast<std::int64_t>(v);
}

Measure parse_measure(const std::string& name) {
    if (name == "var") return Measure::VaR;
    if (name == "cvar") return Measure::CVaR;
    if (name == "evar") return Measure::EVaR;
    if (name == "quantile") return Measure::Quantile;
    throw Error("unknown measure '" + name + "' (var|cvar|evar|quantile)");
}

// Policy resolution: an explicit document wins; otherwise the policy is
// unambiguous only when every state offers exactly one action.
DeterministicPolicy resolve_policy(const Mdp& m, const std::string& policy_path) {
    if (!policy_path.empty()) return load_policy_file(m, policy_path);
    DeterministicPolicy pi;
    for (int s = 0; s < m.num_states(); ++s) {
        if (m.available(s).size() != 1)
            throw Error("state '" + m.state_ids()[s] +
                        "' offers several actions; pass --policy");
        pi.action.push_back(m.available(s)[0]);
    }
    return pi;
}

Mdp load_valid_mdp(const std::string& path) {
    Mdp m = load_mdp_file(path);
    const std::vector<Violation> bad = validate(m);
    if (!bad.empty()) {
        std::string msg = "invalid model:";
        for (const Violation& v : bad) msg += " " + v.format();
        throw Error(msg);
    }
    return m;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot open output file '" + out_path + "'");
    f << text;
    if (!f) throw Error("failed writing '" + out_path + "'");
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Re-indent an embedded JSON object (drop its trailing newline, pad every
// inner line) so composed documents stay readable and byte-deterministic.
std::string indent_block(const std::string& text, const std::string& pad) {
    std::string body = text;
    while (!body.empty() && body.back() == '\n') body.pop_back();
    std::string out;
    for (char c : body) {
        out += c;
        if (c == '\n') out += pad;
    }
    return out;
}

std::string history_to_json(const Mdp& m, const std::vector<int>& history) {
    std::string out = "[";
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i) out += ", ";
        out += (i % 2 == 0) ? quote(m.state_ids()[static_cast<std::size_t>(history[i])])
                            : quote(m.action_ids()[static_cast<std::size_t>(history[i])]);
    }
    return out + "]";
}

std::string json_double_array(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += json_number(xs[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_eval(const std::string& mdp_path, const std::string& measure,
             double alpha, const std::string& policy_path, const std::string& out) {
    const Mdp m = load_valid_mdp(mdp_path);
    const DeterministicPolicy pi = resolve_policy(m, policy_path);
    const double v = evaluate_policy(m, pi, parse_measure(measure), RiskLevel(alpha),
                                     {}, atom_budget_from_env());
    emit(format_double(v) + "\n", out);
    return 0;
}

int run_opt(const std::string& mdp_path, const std::string& measure, double alpha,
            const std::string& out) {
    const Mdp m = load_valid_mdp(mdp_path);
    const Measure meas = parse_measure(measure);
    const std::int64_t budget = atom_budget_from_env();
    std::string json = "{\n";
    json += "  \"measure\": " + quote(measure) + ",\n";
    json += "  \"alpha\": " + json_number(alpha) + ",\n";
    if (m.horizon() == 1) {
        const StationaryOracle best =
            optimize_stationary(m, meas, RiskLevel(alpha), {}, budget);
        json += "  \"value\": " + json_number(best.value) + ",\n";
        json += "  \"policy\": {";
        for (int s = 0; s < m.num_states(); ++s) {
            if (s) json += ", ";
            json += quote(m.state_ids()[s]) + ": " +
                    quote(m.action_ids()[static_cast<std::size_t>(
                        best.policy.action[static_cast<std::size_t>(s)])]);
        }
        json += "}\n";
    } else {
        const ExhaustiveOracle best =
            optimize_exhaustive(m, meas, RiskLevel(alpha), {}, budget);
        json += "  \"value\": " + json_number(best.value) + ",\n";
        json += "  \"policy\": [\n";
        bool first = true;
        for (const auto& [history, action] : best.policy.choice) {
            if (!first) json += ",\n";
            first = false;
            json += "    {\"history\": " + history_to_json(m, history) +
                    ", \"action\": " +
                    quote(m.action_ids()[static_cast<std::size_t>(action)]) + "}";
        }
        json += "\n  ]\n";
    }
    emit(json + "}\n", out);
    return 0;
}

int run_decompose(const std::string& mdp_path, const std::string& scheme,
                  double alpha, const std::string& policy_path, double h,
                  bool refine, bool exact, const std::string& curve_out,
                  int curve_samples, const std::string& out) {
    const Mdp m = load_valid_mdp(mdp_path);
    const RiskLevel level(alpha);
    DecompositionOptions opts;
    opts.h = h;
    opts.refine = refine;
    opts.method = exact ? CvarMethod::ExactTwoState : CvarMethod::Grid;
    opts.atom_budget = atom_budget_from_env();

    DecompositionReport rep;
    if (scheme == "cvar-eval")
        rep = cvar_eval_decomposition(m, resolve_policy(m, policy_path), level, opts);
    else if (scheme == "cvar-opt")
        rep = cvar_opt_decomposition(m, level, opts);
    else if (scheme == "evar-ni")
        rep = evar_ni_decomposition(m, resolve_policy(m, policy_path), level, opts);
    else if (scheme == "evar-corrected")
        rep = evar_corrected_decomposition(m, resolve_policy(m, policy_path), level,
                                           opts);
    else if (scheme == "var")
        rep = var_decomposition(m, resolve_policy(m, policy_path), level,
                                opts.atom_budget);
    else if (scheme == "var-opt")
        rep = var_opt_decomposition(m, level, opts.atom_budget);
    else if (scheme == "quantile-opt")
        rep = quantile_opt_decomposition(m, level, opts.atom_budget);
    else
        throw Error("unknown scheme '" + scheme +
                    "' (cvar-eval|cvar-opt|evar-ni|evar-corrected|var|var-opt|"
                    "quantile-opt)");

    if (!curve_out.empty()) {
        const auto curve = theta_curve(m, resolve_policy(m, policy_path), level,
                                       curve_samples, opts.atom_budget);
        emit(curve_to_csv(curve), curve_out);
    }
    emit(report_to_json(rep), out);
    return 0;
}

int run_dp(const std::string& mdp_path, double alpha, double grid_h,
           const std::string& out) {
    const Mdp m = load_valid_mdp(mdp_path);
    const VarDpResult res =
        var_dp_horizon(m, RiskLevel(alpha), AlphaGrid::uniform(grid_h));
    std::string json = "{\n";
    json += "  \"alpha\": " + json_number(alpha) + ",\n";
    json += "  \"grid_levels\": " + std::to_string(res.grid.size()) + ",\n";
    json += "  \"v0\": " + json_number(res.v0) + ",\n";
    json += "  \"initial_levels\": " + json_double_array(res.initial_levels) + ",\n";
    json += "  \"initial_allocation\": " +
            json_double_array(res.initial_allocation.weights) + ",\n";
    json += "  \"policy\": [\n";
    bool first = true;
    for (const auto& [history, action] : res.policy.policy.choice) {
        if (!first) json += ",\n";
        first = false;
        json += "    {\"history\": " + history_to_json(m, history) + ", \"action\": " +
                quote(m.action_ids()[static_cast<std::size_t>(action)]) +
                ", \"level\": " + json_number(res.policy.levels.at(history)) + "}";
    }
    json += "\n  ]\n";
    emit(json + "}\n", out);
    return 0;
}

int run_counterexample_cvar(double h, const std::string& out) {
    const CvarGapReport rep = verify_cvar_gap(h);
    std::string json = "{\n";
    json += "  \"oracle\": " + json_number(rep.oracle) + ",\n";
    json += "  \"exact_value\": " + json_number(rep.exact_value) + ",\n";
    json += "  \"grid_value\": " + json_number(rep.grid_value) + ",\n";
    json += "  \"gap\": " + json_number(rep.gap) + ",\n";
    json += "  \"exact_report\": " + indent_block(report_to_json(rep.exact_report), "  ") + ",\n";
    json += "  \"grid_report\": " + indent_block(report_to_json(rep.grid_report), "  ") + "\n";
    emit(json + "}\n", out);
    if (!(std::abs(rep.oracle) <= 1e-9 && std::abs(rep.exact_value - 4.0) <= 1e-9 &&
          std::abs(rep.grid_value - 4.0) <= 2e-2))
        throw AssertionFailure("two-state saddle gap drifted from oracle=0, value=4");
    return 0;
}

int run_counterexample_evar(double h, const std::string& out) {
    const EntropicGapReport rep = verify_evar_gap(h);
    const double third = 1.0 / 3.0;
    std::string json = "{\n";
    json += "  \"cvar\": " + json_number(rep.cvar_value) + ",\n";
    json += "  \"ball_value\": " + json_number(rep.ball_value) + ",\n";
    json += "  \"corrected_value\": " + json_number(rep.corrected_value) + ",\n";
    json += "  \"evar\": " + json_number(rep.evar_value) + ",\n";
    json += "  \"primal_dual_gap\": " + json_number(rep.primal_dual_gap) + ",\n";
    json += "  \"ball_report\": " + indent_block(report_to_json(rep.ball_report), "  ") + ",\n";
    json += "  \"corrected_report\": " +
            indent_block(report_to_json(rep.corrected_report), "  ") + "\n";
    emit(json + "}\n", out);
    if (!(std::abs(rep.cvar_value - third) <= 1e-12 &&
          rep.ball_value >= third - 1e-9 && rep.evar_value < third - 1e-3 &&
          rep.primal_dual_gap <= 1e-6 &&
          std::abs(rep.corrected_value - rep.evar_value) <= 2e-3))
        throw AssertionFailure("entropic gap anchors drifted on the 0/1 mixture");
    return 0;
}

int run_counterexample_sweep(std::vector<double> magnitudes, std::vector<double> ps,
                             std::vector<double> alphas, const std::string& out,
                             const std::string& out_dir) {
    if (magnitudes.empty()) magnitudes = {600.0, 1200.0, 2400.0};
    if (ps.empty()) ps = {0.5, 0.7, 0.9};
    if (alphas.empty())
        for (int k = 1; k <= 19; ++k) alphas.push_back(0.05 * k);
    const std::size_t pairs = magnitudes.size() * ps.size();
    if (pairs > 1 && out_dir.empty())
        throw Error("several (magnitude, p-s2) pairs: pass --out-dir");
    bool greedy_middle = false;
    for (double mag : magnitudes) {
        for (double p : ps) {
            const SweepResult sweep = sweep_alpha(mag, p, alphas);
            greedy_middle = greedy_middle || sweep.greedy_ever_middle;
            for (const SweepRow& row : sweep.rows)
                greedy_middle = greedy_middle || row.greedy_action == 2;
            if (!out_dir.empty()) {
                char name[64];
                std::snprintf(name, sizeof name, "sweep_m%g_p%g.csv", mag, p);
                emit(sweep_to_csv(sweep), out_dir + "/" + name);
            } else {
                emit(sweep_to_csv(sweep), out);
            }
        }
    }
    if (greedy_middle)
        throw AssertionFailure(
            "greedy recommendation picked the moderate bet at some level");
    return 0;
}

int run_suite(const std::string& only) {
    std::vector<CheckResult> results;
    if (only.empty()) {
        results = run_acceptance_suite();
    } else {
        for (const CheckResult& r : run_acceptance_suite())
            if (r.name == only) results.push_back(r);
        if (results.empty()) throw Error("no check named '" + only + "'");
    }
    bool all = true;
    for (const CheckResult& r : results) {
        std::printf("[%s] %s: %s (%.2fs)\n", r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        all = all && r.pass;
    }
    if (!all) throw AssertionFailure("verification battery reported failures");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk measures and risk-level decompositions on finite MDPs"};
    app.require_subcommand(1);
    // `--h` is a documented option (lattice step), so help is long-form only.
    app.set_help_flag("--help", "print this help and exit");

    std::string mdp_path, policy_path, out_path, out_dir, measure = "cvar";
    std::string scheme, curve_out, only;
    double alpha = 0.5, h = 1e-3, grid_h = 1e-3;
    int curve_samples = 101;
    bool no_refine = false, exact = false;
    std::vector<double> magnitudes, ps, alphas;

    CLI::App* eval = app.add_subcommand("eval", "risk of a fixed policy");
    eval->set_help_flag("--help", "print this help and exit");
    eval->add_option("--mdp", mdp_path, "model document")->required();
    eval->add_option("--measure", measure, "var|cvar|evar|quantile");
    eval->add_option("--alpha", alpha, "risk level in [0,1]")->required();
    eval->add_option("--policy", policy_path, "policy document {state: action}");
    eval->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* opt = app.add_subcommand("opt", "brute-force policy optimum");
    opt->set_help_flag("--help", "print this help and exit");
    opt->add_option("--mdp", mdp_path, "model document")->required();
    opt->add_option("--measure", measure, "var|cvar|evar|quantile");
    opt->add_option("--alpha", alpha, "risk level in [0,1]")->required();
    opt->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* dec = app.add_subcommand("decompose", "risk-level decomposition report");
    dec->set_help_flag("--help", "print this help and exit");
    dec->add_option("--mdp", mdp_path, "model document")->required();
    dec->add_option("--scheme", scheme,
                    "cvar-eval|cvar-opt|evar-ni|evar-corrected|var|var-opt|quantile-opt")
        ->required();
    dec->add_option("--alpha", alpha, "risk level in [0,1]")->required();
    dec->add_option("--policy", policy_path, "policy document (evaluation schemes)");
    dec->add_option("--h", h, "lattice step in (0, 0.1]");
    dec->add_flag("--no-refine", no_refine, "skip pattern-search polish");
    dec->add_flag("--exact", exact, "two-state breakpoint-exact path");
    dec->add_option("--curve-out", curve_out, "also write the theta curve CSV here");
    dec->add_option("--curve-samples", curve_samples, "theta curve sample count");
    dec->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* dp = app.add_subcommand("dp", "value-at-risk dynamic program");
    dp->set_help_flag("--help", "print this help and exit");
    dp->add_option("--mdp", mdp_path, "model document")->required();
    dp->add_option("--alpha", alpha, "risk level in [0,1]")->required();
    dp->add_option("--grid-h", grid_h, "level grid step; 1/grid-h must be integral");
    dp->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* ce = app.add_subcommand("counterexample", "verified gap reproductions");
    ce->set_help_flag("--help", "print this help and exit");
    ce->require_subcommand(1);
    CLI::App* ce_cvar = ce->add_subcommand("cvar", "two-state saddle gap");
    ce_cvar->set_help_flag("--help", "print this help and exit");
    ce_cvar->add_option("--h", h, "lattice step for the grid path");
    ce_cvar->add_option("--out", out_path, "output file (default stdout)");
    CLI::App* ce_evar = ce->add_subcommand("evar", "entropic gap on the 0/1 mixture");
    ce_evar->set_help_flag("--help", "print this help and exit");
    ce_evar->add_option("--h", h, "lattice step");
    ce_evar->add_option("--out", out_path, "output file (default stdout)");
    CLI::App* ce_sweep = ce->add_subcommand("sweep", "three-action level-window sweep");
    ce_sweep->set_help_flag("--help", "print this help and exit");
    ce_sweep->add_option("--magnitude", magnitudes,
                         "heavy-bet magnitudes (default 600 1200 2400)");
    ce_sweep->add_option("--p-s2", ps, "initial mass on s2 (default 0.5 0.7 0.9)");
    ce_sweep->add_option("--alphas", alphas, "row levels (default 0.05..0.95)");
    ce_sweep->add_option("--out", out_path, "output file for a single pair");
    ce_sweep->add_option("--out-dir", out_dir, "directory for one CSV per pair");

    CLI::App* suite = app.add_subcommand("suite", "full verification battery");
    suite->set_help_flag("--help", "print this help and exit");
    suite->add_option("--only", only, "run a single named check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*eval) return run_eval(mdp_path, measure, alpha, policy_path, out_path);
        if (*opt) return run_opt(mdp_path, measure, alpha, out_path);
        if (*dec)
            return run_decompose(mdp_path, scheme, alpha, policy_path, h, !no_refine,
                                 exact, curve_out, curve_samples, out_path);
        if (*dp) return run_dp(mdp_path, alpha, grid_h, out_path);
        if (*ce_cvar) return run_counterexample_cvar(h, out_path);
        if (*ce_evar) return run_counterexample_evar(h, out_path);
        if (*ce_sweep)
            return run_counterexample_sweep(magnitudes, ps, alphas, out_path, out_dir);
        if (*suite) return run_suite(only);
        throw Error("no subcommand selected");
    } catch (const AssertionFailure& e) {
        std::fprintf(stderr, "property violated: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
