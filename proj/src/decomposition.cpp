#include "riskdp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace riskdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_one_stage(const Mdp& m, const char* op) {
    if (m.horizon() != 1)
        throw Error(std::string(op) + " requires a one-stage model; use the"
                                      " horizon DP for T > 1");
}

// P(d < z) on a consolidated distribution.
double tail_below(const FiniteDistribution& d, double z) {
    double cum = 0.0;
    for (std::size_t k = 0; k < d.size() && d.outcomes()[k] < z; ++k)
        cum += d.probabilities()[k];
    return cum;
}

// Mass of the first atom at or above z; 0 when none exists.
double mass_at_or_above(const FiniteDistribution& d, double z) {
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d.outcomes()[k] >= z) return d.probabilities()[k];
    return 0.0;
}

std::vector<FiniteDistribution> conditionals(const Mdp& m, const DeterministicPolicy& pi,
                                             std::int64_t budget) {
    std::vector<FiniteDistribution> out;
    out.reserve(static_cast<std::size_t>(m.num_states()));
    for (int s = 0; s < m.num_states(); ++s)
        out.push_back(conditional_return_distribution(m, pi, s, budget));
    return out;
}

// One-stage conditional return of a single action: the reward atoms of the
// transition row.
FiniteDistribution action_conditional(const Mdp& m, int s, int a) {
    std::vector<double> xs, ps;
    for (int sp = 0; sp < m.num_states(); ++sp) {
        double p = m.p(s, a, sp);
        if (p <= 0.0) continue;
        xs.push_back(m.r(s, a, sp));
        ps.push_back(p);
    }
    return make_distribution(std::move(xs), std::move(ps));
}

struct BruteForceOptimum {
    double value = -kInf;
    std::size_t index = 0;
    DeterministicPolicy policy;
};

template <typename Eval>
BruteForceOptimum optimize_deterministic(const Mdp& m, std::int64_t budget, Eval&& eval) {
    auto policies = enumerate_deterministic_policies(m, budget);
    BruteForceOptimum best;
    bool first = true;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        double v = eval(policies[i]);
        if (first || v > best.value) {
            best.value = v;
            best.index = i;
            best.policy = policies[i];
            first = false;
        }
    }
    return best;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// ---------------------------------------------------------------------------
// Piecewise-linear machinery for the CVaR schemes.
//
// The per-state contribution g(zeta) = zeta * CVaR_{alpha zeta/phat}(d)
// equals (phat/alpha) * T(alpha zeta/phat) where T(u) is the lower-tail
// integral, piecewise linear with knots at the cumulative masses. Sorted
// prefix arrays make one evaluation a binary search plus a few flops, which
// is what keeps dense lattice scans affordable.
// ---------------------------------------------------------------------------

struct TailCurve {
    std::vector<double> x, cum_p, cum_px;
    double phat = 1.0;

    static TailCurve make(const FiniteDistribution& d, double phat) {
        FiniteDistribution n = d.is_normal_form() ? d : consolidate(d);
        TailCurve c;
        c.phat = phat;
        c.x = n.outcomes();
        c.cum_p.resize(n.size());
        c.cum_px.resize(n.size());
        double p = 0.0, px = 0.0;
        for (std::size_t k = 0; k < n.size(); ++k) {
            p += n.probabilities()[k];
            px += n.probabilities()[k] * n.outcomes()[k];
            c.cum_p[k] = p;
            c.cum_px[k] = px;
        }
        return c;
    }

    // T(u) = integral of the lower quantile over mass [0, u].
    double tail_integral(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= cum_p.back()) return cum_px.back();
        std::size_t k = static_cast<std::size_t>(
            std::lower_bound(cum_p.begin(), cum_p.end(), u) - cum_p.begin());
        double p0 = k ? cum_p[k - 1] : 0.0;
        double v0 = k ? cum_px[k - 1] : 0.0;
        return v0 + (u - p0) * x[k];
    }

    // zeta * CVaR_{alpha zeta / phat}(d) via the tail-integral identity.
    double value(double alpha, double zeta) const {
        if (zeta <= 0.0) return 0.0;
        if (alpha <= 0.0) return zeta * x.front();  // CVaR_0 = essential infimum
        return (phat / alpha) * tail_integral(std::min(alpha * zeta / phat, 1.0));
    }

    // Interior knots of value(alpha, .) on (0, cap): scaled cumulative masses.
    std::vector<double> knots(double alpha, double cap) const {
        std::vector<double> out{0.0, cap};
        for (std::size_t k = 0; k + 1 < cum_p.size(); ++k) {
            double z = phat * cum_p[k] / alpha;
            if (z > 0.0 && z < cap) out.push_back(z);
        }
        return out;
    }

    double min_outcome() const { return x.front(); }
};

// Crossing points of two action curves inside [0, cap], appended to `out`:
// where the upper envelope switches between them.
void envelope_crossings(const TailCurve& ca, const TailCurve& cb, double alpha,
                        double cap, std::vector<double>& out) {
    std::vector<double> grid = ca.knots(alpha, cap);
    std::vector<double> gb = cb.knots(alpha, cap);
    grid.insert(grid.end(), gb.begin(), gb.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double x1 = grid[k], x2 = grid[k + 1];
        double d1 = ca.value(alpha, x1) - cb.value(alpha, x1);
        double d2 = ca.value(alpha, x2) - cb.value(alpha, x2);
        if ((d1 < 0.0 && d2 > 0.0) || (d1 > 0.0 && d2 < 0.0))
            out.push_back(x1 + (x2 - x1) * d1 / (d1 - d2));
    }
}

// ---------------------------------------------------------------------------
// Report assembly for the weighted (simplex) schemes.
// ---------------------------------------------------------------------------

struct InnerEval {
    double level = 0.0;
    double value = 0.0;
    int action = -1;
};

DecompositionReport weighted_report(std::string scheme, double alpha,
                                    const std::vector<double>& weights,
                                    AllocationMode mode,
                                    const std::vector<InnerEval>& inner,
                                    double oracle_value) {
    DecompositionReport rep;
    rep.scheme = std::move(scheme);
    rep.alpha = alpha;
    rep.allocation.weights = weights;
    rep.allocation.mode = mode;
    double total = 0.0;
    for (std::size_t s = 0; s < inner.size(); ++s) {
        rep.inner_levels.push_back(inner[s].level);
        rep.inner_values.push_back(inner[s].value);
        rep.inner_actions.push_back(inner[s].action);
        total += weights[s] * inner[s].value;
    }
    rep.value = total;
    rep.oracle_value = oracle_value;
    rep.oracle_gap = (std::isinf(rep.value) && rep.value == oracle_value)
                         ? 0.0
                         : rep.value - oracle_value;
    return rep;
}

} // namespace

// ---------------------------------------------------------------------------
// CVaR evaluation decomposition
// ---------------------------------------------------------------------------

DecompositionReport cvar_eval_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                            RiskLevel alpha,
                                            const DecompositionOptions& options) {
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();
    auto conds = conditionals(m, pi, options.atom_budget);
    const double oracle = cvar(return_distribution(m, pi, options.atom_budget), alpha);

    if (a <= 0.0) {
        // CVaR_0 is the essential infimum: all weight on the worst state.
        int worst = 0;
        for (int s = 1; s < S; ++s)
            if (conds[s].min_outcome() < conds[worst].min_outcome()) worst = s;
        std::vector<double> w(S, 0.0);
        w[worst] = 1.0;
        std::vector<InnerEval> inner(S);
        for (int s = 0; s < S; ++s)
            inner[s] = {0.0, conds[s].min_outcome(), -1};
        return weighted_report("cvar-eval", a, w, AllocationMode::SimplexCapped, inner,
                               oracle);
    }

    std::vector<TailCurve> curves;
    curves.reserve(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) curves.push_back(TailCurve::make(conds[s], phat[s]));

    std::vector<double> weights;
    if (options.method == CvarMethod::ExactTwoState) {
        if (S != 2) throw Error("ExactTwoState requires exactly two states");
        const double cap1 = std::min(1.0, phat[0] / a);
        const double lo = std::max(0.0, 1.0 - std::min(1.0, phat[1] / a));
        std::vector<double> cands = curves[0].knots(a, cap1);
        for (double z : curves[1].knots(a, std::min(1.0, phat[1] / a)))
            cands.push_back(1.0 - z);
        cands.push_back(lo);
        cands.push_back(cap1);
        // Ascending scan with strict improvement: ties keep the smaller zeta1.
        std::sort(cands.begin(), cands.end());
        double best = kInf, best_z = lo;
        for (double z1 : cands) {
            if (z1 < lo - 1e-15 || z1 > cap1 + 1e-15) continue;
            z1 = std::min(cap1, std::max(lo, z1));
            double v = curves[0].value(a, z1) + curves[1].value(a, 1.0 - z1);
            if (v < best) {
                best = v;
                best_z = z1;
            }
        }
        weights = {best_z, 1.0 - best_z};
    } else {
        FeasibleSet set{AllocationMode::SimplexCapped, a, phat, {}};
        Objective f = [&](const std::vector<double>& z) {
            double v = 0.0;
            for (int s = 0; s < S; ++s) v += curves[s].value(a, z[s]);
            return v;
        };
        auto opt = simplex_grid_optimize(set, options.h, f, false, options.refine,
                                         {phat}, options.run_mode);
        weights = opt.allocation.weights;
    }

    std::vector<InnerEval> inner(S);
    for (int s = 0; s < S; ++s) {
        double u = clamp01(a * weights[s] / phat[s]);
        inner[s] = {u, cvar(conds[s], RiskLevel(u)), -1};
    }
    return weighted_report("cvar-eval", a, weights, AllocationMode::SimplexCapped, inner,
                           oracle);
}

// ---------------------------------------------------------------------------
// CVaR optimization decomposition (inner max over per-state actions)
// ---------------------------------------------------------------------------

DecompositionReport cvar_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                           const DecompositionOptions& options) {
    require_one_stage(m, "cvar_opt_decomposition");
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();

    std::vector<std::vector<FiniteDistribution>> dists(S);
    for (int s = 0; s < S; ++s)
        for (int act : m.available(s)) dists[s].push_back(action_conditional(m, s, act));

    const double oracle =
        optimize_deterministic(m, options.atom_budget, [&](const DeterministicPolicy& p) {
            return cvar(return_distribution(m, p, options.atom_budget), alpha);
        }).value;

    // Inner maximization at level u in state s; ties to the lowest index.
    auto inner_best = [&](int s, double u) {
        InnerEval e;
        e.level = u;
        e.value = -kInf;
        for (std::size_t k = 0; k < dists[s].size(); ++k) {
            double v = cvar(dists[s][k], RiskLevel(u));
            if (v > e.value) {
                e.value = v;
                e.action = m.available(s)[k];
            }
        }
        return e;
    };

    if (a <= 0.0) {
        std::vector<InnerEval> inner(S);
        int worst = 0;
        for (int s = 0; s < S; ++s) {
            inner[s] = inner_best(s, 0.0);
            if (inner[s].value < inner[worst].value) worst = s;
        }
        std::vector<double> w(S, 0.0);
        w[worst] = 1.0;
        return weighted_report("cvar-opt", a, w, AllocationMode::SimplexCapped, inner,
                               oracle);
    }

    std::vector<std::vector<TailCurve>> curves(S);
    for (int s = 0; s < S; ++s)
        for (const auto& d : dists[s]) curves[s].push_back(TailCurve::make(d, phat[s]));

    std::vector<double> weights;
    if (options.method == CvarMethod::ExactTwoState) {
        if (S != 2) throw Error("ExactTwoState requires exactly two states");
        // Candidate zeta1 values: every action's knots in both states (the
        // second state's knots mapped through zeta2 = 1 - zeta1), the upper
        // envelope's switching points, and the feasible interval ends.
        const double cap1 = std::min(1.0, phat[0] / a);
        const double lo = std::max(0.0, 1.0 - std::min(1.0, phat[1] / a));
        std::vector<double> cands{lo, cap1};
        for (int s = 0; s < 2; ++s) {
            double cap_s = std::min(1.0, phat[s] / a);
            std::vector<double> local;
            for (const auto& c : curves[s]) {
                auto ks = c.knots(a, cap_s);
                local.insert(local.end(), ks.begin(), ks.end());
            }
            for (std::size_t i = 0; i < curves[s].size(); ++i)
                for (std::size_t j = i + 1; j < curves[s].size(); ++j)
                    envelope_crossings(curves[s][i], curves[s][j], a, cap_s, local);
            for (double z : local) cands.push_back(s == 0 ? z : 1.0 - z);
        }
        // Ascending scan with strict improvement: ties keep the smaller zeta1.
        std::sort(cands.begin(), cands.end());
        auto envelope = [&](int s, double zeta) {
            double best = -kInf;
            for (const auto& c : curves[s]) best = std::max(best, c.value(a, zeta));
            return best;
        };
        double best = kInf, best_z = lo;
        for (double z1 : cands) {
            if (z1 < lo - 1e-15 || z1 > cap1 + 1e-15) continue;
            z1 = std::min(cap1, std::max(lo, z1));
            double v = envelope(0, z1) + envelope(1, 1.0 - z1);
            if (v < best) {
                best = v;
                best_z = z1;
            }
        }
        weights = {best_z, 1.0 - best_z};
    } else {
        FeasibleSet set{AllocationMode::SimplexCapped, a, phat, {}};
        Objective f = [&](const std::vector<double>& z) {
            double v = 0.0;
            for (int s = 0; s < S; ++s) {
                if (z[s] <= 0.0) continue;
                double best = -kInf;
                for (const auto& c : curves[s]) best = std::max(best, c.value(a, z[s]));
                v += best;
            }
            return v;
        };
        auto opt = simplex_grid_optimize(set, options.h, f, false, options.refine,
                                         {phat}, options.run_mode);
        weights = opt.allocation.weights;
    }

    std::vector<InnerEval> inner(S);
    for (int s = 0; s < S; ++s)
        inner[s] = inner_best(s, clamp01(a * weights[s] / phat[s]));
    return weighted_report("cvar-opt", a, weights, AllocationMode::SimplexCapped, inner,
                           oracle);
}

// ---------------------------------------------------------------------------
// theta curve
// ---------------------------------------------------------------------------

double theta_value(const Mdp& m, const DeterministicPolicy& pi, RiskLevel alpha,
                   double zeta1, std::int64_t atom_budget) {
    if (m.num_states() != 2)
        throw NotTwoStates("theta is defined along the two-state simplex");
    const double a = alpha.value();
    const auto& phat = m.initial();
    if (zeta1 < 0.0 || zeta1 > 1.0 || a * zeta1 > phat[0] + 1e-12 ||
        a * (1.0 - zeta1) > phat[1] + 1e-12)
        throw Error("zeta outside the capped simplex");
    auto c1 = TailCurve::make(conditional_return_distribution(m, pi, 0, atom_budget),
                              phat[0]);
    auto c2 = TailCurve::make(conditional_return_distribution(m, pi, 1, atom_budget),
                              phat[1]);
    return c1.value(a, zeta1) + c2.value(a, 1.0 - zeta1);
}

std::vector<ThetaSample> theta_curve(const Mdp& m, const DeterministicPolicy& pi,
                                     RiskLevel alpha, int samples,
                                     std::int64_t atom_budget) {
    if (m.num_states() != 2)
        throw NotTwoStates("theta is defined along the two-state simplex");
    if (samples < 2) throw Error("theta curve needs at least two samples");
    const double a = alpha.value();
    const auto& phat = m.initial();
    const double cap1 = (a > 0.0) ? std::min(1.0, phat[0] / a) : 1.0;
    const double lo = (a > 0.0) ? std::max(0.0, 1.0 - std::min(1.0, phat[1] / a)) : 0.0;
    auto c1 = TailCurve::make(conditional_return_distribution(m, pi, 0, atom_budget),
                              phat[0]);
    auto c2 = TailCurve::make(conditional_return_distribution(m, pi, 1, atom_budget),
                              phat[1]);
    std::vector<ThetaSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double z = lo + (cap1 - lo) * static_cast<double>(i) / (samples - 1);
        out.push_back({z, c1.value(a, z) + c2.value(a, 1.0 - z)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// EVaR decompositions
// ---------------------------------------------------------------------------

DecompositionReport evar_ni_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                          RiskLevel alpha,
                                          const DecompositionOptions& options) {
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();
    auto conds = conditionals(m, pi, options.atom_budget);
    const double oracle =
        evar(return_distribution(m, pi, options.atom_budget), alpha, options.evar).value;

    if (a <= 0.0) {
        int worst = 0;
        for (int s = 1; s < S; ++s)
            if (conds[s].min_outcome() < conds[worst].min_outcome()) worst = s;
        std::vector<double> w(S, 0.0);
        w[worst] = 1.0;
        std::vector<InnerEval> inner(S);
        for (int s = 0; s < S; ++s) inner[s] = {0.0, conds[s].min_outcome(), -1};
        return weighted_report("evar-ni", a, w, AllocationMode::KlCapped, inner, oracle);
    }

    FeasibleSet set{AllocationMode::KlCapped, a, phat, {}};
    Objective f = [&](const std::vector<double>& xi) {
        double v = 0.0;
        for (int s = 0; s < S; ++s) {
            if (xi[s] <= 0.0) continue;
            double u = clamp01(a * xi[s] / phat[s]);
            v += xi[s] * evar(conds[s], RiskLevel(u), options.evar).value;
        }
        return v;
    };
    auto opt = simplex_grid_optimize(set, options.h, f, false, options.refine, {phat},
                                     options.run_mode);
    std::vector<InnerEval> inner(S);
    for (int s = 0; s < S; ++s) {
        double u = clamp01(a * opt.allocation.weights[s] / phat[s]);
        inner[s] = {u, evar(conds[s], RiskLevel(u), options.evar).value, -1};
    }
    return weighted_report("evar-ni", a, opt.allocation.weights,
                           AllocationMode::KlCapped, inner, oracle);
}

namespace {

// Inner problem of the corrected scheme for S = 2, solved exactly: minimize
// w c1 + (1-w) c2 over the convex feasible interval of
//   G(w) = w log(w/(phat1 zeta1)) + (1-w) log((1-w)/(phat2 zeta2)) <= -log a.
// G attains its minimum -log(q1+q2) at w = q1/(q1+q2) with q_s = phat_s
// zeta_s, so the set is nonempty iff q1 + q2 >= a; a linear objective is
// minimized at an interval end.
struct InnerTwoState {
    bool feasible = false;
    double w = 0.0;
    double value = 0.0;
};

InnerTwoState corrected_inner_two(double q1, double q2, double c1, double c2, double R) {
    auto G = [&](double w) {
        double g = 0.0;
        if (w > 0.0) g += w * std::log(w / q1);
        if (w < 1.0) g += (1.0 - w) * std::log((1.0 - w) / q2);
        return g;
    };
    InnerTwoState out;
    double wbar = q1 / (q1 + q2);
    if (-std::log(q1 + q2) > R + 1e-13) return out;
    out.feasible = true;
    auto bisect = [&](double inside, double outside) {
        // G(inside) <= R < G(outside); returns the boundary point.
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (inside + outside);
            (G(mid) <= R ? inside : outside) = mid;
        }
        return inside;
    };
    double w_lo = (G(0.0) <= R) ? 0.0 : bisect(wbar, 0.0);
    double w_hi = (G(1.0) <= R) ? 1.0 : bisect(wbar, 1.0);
    // value(w) = c2 + w (c1 - c2): decreasing in w when c1 < c2.
    if (c1 < c2)
        out.w = w_hi;
    else if (c1 > c2)
        out.w = w_lo;
    else
        out.w = w_lo; // ties: lexicographically smallest allocation
    out.value = out.w * c1 + (1.0 - out.w) * c2;
    return out;
}

} // namespace

DecompositionReport evar_corrected_decomposition(const Mdp& m,
                                                 const DeterministicPolicy& pi,
                                                 RiskLevel alpha,
                                                 const DecompositionOptions& options) {
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();
    auto conds = conditionals(m, pi, options.atom_budget);
    const double oracle =
        evar(return_distribution(m, pi, options.atom_budget), alpha, options.evar).value;

    if (a <= 0.0) {
        int worst = 0;
        for (int s = 1; s < S; ++s)
            if (conds[s].min_outcome() < conds[worst].min_outcome()) worst = s;
        std::vector<double> w(S, 0.0);
        std::vector<double> zeta(S, 0.0);
        w[worst] = 1.0;
        std::vector<InnerEval> inner(S);
        for (int s = 0; s < S; ++s) inner[s] = {0.0, conds[s].min_outcome(), -1};
        DecompositionReport rep = weighted_report("evar-corrected", a, w,
                                                  AllocationMode::KlRelative, inner,
                                                  oracle);
        rep.inner_levels = zeta;
        return rep;
    }

    const double R = -std::log(a);
    // EVaR_{zeta}(d_s) is reused across many cells: memoize per state.
    std::vector<std::map<double, double>> memo(static_cast<std::size_t>(S));
    auto evar_at = [&](int s, double zeta) {
        auto it = memo[s].find(zeta);
        if (it != memo[s].end()) return it->second;
        double v = evar(conds[s], RiskLevel(clamp01(zeta)), options.evar).value;
        memo[s].emplace(zeta, v);
        return v;
    };

    // Inner solve for a fixed level vector zeta: exact for S = 2, grid plus
    // refinement over the relative-entropy set otherwise.
    struct InnerSolution {
        bool feasible = false;
        double value = 0.0;
        std::vector<double> xi;
    };
    auto inner_solve = [&](const std::vector<double>& zeta) {
        InnerSolution sol;
        double qsum = 0.0;
        for (int s = 0; s < S; ++s) qsum += phat[s] * zeta[s];
        if (qsum < a - 1e-13) return sol; // -log(sum q) > R: empty set
        if (S == 2) {
            auto r2 = corrected_inner_two(phat[0] * zeta[0], phat[1] * zeta[1],
                                          evar_at(0, zeta[0]), evar_at(1, zeta[1]), R);
            if (!r2.feasible) return sol;
            sol.feasible = true;
            sol.value = r2.value;
            sol.xi = {r2.w, 1.0 - r2.w};
            return sol;
        }
        FeasibleSet set{AllocationMode::KlRelative, a, phat, zeta};
        std::vector<double> center(static_cast<std::size_t>(S));
        for (int s = 0; s < S; ++s) center[s] = phat[s] * zeta[s] / qsum;
        std::vector<double> costs(static_cast<std::size_t>(S));
        for (int s = 0; s < S; ++s) costs[s] = evar_at(s, zeta[s]);
        Objective f = [&](const std::vector<double>& xi) {
            double v = 0.0;
            for (int s = 0; s < S; ++s) v += xi[s] * costs[s];
            return v;
        };
        try {
            auto opt = simplex_grid_optimize(set, std::max(options.h, 1.0 / 64.0), f,
                                             false, true, {center}, options.run_mode);
            sol.feasible = true;
            sol.value = opt.value;
            sol.xi = opt.allocation.weights;
        } catch (const EmptyFeasibleSet&) {
        }
        return sol;
    };

    // Outer search over the level box (0, 1]^S: one coarse sweep, then
    // shrinking-window grid refinement around the best coarse cells. The
    // window chain reaches ~1e-7 per-coordinate resolution in four passes
    // without the full fine lattice.
    int N = std::max(2, static_cast<int>(std::lround(1.0 / options.h)));
    N = std::min(N, 64);
    while (N > 4 && std::pow(static_cast<double>(N), S) > 4e6) N /= 2;

    struct Cell {
        double value;
        std::vector<double> zeta;
    };
    auto sweep_box = [&](const std::vector<double>& lo, const std::vector<double>& hi,
                         std::vector<Cell>& top, std::size_t keep) {
        std::vector<int> idx(static_cast<std::size_t>(S), 0);
        std::vector<double> zeta(static_cast<std::size_t>(S));
        while (true) {
            for (int s = 0; s < S; ++s)
                zeta[s] = std::min(1.0, std::max(1e-9,
                    lo[s] + (hi[s] - lo[s]) * idx[s] / (N - 1)));
            auto sol = inner_solve(zeta);
            if (sol.feasible) {
                Cell c{sol.value, zeta};
                auto pos = std::upper_bound(top.begin(), top.end(), c,
                                            [](const Cell& x, const Cell& y) {
                                                return x.value < y.value;
                                            });
                top.insert(pos, std::move(c));
                if (top.size() > keep) top.pop_back();
            }
            int s = S - 1;
            while (s >= 0 && ++idx[s] >= N) {
                idx[s] = 0;
                --s;
            }
            if (s < 0) break;
        }
    };

    std::vector<Cell> coarse;
    sweep_box(std::vector<double>(static_cast<std::size_t>(S), 1e-9),
              std::vector<double>(static_cast<std::size_t>(S), 1.0), coarse, 3);
    if (coarse.empty())
        throw EmptyFeasibleSet("no feasible level vector for the corrected scheme");

    InnerSolution best;
    std::vector<double> best_zeta;
    for (const auto& seed : coarse) {
        std::vector<double> center = seed.zeta;
        double width = 1.0 / (N - 1);
        for (int pass = 0; pass < 4; ++pass) {
            std::vector<double> lo(static_cast<std::size_t>(S)),
                hi(static_cast<std::size_t>(S));
            for (int s = 0; s < S; ++s) {
                lo[s] = std::max(1e-9, center[s] - width);
                hi[s] = std::min(1.0, center[s] + width);
            }
            std::vector<Cell> local;
            sweep_box(lo, hi, local, 1);
            if (!local.empty()) center = local.front().zeta;
            width = width * 4.0 / (N - 1);
        }
        auto sol = inner_solve(center);
        if (sol.feasible && (!best.feasible || sol.value < best.value)) {
            best = sol;
            best_zeta = center;
        }
    }
    if (!best.feasible) // every refined center infeasible: fall back to coarse
        for (const auto& seed : coarse)
            if (auto sol = inner_solve(seed.zeta); sol.feasible) {
                best = sol;
                best_zeta = seed.zeta;
                break;
            }

    std::vector<InnerEval> inner(S);
    for (int s = 0; s < S; ++s)
        inner[s] = {best_zeta[s], evar_at(s, best_zeta[s]), -1};
    DecompositionReport rep = weighted_report("evar-corrected", a, best.xi,
                                              AllocationMode::KlRelative, inner, oracle);
    return rep;
}

// ---------------------------------------------------------------------------
// Exact VaR / quantile decompositions via threshold feasibility
// ---------------------------------------------------------------------------

namespace {

std::vector<double> atom_union(const std::vector<const FiniteDistribution*>& ds) {
    std::vector<double> zs;
    for (const auto* d : ds)
        zs.insert(zs.end(), d->outcomes().begin(), d->outcomes().end());
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    return zs;
}

// Raise tail levels (in u-space) from their minimal values until
// sum_s phat_s u_s = alpha, absorbing slack from the last state backward so
// the induced zeta = phat u / alpha is the lexicographically smallest padded
// witness on the simplex.
void pad_levels(std::vector<double>& u, const std::vector<double>& phat, double alpha) {
    double lhs = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s) lhs += phat[s] * u[s];
    double slack = alpha - lhs;
    for (std::size_t k = u.size(); k-- > 0 && slack > 0.0;) {
        double du = std::min(1.0 - u[k], slack / phat[k]);
        u[k] += du;
        slack -= du * phat[k];
    }
}

} // namespace

DecompositionReport var_decomposition(const Mdp& m, const DeterministicPolicy& pi,
                                      RiskLevel alpha, std::int64_t atom_budget) {
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();
    auto conds = conditionals(m, pi, atom_budget);
    const double oracle = var(return_distribution(m, pi, atom_budget), alpha);

    DecompositionReport rep;
    rep.scheme = "var-eval";
    rep.alpha = a;
    rep.allocation.mode = AllocationMode::SimplexCappedSup;
    rep.oracle_value = oracle;

    std::vector<double> u(static_cast<std::size_t>(S), 0.0);
    double value;
    if (a >= 1.0) {
        u.assign(static_cast<std::size_t>(S), 1.0);
        value = kInf;
    } else {
        std::vector<const FiniteDistribution*> ptrs;
        for (const auto& d : conds) ptrs.push_back(&d);
        auto zs = atom_union(ptrs);
        value = zs.front();
        for (std::size_t k = zs.size(); k-- > 0;) {
            double cost = 0.0;
            for (int s = 0; s < S; ++s) cost += phat[s] * tail_below(conds[s], zs[k]);
            if (cost <= a) {
                value = zs[k];
                break;
            }
        }
        for (int s = 0; s < S; ++s) u[s] = tail_below(conds[s], value);
        pad_levels(u, phat, a);
    }

    rep.value = value;
    for (int s = 0; s < S; ++s) {
        rep.inner_levels.push_back(u[s]);
        rep.inner_values.push_back(var(conds[s], RiskLevel(u[s])));
        rep.inner_actions.push_back(-1);
        rep.allocation.weights.push_back(a > 0.0 ? phat[s] * u[s] / a : 0.0);
    }
    if (a <= 0.0) {
        // Degenerate simplex scaling: report the unpadded witness phat itself.
        rep.allocation.weights = phat;
    }
    rep.oracle_gap = (std::isinf(value) && value == oracle) ? 0.0 : value - oracle;
    return rep;
}

DecompositionReport var_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                          std::int64_t atom_budget) {
    require_one_stage(m, "var_opt_decomposition");
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();

    std::vector<std::vector<FiniteDistribution>> dists(S);
    for (int s = 0; s < S; ++s)
        for (int act : m.available(s)) dists[s].push_back(action_conditional(m, s, act));

    const double oracle =
        optimize_deterministic(m, atom_budget, [&](const DeterministicPolicy& p) {
            return var(return_distribution(m, p, atom_budget), alpha);
        }).value;

    DecompositionReport rep;
    rep.scheme = "var-opt";
    rep.alpha = a;
    rep.allocation.mode = AllocationMode::SimplexCappedSup;
    rep.oracle_value = oracle;

    std::vector<double> u(static_cast<std::size_t>(S), 0.0);
    std::vector<int> act(static_cast<std::size_t>(S), -1);
    double value;
    if (a >= 1.0) {
        u.assign(static_cast<std::size_t>(S), 1.0);
        for (int s = 0; s < S; ++s) act[s] = m.available(s).front();
        value = kInf;
    } else {
        std::vector<const FiniteDistribution*> ptrs;
        for (const auto& row : dists)
            for (const auto& d : row) ptrs.push_back(&d);
        auto zs = atom_union(ptrs);
        value = zs.front();
        auto min_tail = [&](int s, double z, int* which) {
            double best = kInf;
            int best_a = m.available(s).front();
            for (std::size_t k = 0; k < dists[s].size(); ++k) {
                double t = tail_below(dists[s][k], z);
                if (t < best) {
                    best = t;
                    best_a = m.available(s)[k];
                }
            }
            if (which) *which = best_a;
            return best;
        };
        for (std::size_t k = zs.size(); k-- > 0;) {
            double cost = 0.0;
            for (int s = 0; s < S; ++s) cost += phat[s] * min_tail(s, zs[k], nullptr);
            if (cost <= a) {
                value = zs[k];
                break;
            }
        }
        for (int s = 0; s < S; ++s) u[s] = min_tail(s, value, &act[s]);
        pad_levels(u, phat, a);
    }

    rep.value = value;
    for (int s = 0; s < S; ++s) {
        int k = static_cast<int>(std::find(m.available(s).begin(), m.available(s).end(),
                                           act[s]) -
                                 m.available(s).begin());
        rep.inner_levels.push_back(u[s]);
        rep.inner_values.push_back(var(dists[s][static_cast<std::size_t>(k)],
                                       RiskLevel(u[s])));
        rep.inner_actions.push_back(act[s]);
        rep.allocation.weights.push_back(a > 0.0 ? phat[s] * u[s] / a : 0.0);
    }
    if (a <= 0.0) rep.allocation.weights = phat;
    rep.oracle_gap = (std::isinf(value) && value == oracle) ? 0.0 : value - oracle;
    return rep;
}

DecompositionReport quantile_opt_decomposition(const Mdp& m, RiskLevel alpha,
                                               std::int64_t atom_budget) {
    require_one_stage(m, "quantile_opt_decomposition");
    const double a = alpha.value();
    const int S = m.num_states();
    const auto& phat = m.initial();

    std::vector<std::vector<FiniteDistribution>> dists(S);
    for (int s = 0; s < S; ++s)
        for (int act : m.available(s)) dists[s].push_back(action_conditional(m, s, act));

    const double oracle =
        optimize_deterministic(m, atom_budget, [&](const DeterministicPolicy& p) {
            return lower_quantile(return_distribution(m, p, atom_budget), alpha);
        }).value;

    DecompositionReport rep;
    rep.scheme = "quantile-opt";
    rep.alpha = a;
    rep.allocation.mode = AllocationMode::Box01StrictSum;
    rep.oracle_value = oracle;

    if (a <= 0.0) {
        // The strict-sum box is empty: report the Prop-7 convention directly.
        rep.value = -kInf;
        rep.inner_levels.assign(static_cast<std::size_t>(S), 0.0);
        rep.inner_values.assign(static_cast<std::size_t>(S), -kInf);
        rep.inner_actions.assign(static_cast<std::size_t>(S), -1);
        rep.allocation.weights.assign(static_cast<std::size_t>(S), 0.0);
        rep.oracle_gap = 0.0;
        return rep;
    }

    std::vector<const FiniteDistribution*> ptrs;
    for (const auto& row : dists)
        for (const auto& d : row) ptrs.push_back(&d);
    auto zs = atom_union(ptrs);

    auto min_tail = [&](int s, double z, int* which) {
        double best = kInf;
        int best_a = m.available(s).front();
        for (std::size_t k = 0; k < dists[s].size(); ++k) {
            double t = tail_below(dists[s][k], z);
            if (t < best) {
                best = t;
                best_a = m.available(s)[k];
            }
        }
        if (which) *which = best_a;
        return best;
    };

    double value = zs.front();
    double base_cost = 0.0;
    for (std::size_t k = zs.size(); k-- > 0;) {
        double cost = 0.0;
        for (int s = 0; s < S; ++s) cost += phat[s] * min_tail(s, zs[k], nullptr);
        if (cost < a) {
            value = zs[k];
            base_cost = cost;
            break;
        }
    }

    std::vector<double> u(static_cast<std::size_t>(S), 0.0);
    std::vector<int> act(static_cast<std::size_t>(S), -1);
    for (int s = 0; s < S; ++s) u[s] = min_tail(s, value, &act[s]);
    // Bump each participating level into the open interval where the
    // state's lower quantile reaches the threshold, spending at most half
    // the strict-feasibility slack.
    double slack = a - base_cost;
    for (int s = 0; s < S; ++s) {
        if (u[s] >= 1.0) continue;
        int k = static_cast<int>(std::find(m.available(s).begin(), m.available(s).end(),
                                           act[s]) -
                                 m.available(s).begin());
        double bump = mass_at_or_above(dists[s][static_cast<std::size_t>(k)], value);
        bump = std::min({bump, slack / (2.0 * S * phat[s]), 1.0 - u[s]});
        u[s] += bump;
    }

    rep.value = value;
    for (int s = 0; s < S; ++s) {
        int k = static_cast<int>(std::find(m.available(s).begin(), m.available(s).end(),
                                           act[s]) -
                                 m.available(s).begin());
        rep.inner_levels.push_back(u[s]);
        rep.inner_values.push_back(
            lower_quantile(dists[s][static_cast<std::size_t>(k)], RiskLevel(u[s])));
        rep.inner_actions.push_back(act[s]);
        rep.allocation.weights.push_back(u[s]);
    }
    rep.oracle_gap = (std::isinf(value) && value == oracle) ? 0.0 : value - oracle;
    return rep;
}

} // namespace riskdp
