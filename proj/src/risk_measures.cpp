#include "riskdp/risk_measures.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace riskdp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_normal_form(const FiniteDistribution& d) {
    if (!d.is_normal_form())
        throw BadMass("measure requires a consolidated distribution");
}
} // namespace

double var(const FiniteDistribution& d, RiskLevel alpha) {
    require_normal_form(d);
    const double a = alpha.value();
    if (a >= 1.0) return kInf;
    // Largest atom whose strictly-below mass still fits under alpha.
    // cum_before(0) = 0 <= alpha always, so the scan cannot fall through.
    double cum_before = 0.0;
    double best = d.outcomes().front();
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (cum_before <= a) best = d.outcomes()[k];
        else break;
        cum_before += d.probabilities()[k];
    }
    return best;
}

double lower_quantile(const FiniteDistribution& d, RiskLevel alpha) {
    require_normal_form(d);
    const double a = alpha.value();
    if (a <= 0.0) return -kInf;
    double cum = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        cum += d.probabilities()[k];
        if (cum >= a) return d.outcomes()[k];
    }
    // Mass sums to 1 >= alpha, so this is unreachable for alpha <= 1.
    return d.outcomes().back();
}

double cvar(const FiniteDistribution& d, RiskLevel alpha) {
    require_normal_form(d);
    const double a = alpha.value();
    if (a <= 0.0) return d.min_outcome();
    if (a >= 1.0) return d.mean();
    // Average the worst alpha-tail, splitting the boundary atom fractionally.
    double acc = 0.0, cum = 0.0;
    for (std::size_t k = 0; k < d.size() && cum < a; ++k) {
        double w = std::min(d.probabilities()[k], a - cum);
        acc += w * d.outcomes()[k];
        cum += w;
    }
    return acc / a;
}

namespace {

// Primal objective at beta, with outcomes pre-shifted by the minimum:
//   g(beta) = xmin - (1/beta) * (log sum_i p_i exp(-beta y_i) - log alpha),
// where y_i = x_i - xmin >= 0 and y_0 = 0 keeps the sum in [p_0, 1].
double evar_objective(const FiniteDistribution& d, double xmin, double beta,
                      double log_alpha) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        sum += d.probabilities()[k] * std::exp(-beta * (d.outcomes()[k] - xmin));
    return xmin - (std::log(sum) - log_alpha) / beta;
}

// Minimize xi.x over the KL ball {xi in simplex : KL(xi||p) <= radius} by a
// simplex lattice sweep followed by pairwise-transfer pattern search. This is
// deliberately independent of the primal's exponential-tilt structure so it
// can serve as a cross-check.
double evar_dual_value(const FiniteDistribution& d, double radius, double step) {
    const std::size_t m = d.size();
    const auto& x = d.outcomes();
    const auto& p = d.probabilities();
    auto feasible = [&](const std::vector<double>& xi) {
        double kl = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (xi[i] <= 0.0) continue;
            if (p[i] <= 0.0) return false;
            kl += xi[i] * std::log(xi[i] / p[i]);
        }
        return kl <= radius + 1e-15;
    };
    auto objective = [&](const std::vector<double>& xi) {
        double v = 0.0;
        for (std::size_t i = 0; i < m; ++i) v += xi[i] * x[i];
        return v;
    };

    // Lattice sweep (compositions of N into m parts); p itself is seeded so
    // the feasible set is never empty (KL(p||p) = 0). The step is coarsened
    // when the composition count would exceed ~2e6; the pattern search below
    // recovers the lost resolution.
    std::vector<double> best(p.begin(), p.end());
    double best_val = objective(best);
    int N = std::max(1, static_cast<int>(std::lround(1.0 / step)));
    auto composition_count = [&](int n) {
        double c = 1.0;
        for (std::size_t j = 1; j < m; ++j)
            c *= static_cast<double>(n + j) / static_cast<double>(j);
        return c;
    };
    while (N > 1 && composition_count(N) > 2e6) N /= 2;
    std::vector<int> comp(m, 0);
    comp[0] = N;
    std::vector<double> xi(m);
    while (true) {
        for (std::size_t i = 0; i < m; ++i) xi[i] = static_cast<double>(comp[i]) / N;
        if (feasible(xi)) {
            double v = objective(xi);
            if (v < best_val) {
                best_val = v;
                best = xi;
            }
        }
        // Next composition in colex order.
        std::size_t i = 0;
        while (i + 1 < m && comp[i] == 0) ++i;
        if (i + 1 >= m) break;
        int take = comp[i];
        comp[i] = 0;
        comp[0] = take - 1;
        comp[i + 1] += 1;
    }

    // Pairwise mass transfers with step halving refine into the ball.
    double delta = step;
    while (delta > 1e-9) {
        bool improved = false;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                if (best[j] < delta) continue;
                std::vector<double> cand = best;
                cand[i] += delta;
                cand[j] -= delta;
                if (!feasible(cand)) continue;
                double v = objective(cand);
                if (v < best_val - 1e-15) {
                    best_val = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) delta *= 0.5;
    }
    return best_val;
}

} // namespace

EvarResult evar(const FiniteDistribution& d, RiskLevel alpha,
                const EvarOptions& options) {
    require_normal_form(d);
    const double a = alpha.value();
    EvarResult result;

    auto attach_dual = [&](double) {
        if (options.with_dual && a > 0.0)
            result.dual_value = evar_dual_value(d, -std::log(a), options.dual_grid_step);
    };

    if (d.size() == 1) {
        result.value = d.outcomes().front();
        attach_dual(result.value);
        return result;
    }
    if (a <= 0.0) {
        result.value = d.min_outcome();
        attach_dual(result.value);
        return result;
    }
    if (a >= 1.0) {
        result.value = d.mean();
        attach_dual(result.value);
        return result;
    }
    // alpha <= p_min: the point mass on the minimum lies inside the KL ball,
    // so EVaR equals ess inf and the primal supremum is a beta -> inf limit.
    if (a <= d.probabilities().front()) {
        result.value = d.min_outcome();
        attach_dual(result.value);
        return result;
    }

    const double xmin = d.min_outcome();
    const double range = d.max_outcome() - xmin;
    const double log_alpha = std::log(a);
    double lo = options.beta_min_scale / range;
    double hi = options.beta_max_scale / range;

    // Expand until the objective is decreasing near the upper end, i.e. the
    // interior maximizer is bracketed. The alpha <= p_min branch above removed
    // the analytic non-attainment case, so failure here is a range problem.
    auto g = [&](double beta) { return evar_objective(d, xmin, beta, log_alpha); };
    int expansions = 0;
    while (g(hi) > g(hi * 0.7)) {
        hi *= 2.0;
        if (++expansions > 200)
            throw BracketFailure("EVaR objective still rising at beta upper bound");
    }

    // Golden-section maximization on [lo, hi].
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;  // 0.618...
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0; // 0.382...
    double x1 = lo + invphi2 * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 300; ++it) {
        if (hi - lo <= options.beta_tol * (1.0 + std::abs(lo))) break;
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + invphi2 * (hi - lo);
            f1 = g(x1);
        }
    }
    double beta_star = (f1 > f2) ? x1 : x2;
    result.value = std::max(f1, f2);
    result.beta_star = beta_star;
    attach_dual(result.value);
    return result;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw BadMass("KL divergence requires same-length weight vectors");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInf;
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

} // namespace riskdp
