#include "riskdp/var_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskdp/errors.hpp"

namespace riskdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First grid index whose value reaches `need`, with a relative slack so that
// a threshold reconstructed as (r + F) - r does not overshoot F by one ulp
// and get charged a whole extra grid step.
std::size_t first_level_at_least(const std::vector<double>& F, double need) {
    double want = need - 1e-12 * std::max(1.0, std::fabs(need));
    if (std::isinf(need)) want = need;
    return static_cast<std::size_t>(std::lower_bound(F.begin(), F.end(), want) -
                                    F.begin());
}

void pad_levels(std::vector<double>& u, const std::vector<double>& phat, double alpha) {
    double lhs = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s) lhs += phat[s] * u[s];
    double slack = alpha - lhs;
    for (std::size_t k = u.size(); k-- > 0 && slack > 0.0;) {
        if (phat[k] <= 0.0) continue;
        double du = std::min(1.0 - u[k], slack / phat[k]);
        u[k] += du;
        slack -= du * phat[k];
    }
}

} // namespace

AlphaGrid AlphaGrid::uniform(double h) {
    if (!(h > 0.0 && h <= 1.0)) throw Error("grid step must lie in (0, 1]");
    double n = 1.0 / h;
    long long N = std::llround(n);
    if (N < 1 || std::fabs(n - static_cast<double>(N)) > 1e-9)
        throw Error("grid step must divide 1");
    AlphaGrid g;
    g.levels.resize(static_cast<std::size_t>(N) + 1);
    for (std::size_t k = 0; k < g.levels.size(); ++k)
        g.levels[k] = static_cast<double>(k) / static_cast<double>(N);
    return g;
}

VarDpResult var_dp_horizon(const Mdp& m, RiskLevel alpha, const AlphaGrid& grid) {
    const auto& lv = grid.levels;
    if (lv.size() < 2 || lv.front() != 0.0 || lv.back() != 1.0 ||
        !std::is_sorted(lv.begin(), lv.end()))
        throw Error("level grid must be sorted with endpoints 0 and 1");
    const int S = m.num_states();
    const int A = m.num_actions();
    const int T = m.horizon();
    const std::size_t K = lv.size() - 1;

    VarDpResult res;
    res.grid = grid;
    res.values.assign(static_cast<std::size_t>(T),
                      std::vector<std::vector<std::vector<double>>>(
                          static_cast<std::size_t>(S),
                          std::vector<std::vector<double>>(
                              static_cast<std::size_t>(A),
                              std::vector<double>(K + 1, -kInf))));

    // F[t][s][k] = max_a values[t-1][s][a][k] for t in 1..T; F[T+1] is the
    // terminal stage: threshold 0 below level 1, +inf at level 1. Index t-1.
    std::vector<std::vector<std::vector<double>>> F(
        static_cast<std::size_t>(T) + 1,
        std::vector<std::vector<double>>(static_cast<std::size_t>(S),
                                         std::vector<double>(K + 1, 0.0)));
    for (int s = 0; s < S; ++s) F[static_cast<std::size_t>(T)][s][K] = kInf;

    for (int t = T; t >= 1; --t) {
        const auto& Fn = F[static_cast<std::size_t>(t)]; // stage t+1 values
        auto& Fc = F[static_cast<std::size_t>(t - 1)];
        for (int s = 0; s < S; ++s) {
            for (int a : m.available(s)) {
                auto& q = res.values[static_cast<std::size_t>(t - 1)][s][a];
                std::vector<int> supp;
                for (int sp = 0; sp < S; ++sp)
                    if (m.p(s, a, sp) > 0.0) supp.push_back(sp);

                // Finite threshold candidates: one reward-shifted copy of
                // every successor value below level 1.
                std::vector<double> cands;
                cands.reserve(supp.size() * K);
                for (int sp : supp)
                    for (std::size_t k = 0; k < K; ++k)
                        cands.push_back(m.r(s, a, sp) + Fn[sp][k]);
                std::sort(cands.begin(), cands.end());
                cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

                // Minimal level budget per candidate; nondecreasing in z.
                std::vector<double> costs(cands.size());
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    double c = 0.0;
                    for (int sp : supp)
                        c += m.p(s, a, sp) *
                             lv[first_level_at_least(Fn[sp], cands[i] - m.r(s, a, sp))];
                    costs[i] = c;
                }
                for (std::size_t i = 1; i < costs.size(); ++i)
                    if (costs[i] < costs[i - 1])
                        throw GridTooCoarse("non-monotone level cost");

                for (std::size_t k = 0; k < K; ++k) {
                    auto it = std::upper_bound(costs.begin(), costs.end(), lv[k]);
                    if (it == costs.begin())
                        throw GridTooCoarse("no feasible threshold at a grid level");
                    q[k] = cands[static_cast<std::size_t>(it - costs.begin()) - 1];
                }
                q[K] = kInf;
            }
            for (std::size_t k = 0; k <= K; ++k) {
                double best = -kInf;
                for (int a : m.available(s))
                    best = std::max(best,
                                    res.values[static_cast<std::size_t>(t - 1)][s][a][k]);
                Fc[s][k] = best;
            }
            if (!std::is_sorted(Fc[s].begin(), Fc[s].end()))
                throw GridTooCoarse("stage values not monotone in the level");
        }
    }

    // Initial-stage threshold at the true query level.
    const double a0 = alpha.value();
    const auto& F1 = F[0];
    const auto& phat = m.initial();
    std::vector<std::size_t> kinit(static_cast<std::size_t>(S), 0);
    if (a0 >= 1.0) {
        res.v0 = kInf;
        kinit.assign(static_cast<std::size_t>(S), K);
    } else {
        std::vector<double> cands;
        for (int s = 0; s < S; ++s) {
            if (phat[s] <= 0.0) continue;
            for (std::size_t k = 0; k < K; ++k) cands.push_back(F1[s][k]);
        }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        std::vector<double> costs(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            double c = 0.0;
            for (int s = 0; s < S; ++s)
                if (phat[s] > 0.0)
                    c += phat[s] * lv[first_level_at_least(F1[s], cands[i])];
            costs[i] = c;
        }
        auto it = std::upper_bound(costs.begin(), costs.end(), a0);
        if (it == costs.begin())
            throw GridTooCoarse("no feasible initial threshold");
        res.v0 = cands[static_cast<std::size_t>(it - costs.begin()) - 1];
        for (int s = 0; s < S; ++s)
            kinit[static_cast<std::size_t>(s)] =
                (phat[s] > 0.0) ? first_level_at_least(F1[s], res.v0) : 0;
    }

    res.initial_levels.resize(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s)
        res.initial_levels[static_cast<std::size_t>(s)] =
            lv[kinit[static_cast<std::size_t>(s)]];
    std::vector<double> padded = res.initial_levels;
    pad_levels(padded, phat, a0);
    res.initial_allocation.mode = AllocationMode::SimplexCappedSup;
    res.initial_allocation.weights.resize(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s)
        res.initial_allocation.weights[static_cast<std::size_t>(s)] =
            (a0 > 0.0) ? phat[s] * padded[static_cast<std::size_t>(s)] / a0 : phat[s];

    // Extract the certifying history policy: at each reachable decision
    // point play the argmax action for the assigned level and split the
    // cell's own optimal threshold across successors.
    std::int64_t nodes = 0;
    auto extract = [&](auto&& self, int t, std::vector<int>& hist, int s,
                       std::size_t k) -> void {
        if (++nodes > kDefaultAtomBudget)
            throw ExplosionGuard("policy extraction exceeds the atom budget");
        const auto& stage = res.values[static_cast<std::size_t>(t - 1)];
        int best_a = m.available(s).front();
        for (int a : m.available(s))
            if (stage[s][a][k] > stage[s][best_a][k]) best_a = a;
        res.policy.policy.choice[hist] = best_a;
        res.policy.levels[hist] = lv[k];
        if (t == T) return;
        double z = stage[s][best_a][k];
        for (int sp = 0; sp < S; ++sp) {
            if (m.p(s, best_a, sp) <= 0.0) continue;
            std::size_t kp = first_level_at_least(F[static_cast<std::size_t>(t)][sp],
                                                  z - m.r(s, best_a, sp));
            hist.push_back(best_a);
            hist.push_back(sp);
            self(self, t + 1, hist, sp, kp);
            hist.pop_back();
            hist.pop_back();
        }
    };
    for (int s = 0; s < S; ++s) {
        if (phat[s] <= 0.0) continue;
        std::vector<int> hist{s};
        extract(extract, 1, hist, s, kinit[static_cast<std::size_t>(s)]);
    }
    return res;
}

} // namespace riskdp
