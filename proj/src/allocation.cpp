#include "riskdp/allocation.hpp"

#include <cmath>

namespace riskdp {

const char* allocation_mode_name(AllocationMode mode) {
    switch (mode) {
        case AllocationMode::SimplexCapped: return "simplex-capped";
        case AllocationMode::KlCapped: return "kl-capped";
        case AllocationMode::KlRelative: return "kl-relative";
        case AllocationMode::Box01StrictSum: return "box01-strict-sum";
        case AllocationMode::SimplexCappedSup: return "simplex-capped-sup";
    }
    return "?";
}

bool FeasibleSet::feasible(const std::vector<double>& w, double tol) const {
    if (w.size() != phat.size()) return false;
    const std::size_t S = w.size();

    if (mode == AllocationMode::Box01StrictSum) {
        double dot = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            if (w[s] < -tol || w[s] > 1.0 + tol) return false;
            dot += w[s] * phat[s];
        }
        return dot < alpha;
    }

    double sum = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        if (w[s] < -tol) return false;
        sum += w[s];
    }
    if (std::abs(sum - 1.0) > tol) return false;

    switch (mode) {
        case AllocationMode::SimplexCapped:
        case AllocationMode::SimplexCappedSup:
            for (std::size_t s = 0; s < S; ++s)
                if (alpha * w[s] > phat[s] + tol) return false;
            return true;
        case AllocationMode::KlCapped: {
            double kl = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                if (alpha * w[s] > phat[s] + tol) return false;
                if (w[s] <= 0.0) continue;
                if (phat[s] <= 0.0) return false;
                kl += w[s] * std::log(w[s] / phat[s]);
            }
            return kl <= -std::log(alpha) + tol;
        }
        case AllocationMode::KlRelative: {
            double budget = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                if (w[s] <= 0.0) continue;
                if (phat[s] <= 0.0) return false;
                budget += w[s] * (std::log(w[s] / phat[s]) - std::log(zeta[s]));
            }
            return budget <= -std::log(alpha) + tol;
        }
        default: return false;
    }
}

} // namespace riskdp
