#include "riskdp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskdp {

namespace {
constexpr double kMassTolerance = 1e-9;
constexpr double kNegClamp = -1e-12;
} // namespace

FiniteDistribution::FiniteDistribution(std::vector<double> outcomes,
                                       std::vector<double> probabilities)
    : outcomes_(std::move(outcomes)), probabilities_(std::move(probabilities)) {
    if (outcomes_.size() != probabilities_.size())
        throw BadMass("outcome/probability arrays differ in length");
    if (outcomes_.empty())
        throw BadMass("distribution must have at least one atom");
    for (double x : outcomes_)
        if (!std::isfinite(x))
            throw NonFiniteOutcome("non-finite outcome");
    double mass = 0.0;
    for (double& p : probabilities_) {
        if (p < kNegClamp)
            throw BadMass("negative probability");
        if (p < 0.0) p = 0.0;
        mass += p;
    }
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw BadMass("probabilities sum to " + std::to_string(mass));
    // Renormalize so downstream cumulative sums end at exactly 1.
    if (mass != 1.0)
        for (double& p : probabilities_) p /= mass;
}

bool FiniteDistribution::is_normal_form() const {
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
        if (probabilities_[k] <= 0.0) return false;
        if (k > 0 && outcomes_[k] <= outcomes_[k - 1]) return false;
    }
    return true;
}

double FiniteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < outcomes_.size(); ++k)
        m += probabilities_[k] * outcomes_[k];
    return m;
}

double FiniteDistribution::min_outcome() const { return outcomes_.front(); }
double FiniteDistribution::max_outcome() const { return outcomes_.back(); }

FiniteDistribution consolidate(const FiniteDistribution& d) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d.outcomes()[a] < d.outcomes()[b];
    });
    std::vector<double> xs, ps;
    xs.reserve(d.size());
    ps.reserve(d.size());
    for (std::size_t idx : order) {
        double x = d.outcomes()[idx];
        double p = d.probabilities()[idx];
        if (p <= 0.0) continue;
        if (!xs.empty() && xs.back() == x)
            ps.back() += p;
        else {
            xs.push_back(x);
            ps.push_back(p);
        }
    }
    if (xs.empty())
        throw BadMass("all atoms have zero probability");
    return FiniteDistribution(std::move(xs), std::move(ps));
}

FiniteDistribution make_distribution(std::vector<double> outcomes,
                                     std::vector<double> probabilities) {
    return consolidate(FiniteDistribution(std::move(outcomes), std::move(probabilities)));
}

} // namespace riskdp
