#pragma once

#include <cstddef>
#include <vector>

#include "riskdp/errors.hpp"

namespace riskdp {

// Finitely supported distribution on the reals, stored as parallel arrays
// of outcomes and probabilities.
//
// Two representations exist:
//   raw    - any order, duplicates allowed, zero-probability atoms allowed;
//            this is what model enumeration produces.
//   normal - outcomes strictly increasing, every probability > 0, mass
//            exactly renormalized to 1; produced by consolidate().
//
// Admission rules (checked on construction):
//   * every outcome is finite,
//   * every probability >= 0 (values in [-1e-12, 0) are clamped to 0),
//   * total mass within 1e-9 of 1, then renormalized to sum exactly 1.
class FiniteDistribution {
public:
    FiniteDistribution(std::vector<double> outcomes, std::vector<double> probabilities);

    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    std::size_t size() const { return outcomes_.size(); }

    // True when in normal form (sorted strictly increasing, all atoms > 0).
    bool is_normal_form() const;

    double mean() const;
    double min_outcome() const; // requires normal form
    double max_outcome() const; // requires normal form

private:
    std::vector<double> outcomes_;
    std::vector<double> probabilities_;
};

// Sort outcomes, merge duplicates (exact double equality), drop zero atoms.
// Total mass is preserved; the input was already renormalized on admission.
FiniteDistribution consolidate(const FiniteDistribution& d);

// Convenience: build-and-consolidate in one step.
FiniteDistribution make_distribution(std::vector<double> outcomes,
                                     std::vector<double> probabilities);

} // namespace riskdp
