#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskdp/lattice.hpp"

#ifdef RISKDP_HAVE_OPENMP
#include <omp.h>
#endif

using namespace riskdp;

namespace {
FeasibleSet simplex_capped(double alpha, std::vector<double> phat,
                           AllocationMode mode = AllocationMode::SimplexCapped) {
    FeasibleSet set;
    set.mode = mode;
    set.alpha = alpha;
    set.phat = std::move(phat);
    return set;
}
} // namespace

TEST_CASE("simplex cap binds exactly on lattice points") {
    // alpha zeta_1 <= phat_1 caps zeta_1 at 0.625 = 5/8, a lattice point.
    auto set = simplex_capped(0.8, {0.5, 0.5});
    auto best = simplex_grid_optimize(
        set, 1.0 / 8.0, [](const std::vector<double>& z) { return -z[0]; }, false,
        false);
    CHECK(best.allocation.weights[0] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(best.value == doctest::Approx(-0.625).epsilon(1e-14));
}

TEST_CASE("linear objective reaches a vertex; ties go to the lex-smallest point") {
    auto set = simplex_capped(0.5, {0.5, 0.5});
    auto lin = simplex_grid_optimize(
        set, 0.1, [](const std::vector<double>& z) { return 2.0 * z[0] + z[1]; }, false,
        false);
    CHECK(lin.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.allocation.weights[0] == 0.0);

    FeasibleSet free3 = simplex_capped(0.25, {0.3, 0.3, 0.4});
    auto tie = simplex_grid_optimize(
        free3, 0.5, [](const std::vector<double>&) { return 42.0; }, false, false);
    // All lattice points score 42; the lex-smallest is (0, 0, 1).
    CHECK(tie.allocation.weights == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("pattern search refines to an off-lattice minimizer") {
    auto set = simplex_capped(0.5, {0.5, 0.5});
    const double target = 0.3141;
    auto best = simplex_grid_optimize(
        set, 0.25,
        [&](const std::vector<double>& z) {
            return (z[0] - target) * (z[0] - target);
        },
        false, true);
    CHECK(std::abs(best.allocation.weights[0] - target) <= 1e-8);
    CHECK(best.allocation.weights[0] + best.allocation.weights[1] ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kl-capped set collapses to phat as alpha approaches 1") {
    auto set = simplex_capped(1.0, {0.4, 0.6}, AllocationMode::KlCapped);
    // No lattice point satisfies KL <= 0 exactly...
    CHECK_THROWS_AS(simplex_grid_optimize(
                        set, 1.0 / 3.0,
                        [](const std::vector<double>& z) { return z[0]; }, false, false),
                    EmptyFeasibleSet);
    // ...but the seeded reference point does.
    auto best = simplex_grid_optimize(
        set, 1.0 / 3.0, [](const std::vector<double>& z) { return z[0]; }, false, false,
        {{0.4, 0.6}});
    CHECK(best.allocation.weights == std::vector<double>{0.4, 0.6});
}

TEST_CASE("strict-sum box set is empty at alpha = 0") {
    FeasibleSet set;
    set.mode = AllocationMode::Box01StrictSum;
    set.alpha = 0.0;
    set.phat = {0.5, 0.5};
    CHECK_THROWS_AS(simplex_grid_optimize(
                        set, 0.5, [](const std::vector<double>&) { return 0.0; }, false,
                        false),
                    EmptyFeasibleSet);
}

TEST_CASE("strict-sum box keeps the weighted sum strictly below alpha") {
    FeasibleSet set;
    set.mode = AllocationMode::Box01StrictSum;
    set.alpha = 0.3;
    set.phat = {0.5, 0.5};
    auto best = simplex_grid_optimize(
        set, 1.0 / 64.0,
        [](const std::vector<double>& z) { return -(z[0] + z[1]); }, false, true);
    double dot = 0.5 * (best.allocation.weights[0] + best.allocation.weights[1]);
    CHECK(dot < 0.3);
    CHECK(best.value <= -0.59); // refinement walks close to the open boundary
}

TEST_CASE("parallel scan is bit-identical to the serial reference") {
#ifdef RISKDP_HAVE_OPENMP
    omp_set_num_threads(4); // oversubscribe: determinism must not depend on cores
#endif
    auto poly = [](const std::vector<double>& z) {
        double v = std::sin(3.1 * z[0]) + 0.25 * z[0] * z[0];
        for (std::size_t i = 1; i < z.size(); ++i)
            v += std::cos(2.7 * z[i] + 0.3) * (0.7 + 0.1 * static_cast<double>(i));
        return v;
    };
    std::vector<FeasibleSet> sets;
    sets.push_back(simplex_capped(0.5, {0.5, 0.5}));
    sets.push_back(simplex_capped(0.35, {0.2, 0.5, 0.3}));
    sets.push_back(simplex_capped(0.6, {0.25, 0.25, 0.25, 0.25},
                                  AllocationMode::KlCapped));
    {
        FeasibleSet box;
        box.mode = AllocationMode::Box01StrictSum;
        box.alpha = 0.7;
        box.phat = {0.4, 0.3, 0.3};
        sets.push_back(box);
    }
    for (const auto& set : sets) {
        for (bool maximize : {false, true}) {
            auto a = scan_lattice(set, 37, poly, maximize, {}, RunMode::Serial);
            auto b = scan_lattice(set, 37, poly, maximize, {}, RunMode::Parallel);
            REQUIRE(a.found == b.found);
            CHECK(a.value == b.value); // exact equality, not approx
            CHECK(a.point == b.point);
        }
    }
}

TEST_CASE("single state forces the whole budget onto one coordinate") {
    auto set = simplex_capped(0.7, {1.0});
    auto best = simplex_grid_optimize(
        set, 0.25, [](const std::vector<double>& z) { return 5.0 * z[0]; }, false, true);
    CHECK(best.allocation.weights == std::vector<double>{1.0});
    CHECK(best.value == 5.0);
}
