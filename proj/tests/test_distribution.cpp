#include <doctest.h>

#include <cmath>
#include <limits>

#include "riskdp/distribution.hpp"

using namespace riskdp;

TEST_CASE("consolidate sorts, merges duplicates, drops zero atoms") {
    // Raw atoms: 5 appears twice (0.25 + 0.25), 3 carries no mass.
    FiniteDistribution raw({5.0, 1.0, 5.0, 3.0}, {0.25, 0.5, 0.25, 0.0});
    CHECK(!raw.is_normal_form());
    auto d = consolidate(raw);
    REQUIRE(d.size() == 2);
    CHECK(d.outcomes()[0] == 1.0);
    CHECK(d.outcomes()[1] == 5.0);
    CHECK(d.probabilities()[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.probabilities()[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.is_normal_form());
}

TEST_CASE("consolidate preserves mass and mean") {
    FiniteDistribution raw({2.0, -1.0, 2.0, 0.0}, {0.1, 0.4, 0.3, 0.2});
    auto d = consolidate(raw);
    double mass = 0.0;
    for (double p : d.probabilities()) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.mean() == doctest::Approx(raw.mean()).epsilon(1e-14));
}

TEST_CASE("admission: small mass deviation renormalized, large rejected") {
    // 1e-10 off unit mass: admitted and renormalized.
    FiniteDistribution ok({0.0, 1.0}, {0.5, 0.5 + 1e-10});
    double mass = 0.0;
    for (double p : ok.probabilities()) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    // 1e-3 off: rejected.
    CHECK_THROWS_AS(FiniteDistribution({0.0, 1.0}, {0.5, 0.501}), BadMass);
    CHECK_THROWS_AS(FiniteDistribution({0.0, 1.0}, {-0.1, 1.1}), BadMass);
    CHECK_THROWS_AS(FiniteDistribution({}, {}), BadMass);
    CHECK_THROWS_AS(FiniteDistribution({1.0, 2.0}, {1.0}), BadMass);
}

TEST_CASE("admission: outcomes must be finite") {
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(FiniteDistribution({inf}, {1.0}), NonFiniteOutcome);
    CHECK_THROWS_AS(FiniteDistribution({std::nan("")}, {1.0}), NonFiniteOutcome);
}

TEST_CASE("single atom is already normal form") {
    auto d = make_distribution({7.5}, {1.0});
    CHECK(d.is_normal_form());
    CHECK(d.min_outcome() == 7.5);
    CHECK(d.max_outcome() == 7.5);
    CHECK(d.mean() == 7.5);
}
