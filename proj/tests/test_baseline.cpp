#include <cmath>

#include "doctest.h"
#include "valsketch/baseline.hpp"
#include "valsketch/error.hpp"

using namespace valsketch;

TEST_SUITE("baseline") {

TEST_CASE("point mass scores its value") {
    const auto pm = ItemDistribution::discrete(DiscreteDistribution::point_mass(3.5));
    for (std::size_t k : {1u, 2u, 7u}) CHECK(replication_test_score(pm, ValuationSpec::max(), k, 100, 1) == 3.5);
}

TEST_CASE("two replicas of an exponential under max") {
    const auto e = replication_test_score_estimate(ItemDistribution::exponential(1.0), ValuationSpec::max(), 2,
                                                   1'000'000, 5);
    CHECK(e.method == EvalMethod::MonteCarlo);
    CHECK(std::abs(e.value - 1.5) <= 3.0 * e.std_error);
}

TEST_CASE("one replica is the single-item expectation") {
    const auto e = replication_test_score_estimate(ItemDistribution::uniform(0.0, 4.0),
                                                   ValuationSpec::concave_of_sum(ScalarConcave::sqrt()), 1, 400'000, 6);
    // E[sqrt(U)] for U uniform on [0, 4] is 4/3.
    CHECK(std::abs(e.value - 4.0 / 3.0) <= 3.0 * e.std_error);
}

TEST_CASE("sketch value aggregates by max") {
    TestScoreTable t;
    t.scores = {{1, 2.0}, {2, 5.0}};
    CHECK(testscore_sketch_value(t, {1, 2}) == 5.0);
    CHECK(testscore_sketch_value(t, {1}) == 2.0);
    CHECK(testscore_sketch_value(t, {}) == 0.0);
    CHECK_THROWS_AS((void)testscore_sketch_value(t, {1, 3}), InvalidInput);
}

TEST_CASE("scores are monotone in k and scale with the values") {
    const auto e1 = ItemDistribution::exponential(1.0);
    const auto e3 = ItemDistribution::exponential(3.0);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 6; ++k) {
        const double s = replication_test_score(e1, ValuationSpec::max(), k, 20000, 9);
        CHECK(s >= prev);
        prev = s;
        // Same uniforms, values scaled by 3: the score scales exactly for a degree-1 function.
        CHECK(replication_test_score(e3, ValuationSpec::max(), k, 20000, 9) == doctest::Approx(3.0 * s).epsilon(1e-12));
    }
}

TEST_CASE("domain violations are rejected") {
    CHECK_THROWS_AS((void)replication_test_score(ItemDistribution::uniform(0.0, 2.0),
                                                 ValuationSpec::success_probability(), 2, 100, 1),
                    InvalidInput);
}

TEST_CASE("table uses one stream per item") {
    const DistributionCatalog c{{1, ItemDistribution::exponential(1.0)}, {4, ItemDistribution::exponential(2.0)}};
    const auto t = build_test_score_table(c, ValuationSpec::max(), 3, 5000, 11);
    CHECK(t.k == 3);
    CHECK(t.n_samples == 5000);
    CHECK(t.scores.at(4) == replication_test_score(c.at(4), ValuationSpec::max(), 3, 5000, 11, 4));
}

}  // TEST_SUITE
