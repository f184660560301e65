#pragma once

#include <cstdint>
#include <map>

#include "valsketch/eval.hpp"

namespace valsketch {

/// One score per item, all computed with the same replication count and
/// sample size.
struct TestScoreTable {
    std::size_t k = 1;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::map<ItemId, double> scores;
};

/// Monte Carlo estimate of E[f(X^(1), ..., X^(k))] over k independent copies
/// of the item's value. Draw j of replica r reads position j k + r of the
/// counter stream (seed, stream_id).
[[nodiscard]] double replication_test_score(const ItemDistribution& dist, const ValuationSpec& spec, std::size_t k,
                                            std::size_t n_samples, std::uint64_t seed, std::uint64_t stream_id = 0);

/// The same estimate with its standard error (method MonteCarlo).
[[nodiscard]] EvalEstimate replication_test_score_estimate(const ItemDistribution& dist, const ValuationSpec& spec,
                                                           std::size_t k, std::size_t n_samples, std::uint64_t seed,
                                                           std::uint64_t stream_id = 0);

/// Scores every item of the catalog; item i uses stream id i.
[[nodiscard]] TestScoreTable build_test_score_table(const DistributionCatalog& dists, const ValuationSpec& spec,
                                                    std::size_t k, std::size_t n_samples, std::uint64_t seed);

/// max_{i in S} a_i, and 0 for the empty set.
[[nodiscard]] double testscore_sketch_value(const TestScoreTable& table, const ItemSet& set);

}  // namespace valsketch
