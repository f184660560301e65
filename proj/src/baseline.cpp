#include "valsketch/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "valsketch/error.hpp"

namespace valsketch {

EvalEstimate replication_test_score_estimate(const ItemDistribution& dist, const ValuationSpec& spec, std::size_t k,
                                             std::size_t n_samples, std::uint64_t seed, std::uint64_t stream_id) {
    if (k < 1) throw InvalidInput("replication count k must be >= 1");
    if (n_samples < 1) throw InvalidInput("test score needs at least one sample");
    CounterStream stream(seed, stream_id);
    std::vector<double> x(k);
    std::vector<double> values(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        for (std::size_t r = 0; r < k; ++r) x[r] = sample_at(dist, stream.uniform_at(j * k + r));
        values[j] = evaluate(spec, x);
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(n_samples);
    EvalEstimate est{sum / n, 0.0, EvalMethod::MonteCarlo, n_samples, seed};
    if (n_samples > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.value) * (v - est.value);
        est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return est;
}

double replication_test_score(const ItemDistribution& dist, const ValuationSpec& spec, std::size_t k,
                              std::size_t n_samples, std::uint64_t seed, std::uint64_t stream_id) {
    return replication_test_score_estimate(dist, spec, k, n_samples, seed, stream_id).value;
}

TestScoreTable build_test_score_table(const DistributionCatalog& dists, const ValuationSpec& spec, std::size_t k,
                                      std::size_t n_samples, std::uint64_t seed) {
    TestScoreTable table{k, n_samples, seed, {}};
    for (const auto& [id, dist] : dists) {
        table.scores[id] = replication_test_score(dist, spec, k, n_samples, seed, static_cast<std::uint64_t>(id));
    }
    return table;
}

double testscore_sketch_value(const TestScoreTable& table, const ItemSet& set) {
    double best = 0.0;
    for (ItemId id : set) {
        auto it = table.scores.find(id);
        if (it == table.scores.end()) throw InvalidInput("no test score for item " + std::to_string(id));
        best = std::max(best, it->second);
    }
    return best;
}

}  // namespace valsketch
