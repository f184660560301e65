#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valsketch/eval.hpp"
#include "valsketch/io.hpp"

namespace valsketch::bench {

enum class DistFamily { Exponential, Pareto, Csv };
enum class SketchSource { Training, Population };

[[nodiscard]] std::string to_string(DistFamily f);

struct NamedValuation {
    std::string id;
    ValuationSpec spec;
};

struct CsvSchema {
    std::string value_column = "value";
    std::string group_column = "item";
    std::size_t min_rows = 1;
};

/// Test-score baseline records, emitted next to the discretization ones.
struct BaselineConfig {
    std::size_t n_samples = 2000;
    /// Replicas per score; unset means the set size k.
    std::optional<std::size_t> replicas;
};

/// Experiment configuration. JSON keys match the field names; unknown keys
/// are rejected.
struct ExperimentConfig {
    std::size_t n = 50;
    std::size_t n_train = 500;
    std::vector<NamedValuation> valuations;
    std::vector<DistFamily> families{DistFamily::Exponential, DistFamily::Pareto};
    std::vector<int> k_values;
    std::vector<double> c_values{0.1};
    std::size_t sets_per_k = 50;
    std::uint64_t seed = 0;
    std::optional<double> lower_cut;  ///< overrides the default a
    std::optional<double> epsilon;    ///< overrides c / k
    SketchSource sketch_source = SketchSource::Training;
    std::size_t v_samples = 10000;
    double fast_path_cap = 2e7;
    std::optional<BaselineConfig> baseline;
    CsvSchema csv;
    unsigned workers = 1;

    /// Max, CES r = 2 and the square root of the sum; k = 1..20.
    static ExperimentConfig defaults();
    void validate() const;
};

[[nodiscard]] ExperimentConfig config_from_json(const io::json& j);
[[nodiscard]] io::json config_to_json(const ExperimentConfig& cfg);

struct RatioRecord {
    std::string valuation;
    std::string family;
    std::string sketch;  ///< "discretization" or "testscore"
    int k = 0;
    std::optional<double> c;
    std::optional<double> epsilon;
    std::optional<double> lower_cut;
    std::optional<double> delta;
    std::optional<double> alpha;
    std::optional<double> beta;
    ItemSet set;
    EvalEstimate u;
    EvalEstimate v;
    double ratio = 0.0;  ///< v / u
};

struct SkipRecord {
    std::string valuation;
    std::string family;
    std::string sketch;
    int k = 0;
    std::optional<double> c;
    ItemSet set;
    std::string reason;
};

struct ExperimentResult {
    std::vector<RatioRecord> records;
    std::vector<SkipRecord> skips;
    std::size_t tasks = 0;
    io::json item_meta;  ///< per family: the items' laws
};

/// Synthetic experiment: item laws drawn from the master seed, u estimated
/// from n_train joint training draws, v from the per-item sketches.
[[nodiscard]] ExperimentResult run_synthetic(const ExperimentConfig& cfg);

/// Same pipeline over empirical item laws (ids 1..n in group-name order);
/// k values above the number of items are clamped.
[[nodiscard]] ExperimentResult run_real(const ExperimentConfig& cfg, const std::map<std::string, Empirical>& data);

/// Groups rows by the schema's group column; groups with fewer than
/// min_rows rows are dropped.
[[nodiscard]] std::map<std::string, Empirical> ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// (up + c1) / (up + down + c2).
[[nodiscard]] double bayesian_ratio(long long up, long long down, double c1, double c2);

struct SummaryRow {
    std::string valuation;
    std::string family;
    std::string sketch;
    int k = 0;
    std::optional<double> c;
    std::size_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Box-plot statistics of v/u per (valuation, family, sketch, k, c), in
/// order of first appearance.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<RatioRecord>& records);

/// Linear-interpolation quantile of an unsorted sample (p in [0, 1]).
[[nodiscard]] double sample_quantile(std::vector<double> values, double p);

[[nodiscard]] std::string results_csv(const std::vector<RatioRecord>& records);
[[nodiscard]] std::string skips_csv(const std::vector<SkipRecord>& skips);

/// Writes results.csv, skips.csv, summary.json and run_meta.json.
void emit_report(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace valsketch::bench
