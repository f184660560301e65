#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "valsketch/baseline.hpp"
#include "valsketch/eval.hpp"
#include "valsketch/sketcher.hpp"

namespace valsketch::io {

using nlohmann::json;

// Valuations:
//   {"variant": "max"}                   {"variant": "top_h", "h": 2}
//   {"variant": "ces", "r": 2}           {"variant": "power_of_sum", "r": 0.5}
//   {"variant": "success_probability"}
//   {"variant": "concave_of_sum", "g": {"variant": "sqrt" | "power" | "exp_saturation", "exponent": r, "rate": l}}
//   {"variant": "transformed", "base": {...}, "transforms": [{"variant": "power", "exponent": p}, ...],
//    "properties": {...}}
[[nodiscard]] ValuationSpec valuation_from_json(const json& j);
[[nodiscard]] json valuation_to_json(const ValuationSpec& spec);

[[nodiscard]] ScalarMap scalar_map_from_json(const json& j);
[[nodiscard]] json scalar_map_to_json(const ScalarMap& m);

[[nodiscard]] FunctionProperties properties_from_json(const json& j);
[[nodiscard]] json properties_to_json(const FunctionProperties& p);

// Distributions:
//   {"atoms": [[value, prob], ...]}   {"samples": [...]}
//   {"family": "exponential", "mean": m}   {"family": "pareto", "shape": s, "scale": x}
//   {"family": "uniform", "lo": a, "hi": b}
// A sketch file ({"summary": {"atoms": ...}, ...}) reads as its summary.
[[nodiscard]] ItemDistribution distribution_from_json(const json& j);
[[nodiscard]] json distribution_to_json(const ItemDistribution& d);
[[nodiscard]] json atoms_to_json(const DiscreteDistribution& d);

[[nodiscard]] json sketch_to_json(const SketchResult& r, const SketchParams& params, ItemId item);
[[nodiscard]] json estimate_to_json(const EvalEstimate& e);
[[nodiscard]] json bound_to_json(const BoundReport& b);

/// Loads every *.json in `dir`. The item id comes from an "item" field, or
/// from the file name ("7.json" or "item_7.json").
[[nodiscard]] DistributionCatalog load_catalog(const std::filesystem::path& dir);
/// The catalog restricted to atomic laws, as discrete distributions.
[[nodiscard]] DiscreteCatalog to_discrete_catalog(const DistributionCatalog& c);

/// A column of reals, one per line; a non-numeric first line is a header.
/// Only the first field of each line is read.
[[nodiscard]] std::vector<double> read_samples_csv(const std::filesystem::path& path);

/// {"k": K, "n_samples": N, "seed": X, "scores": {item: value}}
[[nodiscard]] json testscore_table_to_json(const TestScoreTable& t);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest text that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

/// Splits one CSV record; double quotes enclose fields and "" escapes a quote.
[[nodiscard]] std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace valsketch::io
