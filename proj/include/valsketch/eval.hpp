#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "valsketch/dist.hpp"
#include "valsketch/valuation.hpp"

namespace valsketch {

using ItemId = int;

/// Sorted set of distinct item ids, each >= 1.
class ItemSet {
public:
    ItemSet() = default;
    ItemSet(std::initializer_list<ItemId> ids) : ItemSet(std::vector<ItemId>(ids)) {}
    explicit ItemSet(std::vector<ItemId> ids);

    /// Parses "1,4,7" (whitespace tolerated, empty string is the empty set).
    static ItemSet parse(const std::string& text);

    [[nodiscard]] std::span<const ItemId> ids() const noexcept { return ids_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] bool contains(ItemId id) const;
    [[nodiscard]] ItemSet with(ItemId id) const;
    [[nodiscard]] std::string to_string() const;

    auto begin() const noexcept { return ids_.begin(); }
    auto end() const noexcept { return ids_.end(); }

    friend bool operator==(const ItemSet&, const ItemSet&) = default;
    friend auto operator<=>(const ItemSet&, const ItemSet&) = default;

private:
    std::vector<ItemId> ids_;
};

using DiscreteCatalog = std::map<ItemId, DiscreteDistribution>;
using DistributionCatalog = std::map<ItemId, ItemDistribution>;

enum class EvalMethod { ExactEnum, FastPath, MonteCarlo };

[[nodiscard]] std::string to_string(EvalMethod m);

struct EvalEstimate {
    double value = 0.0;
    double std_error = 0.0;
    EvalMethod method = EvalMethod::ExactEnum;
    std::size_t samples = 0;  ///< Monte Carlo only
    std::uint64_t seed = 0;   ///< Monte Carlo only
};

struct ExactOptions {
    /// Largest support product enumerated before giving up.
    double max_outcomes = 1e7;
};

struct FastOptions {
    /// Largest number of atom pairs a single convolution step may touch.
    double max_pairs = 2e7;
    /// Atoms of a convolution closer than this (relative to max(1, |v|)) merge.
    double merge_tolerance = 1e-12;
};

struct MonteCarloOptions {
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// u(S) by enumerating the product of the items' supports.
[[nodiscard]] EvalEstimate expected_value_exact(const ValuationSpec& spec, const DiscreteCatalog& dists,
                                                const ItemSet& set, const ExactOptions& opts = {});

/// Whether the valuation has the form phi(aggregate_i psi_i(x_i)) with a
/// sum, max or product aggregate, which `expected_value_fast` handles.
[[nodiscard]] bool is_decomposable(const ValuationSpec& spec);

/// Exact u(S) for decomposable valuations: max via a product of CDFs,
/// sums via exact convolution, success probability via independence.
/// Throws InvalidInput for other valuations and CapExceeded when a
/// convolution grows past `opts.max_pairs`.
[[nodiscard]] EvalEstimate expected_value_fast(const ValuationSpec& spec, const DiscreteCatalog& dists,
                                               const ItemSet& set, const FastOptions& opts = {});

/// Monte Carlo mean of f over joint draws. Item i reads the counter stream
/// (seed, i), so the estimate does not depend on evaluation order or the
/// number of workers.
[[nodiscard]] EvalEstimate expected_value_mc(const ValuationSpec& spec, const DistributionCatalog& dists,
                                             const ItemSet& set, const MonteCarloOptions& opts);

/// Coordinate vector layout for a set: compact for symmetric valuations,
/// indexed by item id - 1 otherwise.
struct SetLayout {
    std::vector<std::size_t> slot;  ///< slot[i] = coordinate of the i-th member
    std::size_t width = 0;
};
[[nodiscard]] SetLayout layout_for(const ValuationSpec& spec, const ItemSet& set);

}  // namespace valsketch
