#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "valsketch/eval.hpp"

namespace valsketch {

/// Set-function oracle. With workers > 1 it is called concurrently and must
/// be safe for that.
using SetOracle = std::function<double(const ItemSet&)>;

struct GreedyStep {
    ItemId item;
    double gain;
};

struct SelectionResult {
    ItemSet chosen;
    double objective = 0.0;
    std::size_t oracle_calls = 0;
    std::vector<GreedyStep> trace;
};

struct WelfareStep {
    std::size_t part;
    ItemId item;
    double gain;
};

struct WelfareResult {
    std::vector<ItemSet> parts;
    double welfare = 0.0;
    std::size_t oracle_calls = 0;
    std::vector<WelfareStep> trace;
};

struct GreedyOptions {
    /// Priority-queue greedy with stale upper bounds. Exact for submodular
    /// oracles, but oracle_calls no longer follows the plain count.
    bool lazy = false;
    unsigned workers = 1;
};

/// Adds, k times, the item with the largest marginal gain; ties go to the
/// lowest id. Plain mode makes sum_{t=1..k} (n - t + 1) candidate calls
/// (the u(empty) baseline is not counted).
[[nodiscard]] SelectionResult greedy_select(const SetOracle& oracle, std::vector<ItemId> items, std::size_t k,
                                            const GreedyOptions& opts = {});

/// Greedy for disjoint parts with sizes `sizes`: each step commits the
/// (part, item) pair of largest gain among parts with room left; ties go to
/// the lowest part, then the lowest item.
[[nodiscard]] WelfareResult greedy_welfare(const std::vector<SetOracle>& oracles, std::vector<ItemId> items,
                                           const std::vector<std::size_t>& sizes, const GreedyOptions& opts = {});

/// Exhaustive maximizer over all k-subsets in lexicographic order; the first
/// maximum wins. Throws CapExceeded past `max_subsets`.
[[nodiscard]] SelectionResult brute_force_best(const SetOracle& oracle, std::vector<ItemId> items, std::size_t k,
                                               double max_subsets = 1e6);

/// Exhaustive optimum of the welfare problem (every assignment of items to
/// parts with the given sizes). Intended for small test instances.
[[nodiscard]] WelfareResult brute_force_welfare(const std::vector<SetOracle>& oracles, std::vector<ItemId> items,
                                                const std::vector<std::size_t>& sizes, double max_assignments = 1e7);

/// Binomial coefficient as a double.
[[nodiscard]] double choose(std::size_t n, std::size_t k);

}  // namespace valsketch
