#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "valsketch/dist.hpp"
#include "valsketch/eval.hpp"
#include "valsketch/rng.hpp"

namespace testsupport {

using namespace valsketch;

inline double uniform(CounterStream& s, double lo, double hi) { return lo + (hi - lo) * s.uniform(); }

inline std::size_t pick(CounterStream& s, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(s.next() % (hi - lo + 1));
}

/// Discrete law with `m` distinct atoms and weights drawn from [w_lo, w_hi].
/// Values are exponential-ish with a random scale, capped at `cap` when given.
inline DiscreteDistribution random_discrete(CounterStream& s, std::size_t m, double w_lo = 1.0, double w_hi = 1.0,
                                            double cap = 0.0) {
    const double scale = uniform(s, 0.2, 2.0);
    std::vector<Atom> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double v = -std::log(s.uniform()) * scale;
        if (cap > 0.0) v = std::min(v, cap * s.uniform());
        const double w = uniform(s, w_lo, w_hi);
        atoms.push_back({v, w});
        total += w;
    }
    for (auto& a : atoms) a.prob /= total;
    return DiscreteDistribution::from_masses(std::move(atoms));
}

/// Discrete law on `m` distinct points of the dyadic grid {j / 16 : 0 <= j < 128}
/// with weights from [w_lo, w_hi]. Grid values keep sums of squares exact,
/// so convolutions merge coinciding sums.
inline DiscreteDistribution lattice_discrete(CounterStream& s, std::size_t m, double w_lo, double w_hi) {
    std::vector<int> grid(128);
    for (int j = 0; j < 128; ++j) grid[static_cast<std::size_t>(j)] = j;
    std::vector<Atom> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = pick(s, i, grid.size() - 1);
        std::swap(grid[i], grid[r]);
        const double w = uniform(s, w_lo, w_hi);
        atoms.push_back({grid[i] / 16.0, w});
        total += w;
    }
    for (auto& a : atoms) a.prob /= total;
    return DiscreteDistribution::from_masses(std::move(atoms));
}

inline std::vector<ItemSet> subsets_up_to(std::size_t n, std::size_t k) {
    std::vector<ItemSet> out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<ItemId> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) ids.push_back(static_cast<ItemId>(i + 1));
        }
        if (ids.size() <= k) out.emplace_back(ids);
    }
    return out;
}

}  // namespace testsupport
