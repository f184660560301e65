#include "valsketch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <thread>

#include "valsketch/error.hpp"

namespace valsketch {

namespace {

std::vector<ItemId> normalized(std::vector<ItemId> items) {
    ItemSet set(std::move(items));
    return {set.begin(), set.end()};
}

std::vector<double> evaluate_all(const SetOracle& oracle, const std::vector<ItemSet>& sets, unsigned workers) {
    std::vector<double> out(sets.size());
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(sets.size())));
    if (w <= 1) {
        for (std::size_t i = 0; i < sets.size(); ++i) out[i] = oracle(sets[i]);
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < sets.size(); i += w) out[i] = oracle(sets[i]);
        });
    }
    return out;
}

// Enumerates k-subsets of `items` in lexicographic order.
template <class F>
void for_each_subset(const std::vector<ItemId>& items, std::size_t k, F&& f) {
    const std::size_t n = items.size();
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<ItemId> ids(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) ids[i] = items[idx[i]];
        f(ItemSet(ids));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

double choose(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

SelectionResult greedy_select(const SetOracle& oracle, std::vector<ItemId> items, std::size_t k,
                              const GreedyOptions& opts) {
    items = normalized(std::move(items));
    if (k > items.size()) {
        throw InvalidInput("k = " + std::to_string(k) + " exceeds the " + std::to_string(items.size()) +
                           " available items");
    }
    SelectionResult res;
    res.objective = oracle(res.chosen);
    if (k == 0) return res;

    if (opts.lazy) {
        struct Entry {
            double bound;
            ItemId item;
            std::size_t stamp;
        };
        auto worse = [](const Entry& a, const Entry& b) {
            if (a.bound != b.bound) return a.bound < b.bound;
            return a.item > b.item;
        };
        std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
        std::vector<ItemSet> first;
        for (ItemId i : items) first.push_back(res.chosen.with(i));
        const auto vals = evaluate_all(oracle, first, opts.workers);
        res.oracle_calls += vals.size();
        for (std::size_t i = 0; i < items.size(); ++i) heap.push({vals[i] - res.objective, items[i], 0});
        for (std::size_t step = 0; step < k; ++step) {
            while (true) {
                Entry top = heap.top();
                heap.pop();
                if (top.stamp == step) {
                    res.chosen = res.chosen.with(top.item);
                    res.objective += top.bound;
                    res.trace.push_back({top.item, top.bound});
                    break;
                }
                const double v = oracle(res.chosen.with(top.item));
                ++res.oracle_calls;
                heap.push({v - res.objective, top.item, step});
            }
        }
        // Report the committed set's own value rather than the running sum.
        res.objective = oracle(res.chosen);
        return res;
    }

    for (std::size_t step = 0; step < k; ++step) {
        std::vector<ItemId> cand;
        std::vector<ItemSet> sets;
        for (ItemId i : items) {
            if (res.chosen.contains(i)) continue;
            cand.push_back(i);
            sets.push_back(res.chosen.with(i));
        }
        const auto vals = evaluate_all(oracle, sets, opts.workers);
        res.oracle_calls += vals.size();
        std::size_t best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i) {
            if (vals[i] > vals[best]) best = i;
        }
        res.trace.push_back({cand[best], vals[best] - res.objective});
        res.chosen = sets[best];
        res.objective = vals[best];
    }
    return res;
}

WelfareResult greedy_welfare(const std::vector<SetOracle>& oracles, std::vector<ItemId> items,
                             const std::vector<std::size_t>& sizes, const GreedyOptions& opts) {
    items = normalized(std::move(items));
    if (oracles.size() != sizes.size() || oracles.empty()) {
        throw InvalidInput("welfare needs one oracle per part size and at least one part");
    }
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    if (total > items.size()) {
        throw InvalidInput("part sizes sum to " + std::to_string(total) + " but only " +
                           std::to_string(items.size()) + " items are available");
    }
    const std::size_t m = sizes.size();
    WelfareResult res;
    res.parts.resize(m);
    std::vector<double> current(m);
    for (std::size_t j = 0; j < m; ++j) current[j] = oracles[j](res.parts[j]);
    std::vector<bool> used(items.size(), false);

    for (std::size_t step = 0; step < total; ++step) {
        struct Cand {
            std::size_t part;
            std::size_t pos;
        };
        std::vector<Cand> cand;
        std::vector<ItemSet> sets;
        std::vector<std::size_t> part_of;
        for (std::size_t j = 0; j < m; ++j) {
            if (res.parts[j].size() >= sizes[j]) continue;
            for (std::size_t p = 0; p < items.size(); ++p) {
                if (used[p]) continue;
                cand.push_back({j, p});
                sets.push_back(res.parts[j].with(items[p]));
            }
        }
        // Candidates are grouped per part, so each group uses its own oracle.
        std::vector<double> vals(sets.size());
        std::size_t begin = 0;
        while (begin < sets.size()) {
            std::size_t end = begin;
            while (end < sets.size() && cand[end].part == cand[begin].part) ++end;
            std::vector<ItemSet> group(sets.begin() + static_cast<std::ptrdiff_t>(begin),
                                       sets.begin() + static_cast<std::ptrdiff_t>(end));
            auto v = evaluate_all(oracles[cand[begin].part], group, opts.workers);
            std::copy(v.begin(), v.end(), vals.begin() + static_cast<std::ptrdiff_t>(begin));
            begin = end;
        }
        res.oracle_calls += vals.size();
        std::size_t best = 0;
        double best_gain = vals[0] - current[cand[0].part];
        for (std::size_t i = 1; i < vals.size(); ++i) {
            const double g = vals[i] - current[cand[i].part];
            if (g > best_gain) {
                best_gain = g;
                best = i;
            }
        }
        const auto [part, pos] = cand[best];
        used[pos] = true;
        res.parts[part] = sets[best];
        current[part] = vals[best];
        res.trace.push_back({part, items[pos], best_gain});
    }
    for (double v : current) res.welfare += v;
    return res;
}

SelectionResult brute_force_best(const SetOracle& oracle, std::vector<ItemId> items, std::size_t k,
                                 double max_subsets) {
    items = normalized(std::move(items));
    if (k > items.size()) throw InvalidInput("k exceeds the number of items");
    const double count = choose(items.size(), k);
    if (count > max_subsets) {
        throw CapExceeded("brute force over " + std::to_string(static_cast<long long>(count)) +
                          " subsets exceeds the cap");
    }
    SelectionResult res;
    bool first = true;
    for_each_subset(items, k, [&](const ItemSet& s) {
        const double v = oracle(s);
        ++res.oracle_calls;
        if (first || v > res.objective) {
            res.objective = v;
            res.chosen = s;
            first = false;
        }
    });
    return res;
}

WelfareResult brute_force_welfare(const std::vector<SetOracle>& oracles, std::vector<ItemId> items,
                                  const std::vector<std::size_t>& sizes, double max_assignments) {
    items = normalized(std::move(items));
    if (oracles.size() != sizes.size() || oracles.empty()) {
        throw InvalidInput("welfare needs one oracle per part size and at least one part");
    }
    double count = 1.0;
    std::size_t left = items.size();
    for (auto s : sizes) {
        if (s > left) throw InvalidInput("part sizes exceed the number of items");
        count *= choose(left, s);
        left -= s;
    }
    if (count > max_assignments) throw CapExceeded("exhaustive welfare search exceeds the cap");

    WelfareResult best;
    bool first = true;
    std::vector<ItemSet> parts(sizes.size());
    std::function<void(std::size_t, const std::vector<ItemId>&, double)> rec =
        [&](std::size_t j, const std::vector<ItemId>& avail, double acc) {
            if (j == sizes.size()) {
                if (first || acc > best.welfare) {
                    best.welfare = acc;
                    best.parts = parts;
                    first = false;
                }
                return;
            }
            auto visit = [&](const ItemSet& s) {
                parts[j] = s;
                const double v = oracles[j](s);
                ++best.oracle_calls;
                std::vector<ItemId> rest;
                for (ItemId i : avail) {
                    if (!s.contains(i)) rest.push_back(i);
                }
                rec(j + 1, rest, acc + v);
            };
            if (sizes[j] == 0) {
                visit(ItemSet{});
            } else {
                for_each_subset(avail, sizes[j], visit);
            }
        };
    rec(0, items, 0.0);
    return best;
}

}  // namespace valsketch
