#include "valsketch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include "valsketch/error.hpp"

namespace valsketch {

ItemSet::ItemSet(std::vector<ItemId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] < 1) throw InvalidInput("item ids must be >= 1, got " + std::to_string(ids_[i]));
        if (i > 0 && ids_[i] == ids_[i - 1]) {
            throw InvalidInput("duplicate item id " + std::to_string(ids_[i]) + " in set");
        }
    }
}

ItemSet ItemSet::parse(const std::string& text) {
    std::vector<ItemId> ids;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto first = tok.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto last = tok.find_last_not_of(" \t");
        tok = tok.substr(first, last - first + 1);
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw InvalidInput("not an item id: '" + tok + "'");
        ids.push_back(id);
    }
    return ItemSet(std::move(ids));
}

bool ItemSet::contains(ItemId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

ItemSet ItemSet::with(ItemId id) const {
    auto ids = ids_;
    ids.push_back(id);
    return ItemSet(std::move(ids));
}

std::string ItemSet::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(ids_[i]);
    }
    return out;
}

std::string to_string(EvalMethod m) {
    switch (m) {
        case EvalMethod::ExactEnum: return "exact";
        case EvalMethod::FastPath: return "fast";
        case EvalMethod::MonteCarlo: return "mc";
    }
    return "exact";
}

SetLayout layout_for(const ValuationSpec& spec, const ItemSet& set) {
    SetLayout layout;
    layout.slot.resize(set.size());
    if (spec.symmetric()) {
        for (std::size_t i = 0; i < set.size(); ++i) layout.slot[i] = i;
        layout.width = set.size();
    } else {
        for (std::size_t i = 0; i < set.size(); ++i) layout.slot[i] = static_cast<std::size_t>(set.ids()[i] - 1);
        layout.width = set.empty() ? 0 : static_cast<std::size_t>(set.ids().back());
    }
    return layout;
}

namespace {

template <class Catalog>
const auto& lookup(const Catalog& dists, ItemId id) {
    auto it = dists.find(id);
    if (it == dists.end()) throw InvalidInput("no distribution for item " + std::to_string(id));
    return it->second;
}

enum class Aggregate { Sum, Max, Product };

// f(x) = outer(aggregate_i inner_i(x_i)); Product stands for 1 - prod(1 - .).
struct Decomposition {
    Aggregate aggregate;
    ScalarChain outer;
    std::function<ScalarChain(std::size_t)> inner;
};

std::optional<Decomposition> decompose(const ValuationSpec& spec) {
    auto identity = [](std::size_t) { return ScalarChain{}; };
    if (spec.as<valuation::Max>()) return Decomposition{Aggregate::Max, {}, identity};
    if (const auto* c = spec.as<valuation::Ces>()) {
        const double r = c->r;
        return Decomposition{Aggregate::Sum, ScalarChain(ScalarMap::power(1.0 / r)),
                             [r](std::size_t) { return ScalarChain(ScalarMap::power(r)); }};
    }
    if (const auto* p = spec.as<valuation::PowerOfSum>()) {
        return Decomposition{Aggregate::Sum, ScalarChain(ScalarMap::power(p->r)), identity};
    }
    if (const auto* g = spec.as<valuation::ConcaveOfSum>()) {
        return Decomposition{Aggregate::Sum, ScalarChain(g->g.as_map()), identity};
    }
    if (spec.as<valuation::SuccessProbability>()) return Decomposition{Aggregate::Product, {}, identity};
    if (const auto* t = spec.as<valuation::Transformed>()) {
        auto base = decompose(*t->base);
        if (!base) return std::nullopt;
        auto transforms = t->transforms;
        auto base_inner = base->inner;
        base->inner = [transforms, base_inner](std::size_t coord) {
            const ScalarMap& phi = transforms.size() == 1 ? transforms.front() : transforms.at(coord);
            return ScalarChain::compose(base_inner(coord), ScalarChain(phi));
        };
        return base;
    }
    return std::nullopt;
}

std::vector<Atom> merge_close(std::vector<Atom> atoms, double tol) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!out.empty() && a.value - out.back().value <= tol * std::max(1.0, std::abs(out.back().value))) {
            out.back().prob += a.prob;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

void check_domain(const ValuationSpec& spec, const SetLayout& layout, const std::vector<const DiscreteDistribution*>& ds) {
    // f is monotone, so checking the coordinate-wise largest outcome is enough.
    std::vector<double> x(layout.width, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) x[layout.slot[i]] = ds[i]->atoms().back().value;
    (void)evaluate(spec, x);
}

}  // namespace

EvalEstimate expected_value_exact(const ValuationSpec& spec, const DiscreteCatalog& dists, const ItemSet& set,
                                  const ExactOptions& opts) {
    const auto layout = layout_for(spec, set);
    std::vector<const DiscreteDistribution*> ds;
    double outcomes = 1.0;
    for (ItemId id : set) {
        ds.push_back(&lookup(dists, id));
        outcomes *= static_cast<double>(ds.back()->size());
    }
    if (outcomes > opts.max_outcomes) {
        std::ostringstream msg;
        msg << "exact enumeration needs " << outcomes << " outcomes, above the cap of " << opts.max_outcomes
            << "; use the fast path or Monte Carlo";
        throw CapExceeded(msg.str());
    }
    check_domain(spec, layout, ds);

    std::vector<double> x(layout.width, 0.0);
    double total = 0.0;
    std::function<void(std::size_t, double)> walk = [&](std::size_t depth, double prob) {
        if (depth == ds.size()) {
            total += prob * evaluate_unchecked(spec, x);
            return;
        }
        for (const auto& a : ds[depth]->atoms()) {
            x[layout.slot[depth]] = a.value;
            walk(depth + 1, prob * a.prob);
        }
    };
    walk(0, 1.0);
    return EvalEstimate{total, 0.0, EvalMethod::ExactEnum, 0, 0};
}

bool is_decomposable(const ValuationSpec& spec) { return decompose(spec).has_value(); }

EvalEstimate expected_value_fast(const ValuationSpec& spec, const DiscreteCatalog& dists, const ItemSet& set,
                                 const FastOptions& opts) {
    auto dec = decompose(spec);
    if (!dec) throw InvalidInput("valuation " + spec.name() + " has no aggregate-then-transform form");
    const auto layout = layout_for(spec, set);

    std::vector<const DiscreteDistribution*> ds;
    for (ItemId id : set) ds.push_back(&lookup(dists, id));
    check_domain(spec, layout, ds);

    // Per-item laws of inner_i(X_i).
    std::vector<std::vector<Atom>> images;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const ScalarChain inner = dec->inner(layout.slot[i]);
        std::vector<Atom> img;
        img.reserve(ds[i]->size());
        for (const auto& a : ds[i]->atoms()) img.push_back({inner(a.value), a.prob});
        images.push_back(std::move(img));
    }

    double value = 0.0;
    switch (dec->aggregate) {
        case Aggregate::Product: {
            double miss = 1.0;
            for (const auto& img : images) {
                double e = 0.0;
                for (const auto& a : img) e += a.prob * (1.0 - a.value);
                miss *= e;
            }
            value = 1.0 - miss;
            break;
        }
        case Aggregate::Max: {
            // E[outer(M)] = sum_v outer(v) (G(v) - G(v-)), G(v) = prod_i P(Z_i <= v).
            std::vector<double> grid{0.0};
            for (const auto& img : images) {
                for (const auto& a : img) grid.push_back(a.value);
            }
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            std::vector<std::size_t> pos(images.size(), 0);
            std::vector<double> cum(images.size(), 0.0);
            double prev_g = 0.0;
            for (double v : grid) {
                double g = 1.0;
                for (std::size_t i = 0; i < images.size(); ++i) {
                    while (pos[i] < images[i].size() && images[i][pos[i]].value <= v) cum[i] += images[i][pos[i]++].prob;
                    g *= std::min(1.0, cum[i]);
                }
                value += dec->outer(v) * (g - prev_g);
                prev_g = g;
            }
            break;
        }
        case Aggregate::Sum: {
            if (images.empty()) {
                value = dec->outer(0.0);
                break;
            }
            std::vector<Atom> acc{{0.0, 1.0}};
            for (std::size_t i = 0; i + 1 < images.size(); ++i) {
                const double pairs = static_cast<double>(acc.size()) * static_cast<double>(images[i].size());
                if (pairs > opts.max_pairs) {
                    throw CapExceeded("convolution needs " + std::to_string(static_cast<long long>(pairs)) +
                                      " atom pairs; use Monte Carlo");
                }
                std::vector<Atom> next;
                next.reserve(static_cast<std::size_t>(pairs));
                for (const auto& a : acc) {
                    for (const auto& b : images[i]) next.push_back({a.value + b.value, a.prob * b.prob});
                }
                acc = merge_close(std::move(next), opts.merge_tolerance);
            }
            const auto& last = images.back();
            const double pairs = static_cast<double>(acc.size()) * static_cast<double>(last.size());
            if (pairs > opts.max_pairs) {
                throw CapExceeded("final convolution step needs " + std::to_string(static_cast<long long>(pairs)) +
                                  " atom pairs; use Monte Carlo");
            }
            for (const auto& a : acc) {
                double inner = 0.0;
                for (const auto& b : last) inner += b.prob * dec->outer(a.value + b.value);
                value += a.prob * inner;
            }
            break;
        }
    }
    return EvalEstimate{value, 0.0, EvalMethod::FastPath, 0, 0};
}

EvalEstimate expected_value_mc(const ValuationSpec& spec, const DistributionCatalog& dists, const ItemSet& set,
                               const MonteCarloOptions& opts) {
    if (opts.samples < 1) throw InvalidInput("Monte Carlo needs at least one sample");
    const auto layout = layout_for(spec, set);
    std::vector<const ItemDistribution*> ds;
    std::vector<CounterStream> streams;
    for (ItemId id : set) {
        ds.push_back(&lookup(dists, id));
        streams.emplace_back(opts.seed, static_cast<std::uint64_t>(id));
    }

    const std::size_t n = opts.samples;
    std::vector<double> values(n);
    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<double> x(layout.width, 0.0);
        for (std::size_t j = begin; j < end; ++j) {
            for (std::size_t i = 0; i < ds.size(); ++i) x[layout.slot[i]] = sample_at(*ds[i], streams[i].uniform_at(j));
            values[j] = evaluate(spec, x);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        run(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
    }

    EvalEstimate est{0.0, 0.0, EvalMethod::MonteCarlo, n, opts.seed};
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        est.value = *lo;
        return est;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    est.value = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.value) * (v - est.value);
        est.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return est;
}

}  // namespace valsketch
