#include "valsketch/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "valsketch/baseline.hpp"
#include "valsketch/error.hpp"
#include "valsketch/sketcher.hpp"

namespace valsketch::bench {

namespace {

using io::json;

constexpr std::uint64_t kParamTag = 0x7061726d;
constexpr std::uint64_t kTrainTag = 0x74726e;
constexpr std::uint64_t kSetTag = 0x736574;
constexpr std::uint64_t kSketchMcTag = 0x766d63;
constexpr std::uint64_t kBaselineTag = 0x747363;
constexpr const char* kVersion = "0.1.0";

std::uint64_t family_code(DistFamily f) { return static_cast<std::uint64_t>(f) + 1; }

DistFamily family_from_string(const std::string& s) {
    if (s == "exponential") return DistFamily::Exponential;
    if (s == "pareto") return DistFamily::Pareto;
    if (s == "csv") return DistFamily::Csv;
    throw InvalidInput("unknown dist_family '" + s + "' (expected exponential, pareto or csv)");
}

std::string opt_num(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < w; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += w) body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct FamilyData {
    DistFamily family;
    std::string name;
    std::vector<ItemDistribution> population;   // item i + 1
    std::vector<std::vector<double>> training;  // training[i][j]
    std::vector<ItemDistribution> sketch_input;
    json meta = json::array();
};

void draw_training(FamilyData& fam, const ExperimentConfig& cfg) {
    const CounterStream root = CounterStream(cfg.seed, kTrainTag).substream(family_code(fam.family));
    fam.training.resize(fam.population.size());
    fam.sketch_input.clear();
    for (std::size_t i = 0; i < fam.population.size(); ++i) {
        const CounterStream s = root.substream(i + 1);
        auto& row = fam.training[i];
        row.resize(cfg.n_train);
        for (std::size_t j = 0; j < cfg.n_train; ++j) row[j] = sample_at(fam.population[i], s.uniform_at(j));
        fam.sketch_input.push_back(cfg.sketch_source == SketchSource::Training ? from_samples(row)
                                                                               : fam.population[i]);
    }
}

std::vector<ItemSet> sample_sets(const ExperimentConfig& cfg, DistFamily family, std::size_t n, int k) {
    std::vector<ItemSet> sets;
    const auto kk = static_cast<std::size_t>(k);
    double total = 1.0;
    for (std::size_t i = 1; i <= kk; ++i) total = total * static_cast<double>(n - kk + i) / static_cast<double>(i);
    if (std::round(total) <= static_cast<double>(cfg.sets_per_k)) {
        // Every k-subset, in lexicographic order.
        std::vector<ItemId> idx(kk);
        for (std::size_t i = 0; i < kk; ++i) idx[i] = static_cast<ItemId>(i + 1);
        while (true) {
            sets.emplace_back(idx);
            std::size_t i = kk;
            while (i > 0 && static_cast<std::size_t>(idx[i - 1]) == n - kk + i) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < kk; ++j) idx[j] = idx[j - 1] + 1;
        }
        return sets;
    }
    CounterStream s = CounterStream(cfg.seed, kSetTag).substream(family_code(family)).substream(kk);
    std::set<ItemSet> seen;
    std::vector<ItemId> pool(n);
    while (sets.size() < cfg.sets_per_k) {
        for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<ItemId>(i + 1);
        for (std::size_t i = 0; i < kk; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(s.next() % (n - i));
            std::swap(pool[i], pool[j]);
        }
        ItemSet set(std::vector<ItemId>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kk)));
        if (seen.insert(set).second) sets.push_back(std::move(set));
    }
    return sets;
}

EvalEstimate training_estimate(const ValuationSpec& spec, const FamilyData& fam, const ItemSet& set,
                               const ExperimentConfig& cfg) {
    const auto layout = layout_for(spec, set);
    std::vector<double> x(layout.width, 0.0);
    const std::size_t n = cfg.n_train;
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t m = 0;
        for (ItemId id : set) x[layout.slot[m++]] = fam.training[static_cast<std::size_t>(id - 1)][j];
        values[j] = evaluate(spec, x);
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    EvalEstimate est{sum / static_cast<double>(n), 0.0, EvalMethod::MonteCarlo, n, cfg.seed};
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.value) * (v - est.value);
        est.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return est;
}

EvalEstimate sketch_estimate(const ValuationSpec& spec, const std::vector<SketchResult>& sketches, const ItemSet& set,
                             const ExperimentConfig& cfg, std::uint64_t mc_seed) {
    DiscreteCatalog cat;
    double outcomes = 1.0;
    for (ItemId id : set) {
        const auto& summary = sketches[static_cast<std::size_t>(id - 1)].summary;
        outcomes *= static_cast<double>(summary.size());
        cat.emplace(id, summary);
    }
    // Max needs no convolution; otherwise the support product bounds the work.
    const bool cheap = spec.as<valuation::Max>() != nullptr || outcomes <= cfg.fast_path_cap;
    if (cheap) {
        try {
            if (is_decomposable(spec)) return expected_value_fast(spec, cat, set, FastOptions{cfg.fast_path_cap, 1e-12});
            return expected_value_exact(spec, cat, set, ExactOptions{cfg.fast_path_cap});
        } catch (const CapExceeded&) {
        }
    }
    DistributionCatalog dists;
    for (const auto& [id, d] : cat) dists.emplace(id, ItemDistribution::discrete(d));
    return expected_value_mc(spec, dists, set, MonteCarloOptions{cfg.v_samples, mc_seed, 1});
}

struct Outcome {
    std::optional<RatioRecord> record;
    std::optional<SkipRecord> skip;
};

void collect(ExperimentResult& out, std::vector<Outcome>& outcomes) {
    for (auto& o : outcomes) {
        ++out.tasks;
        if (o.record) out.records.push_back(std::move(*o.record));
        if (o.skip) out.skips.push_back(std::move(*o.skip));
    }
}

std::optional<std::string> ratio_problem(const EvalEstimate& u, const EvalEstimate& v) {
    if (!(u.value > 0.0)) return "u(S) estimate is 0";
    if (!(v.value > 0.0)) return "v(S) is 0";
    return std::nullopt;
}

void run_group(ExperimentResult& out, const ExperimentConfig& cfg, const NamedValuation& val, const FamilyData& fam,
               int k, double c, const std::vector<ItemSet>& sets, const std::vector<EvalEstimate>& u,
               std::uint64_t group_id) {
    const std::size_t n = fam.population.size();
    std::vector<Outcome> outcomes(sets.size());
    auto skip_all = [&](const std::string& reason) {
        for (std::size_t s = 0; s < sets.size(); ++s) {
            outcomes[s].skip = SkipRecord{val.id, fam.name, "discretization", k, c, sets[s], reason};
        }
        collect(out, outcomes);
    };

    const double eps = cfg.epsilon ? *cfg.epsilon : c / k;
    if (!(eps < 1.0)) {
        skip_all("epsilon = " + io::format_double(eps) + " is not below 1");
        return;
    }
    std::vector<double> tau(n);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tau[i] = quantile(fam.sketch_input[i], 1.0 - eps);
        delta = std::max(delta, atom_mass_at(fam.sketch_input[i], tau[i]));
    }
    if (!(eps > delta)) {
        skip_all("epsilon = " + io::format_double(eps) + " does not exceed the atom mass " + io::format_double(delta));
        return;
    }
    const FunctionProperties props = properties(val.spec);
    BoundVariant variant{};
    double degree = 0.0;
    try {
        variant = select_bound_variant(props);
        degree = parameter_degree(props, variant);
    } catch (const InvalidInput& e) {
        skip_all(e.what());
        return;
    }
    const double a = cfg.lower_cut ? *cfg.lower_cut : lower_cut_for(eps, degree, delta);
    const BoundReport bound =
        approximation_factors(k, eps, a, delta, parameter_degree(props, variant), props.weak_hom_tolerance, variant);

    std::vector<SketchResult> sketches(n);
    std::vector<std::string> item_error(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        try {
            sketches[i] = discretize(fam.sketch_input[i], val.spec, SketchParams{eps, a}, i);
        } catch (const InvalidInput& e) {
            item_error[i] = e.what();
        }
    });

    const CounterStream mc_root = CounterStream(cfg.seed, kSketchMcTag).substream(group_id);
    parallel_for(sets.size(), cfg.workers, [&](std::size_t s) {
        const ItemSet& set = sets[s];
        for (ItemId id : set) {
            const auto& err = item_error[static_cast<std::size_t>(id - 1)];
            if (!err.empty()) {
                outcomes[s].skip =
                    SkipRecord{val.id, fam.name, "discretization", k, c, set, "item " + std::to_string(id) + ": " + err};
                return;
            }
        }
        const EvalEstimate v = sketch_estimate(val.spec, sketches, set, cfg, mc_root.at(s));
        if (auto problem = ratio_problem(u[s], v)) {
            outcomes[s].skip = SkipRecord{val.id, fam.name, "discretization", k, c, set, *problem};
            return;
        }
        outcomes[s].record = RatioRecord{val.id, fam.name, "discretization", k, c, eps, a, delta, bound.alpha,
                                         bound.beta, set, u[s], v, v.value / u[s].value};
    });
    collect(out, outcomes);
}

void run_baseline(ExperimentResult& out, const ExperimentConfig& cfg, const NamedValuation& val,
                  const FamilyData& fam, int k, const std::vector<ItemSet>& sets, const std::vector<EvalEstimate>& u) {
    const BaselineConfig& b = *cfg.baseline;
    const std::size_t replicas = b.replicas ? *b.replicas : static_cast<std::size_t>(k);
    const std::uint64_t seed =
        CounterStream(cfg.seed, kBaselineTag).substream(family_code(fam.family)).substream(replicas).at(0);
    const std::size_t n = fam.population.size();
    std::vector<EvalEstimate> scores(n);
    std::vector<std::string> item_error(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        try {
            scores[i] = replication_test_score_estimate(fam.sketch_input[i], val.spec, replicas, b.n_samples, seed, i + 1);
        } catch (const InvalidInput& e) {
            item_error[i] = e.what();
        }
    });
    std::vector<Outcome> outcomes(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        std::optional<std::size_t> best;
        std::string err;
        for (ItemId id : sets[s]) {
            const auto i = static_cast<std::size_t>(id - 1);
            if (!item_error[i].empty()) {
                err = "item " + std::to_string(id) + ": " + item_error[i];
                break;
            }
            if (!best || scores[i].value > scores[*best].value) best = i;
        }
        if (!err.empty() || !best) {
            outcomes[s].skip = SkipRecord{val.id, fam.name, "testscore", k, std::nullopt, sets[s],
                                          err.empty() ? "empty set" : err};
            continue;
        }
        const EvalEstimate& v = scores[*best];
        if (auto problem = ratio_problem(u[s], v)) {
            outcomes[s].skip = SkipRecord{val.id, fam.name, "testscore", k, std::nullopt, sets[s], *problem};
            continue;
        }
        outcomes[s].record = RatioRecord{val.id, fam.name, "testscore", k, std::nullopt, std::nullopt, std::nullopt,
                                         std::nullopt, std::nullopt, std::nullopt, sets[s], u[s], v,
                                         v.value / u[s].value};
    }
    collect(out, outcomes);
}

ExperimentResult run_pipeline(const ExperimentConfig& cfg, const std::vector<FamilyData>& families,
                              const std::vector<int>& k_values) {
    ExperimentResult out;
    out.item_meta = json::object();
    for (const auto& fam : families) out.item_meta[fam.name] = fam.meta;

    for (std::size_t vi = 0; vi < cfg.valuations.size(); ++vi) {
        const auto& val = cfg.valuations[vi];
        for (std::size_t fi = 0; fi < families.size(); ++fi) {
            const auto& fam = families[fi];
            for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
                const int k = k_values[ki];
                const auto sets = sample_sets(cfg, fam.family, fam.population.size(), k);
                std::vector<EvalEstimate> u(sets.size());
                parallel_for(sets.size(), cfg.workers,
                             [&](std::size_t s) { u[s] = training_estimate(val.spec, fam, sets[s], cfg); });
                for (std::size_t ci = 0; ci < cfg.c_values.size(); ++ci) {
                    const std::uint64_t group_id =
                        ((vi * families.size() + fi) * k_values.size() + ki) * cfg.c_values.size() + ci;
                    run_group(out, cfg, val, fam, k, cfg.c_values[ci], sets, u, group_id);
                }
                if (cfg.baseline) run_baseline(out, cfg, val, fam, k, sets, u);
            }
        }
    }
    return out;
}

}  // namespace

std::string to_string(DistFamily f) {
    switch (f) {
        case DistFamily::Exponential: return "exponential";
        case DistFamily::Pareto: return "pareto";
        case DistFamily::Csv: return "csv";
    }
    return "csv";
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.valuations = {{"max", ValuationSpec::max()},
                      {"ces2", ValuationSpec::ces(2.0)},
                      {"sqrt_sum", ValuationSpec::concave_of_sum(ScalarConcave::sqrt())}};
    for (int k = 1; k <= 20; ++k) cfg.k_values.push_back(k);
    return cfg;
}

void ExperimentConfig::validate() const {
    if (n < 1) throw InvalidInput("n must be >= 1");
    if (n_train < 1) throw InvalidInput("n_train must be >= 1");
    if (valuations.empty()) throw InvalidInput("at least one valuation is required");
    std::set<std::string> ids;
    for (const auto& v : valuations) {
        if (!ids.insert(v.id).second) throw InvalidInput("duplicate valuation id '" + v.id + "'");
    }
    if (families.empty()) throw InvalidInput("at least one dist_family is required");
    if (k_values.empty()) throw InvalidInput("k_values must not be empty");
    for (int k : k_values) {
        if (k < 1) throw InvalidInput("k values must be >= 1");
    }
    if (c_values.empty()) throw InvalidInput("c_values must not be empty");
    for (double c : c_values) {
        if (!(c > 0.0)) throw InvalidInput("c values must be positive");
    }
    if (sets_per_k < 1) throw InvalidInput("sets_per_k must be >= 1");
    if (lower_cut && !(*lower_cut > 0.0 && *lower_cut < 1.0)) throw InvalidInput("lower_cut must lie in (0, 1)");
    if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (v_samples < 1) throw InvalidInput("v_samples must be >= 1");
    if (!(fast_path_cap >= 1.0)) throw InvalidInput("fast_path_cap must be >= 1");
    if (baseline && baseline->n_samples < 1) throw InvalidInput("baseline.n_samples must be >= 1");
    if (baseline && baseline->replicas && *baseline->replicas < 1) throw InvalidInput("baseline.replicas must be >= 1");
    if (workers < 1) throw InvalidInput("workers must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    static const std::set<std::string> known = {
        "n",           "n_train", "valuations",   "dist_family", "k_values",      "c_values",
        "sets_per_k",  "seed",    "lower_cut",    "epsilon",     "sketch_source", "v_samples",
        "fast_path_cap", "baseline", "csv",       "workers"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw InvalidInput("unknown config key '" + key + "'");
    }
    ExperimentConfig cfg = ExperimentConfig::defaults();
    try {
        if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
        if (j.contains("n_train")) cfg.n_train = j.at("n_train").get<std::size_t>();
        if (j.contains("valuations")) {
            cfg.valuations.clear();
            for (const auto& v : j.at("valuations")) {
                ValuationSpec spec = io::valuation_from_json(v);
                std::string id = v.contains("id") ? v.at("id").get<std::string>() : spec.name();
                cfg.valuations.push_back({std::move(id), std::move(spec)});
            }
        }
        if (j.contains("dist_family")) {
            cfg.families.clear();
            const auto& f = j.at("dist_family");
            if (f.is_string()) {
                cfg.families.push_back(family_from_string(f.get<std::string>()));
            } else {
                for (const auto& e : f) cfg.families.push_back(family_from_string(e.get<std::string>()));
            }
        }
        if (j.contains("k_values")) cfg.k_values = j.at("k_values").get<std::vector<int>>();
        if (j.contains("c_values")) cfg.c_values = j.at("c_values").get<std::vector<double>>();
        if (j.contains("sets_per_k")) cfg.sets_per_k = j.at("sets_per_k").get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lower_cut") && !j.at("lower_cut").is_null()) cfg.lower_cut = j.at("lower_cut").get<double>();
        if (j.contains("epsilon") && !j.at("epsilon").is_null()) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("sketch_source")) {
            const auto s = j.at("sketch_source").get<std::string>();
            if (s == "training") {
                cfg.sketch_source = SketchSource::Training;
            } else if (s == "population") {
                cfg.sketch_source = SketchSource::Population;
            } else {
                throw InvalidInput("sketch_source must be 'training' or 'population'");
            }
        }
        if (j.contains("v_samples")) cfg.v_samples = j.at("v_samples").get<std::size_t>();
        if (j.contains("fast_path_cap")) cfg.fast_path_cap = j.at("fast_path_cap").get<double>();
        if (j.contains("baseline") && !j.at("baseline").is_null()) {
            const auto& b = j.at("baseline");
            for (const auto& [key, _] : b.items()) {
                if (key != "n_samples" && key != "replicas") throw InvalidInput("unknown baseline key '" + key + "'");
            }
            BaselineConfig bc;
            if (b.contains("n_samples")) bc.n_samples = b.at("n_samples").get<std::size_t>();
            if (b.contains("replicas") && !b.at("replicas").is_null()) bc.replicas = b.at("replicas").get<std::size_t>();
            cfg.baseline = bc;
        }
        if (j.contains("csv")) {
            const auto& c = j.at("csv");
            for (const auto& [key, _] : c.items()) {
                if (key != "value_column" && key != "group_column" && key != "min_rows") {
                    throw InvalidInput("unknown csv key '" + key + "'");
                }
            }
            cfg.csv.value_column = c.value("value_column", cfg.csv.value_column);
            cfg.csv.group_column = c.value("group_column", cfg.csv.group_column);
            cfg.csv.min_rows = c.value("min_rows", cfg.csv.min_rows);
        }
        if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json vals = json::array();
    for (const auto& v : cfg.valuations) {
        json e = io::valuation_to_json(v.spec);
        e["id"] = v.id;
        vals.push_back(e);
    }
    json fams = json::array();
    for (auto f : cfg.families) fams.push_back(to_string(f));
    json j = {{"n", cfg.n},
              {"n_train", cfg.n_train},
              {"valuations", vals},
              {"dist_family", fams},
              {"k_values", cfg.k_values},
              {"c_values", cfg.c_values},
              {"sets_per_k", cfg.sets_per_k},
              {"seed", cfg.seed},
              {"sketch_source", cfg.sketch_source == SketchSource::Training ? "training" : "population"},
              {"v_samples", cfg.v_samples},
              {"fast_path_cap", cfg.fast_path_cap},
              {"csv",
               {{"value_column", cfg.csv.value_column},
                {"group_column", cfg.csv.group_column},
                {"min_rows", cfg.csv.min_rows}}},
              {"workers", cfg.workers}};
    j["lower_cut"] = cfg.lower_cut ? json(*cfg.lower_cut) : json(nullptr);
    j["epsilon"] = cfg.epsilon ? json(*cfg.epsilon) : json(nullptr);
    if (cfg.baseline) {
        j["baseline"] = {{"n_samples", cfg.baseline->n_samples},
                         {"replicas", cfg.baseline->replicas ? json(*cfg.baseline->replicas) : json(nullptr)}};
    } else {
        j["baseline"] = nullptr;
    }
    return j;
}

ExperimentResult run_synthetic(const ExperimentConfig& cfg) {
    cfg.validate();
    for (int k : cfg.k_values) {
        if (static_cast<std::size_t>(k) > cfg.n) {
            throw InvalidInput("k = " + std::to_string(k) + " exceeds n = " + std::to_string(cfg.n));
        }
    }
    std::vector<FamilyData> families;
    for (auto f : cfg.families) {
        if (f == DistFamily::Csv) throw InvalidInput("the csv family needs `bench real` with a data file");
        FamilyData fam{f, to_string(f), {}, {}, {}};
        const CounterStream params = CounterStream(cfg.seed, kParamTag).substream(family_code(f));
        for (std::size_t i = 0; i < cfg.n; ++i) {
            const double u = params.uniform_at(i);
            ItemDistribution d = f == DistFamily::Exponential ? ItemDistribution::exponential(u)
                                                              : ItemDistribution::pareto(1.1 + 1.9 * u, 1.5);
            json m = io::distribution_to_json(d);
            m["item"] = i + 1;
            fam.meta.push_back(m);
            fam.population.push_back(std::move(d));
        }
        draw_training(fam, cfg);
        families.push_back(std::move(fam));
    }
    return run_pipeline(cfg, families, cfg.k_values);
}

ExperimentResult run_real(const ExperimentConfig& cfg, const std::map<std::string, Empirical>& data) {
    cfg.validate();
    if (data.empty()) throw InvalidInput("dataset has no items");
    FamilyData fam{DistFamily::Csv, "csv", {}, {}, {}};
    ItemId id = 1;
    for (const auto& [group, emp] : data) {
        if (emp.size() == 0) throw InvalidInput("item '" + group + "' has no samples");
        fam.population.push_back(from_samples(std::vector<double>(emp.samples().begin(), emp.samples().end())));
        fam.meta.push_back({{"item", id++}, {"group", group}, {"rows", emp.size()}});
    }
    draw_training(fam, cfg);
    std::vector<int> ks;
    for (int k : cfg.k_values) {
        const int kk = std::min<int>(k, static_cast<int>(data.size()));
        if (std::find(ks.begin(), ks.end(), kk) == ks.end()) ks.push_back(kk);
    }
    return run_pipeline(cfg, {fam}, ks);
}

std::map<std::string, Empirical> ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty file");
    const auto header = io::split_csv_line(line);
    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InvalidInput(path.string() + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t vcol = column(schema.value_column);
    const std::size_t gcol = column(schema.group_column);

    std::map<std::string, std::vector<double>> groups;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = io::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InvalidInput(path.string() + ":" + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        const std::string& text = fields[vcol];
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
            throw InvalidInput(path.string() + ":" + std::to_string(row) + ": non-numeric value '" + text + "'");
        }
        if (v < 0.0) throw InvalidInput(path.string() + ":" + std::to_string(row) + ": negative value " + text);
        groups[fields[gcol]].push_back(v);
    }
    std::map<std::string, Empirical> out;
    for (auto& [g, vals] : groups) {
        if (vals.size() >= schema.min_rows) out.emplace(g, Empirical(std::move(vals)));
    }
    if (out.empty()) throw InvalidInput(path.string() + ": no group has at least " + std::to_string(schema.min_rows) + " rows");
    return out;
}

double bayesian_ratio(long long up, long long down, double c1, double c2) {
    return (static_cast<double>(up) + c1) / (static_cast<double>(up + down) + c2);
}

double sample_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidInput("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<RatioRecord>& records) {
    std::vector<SummaryRow> rows;
    std::vector<std::vector<double>> ratios;
    std::map<std::string, std::size_t> index;
    for (const auto& r : records) {
        const std::string key = r.valuation + '\x1f' + r.family + '\x1f' + r.sketch + '\x1f' + std::to_string(r.k) +
                                '\x1f' + opt_num(r.c);
        auto [it, inserted] = index.emplace(key, rows.size());
        if (inserted) {
            rows.push_back(SummaryRow{r.valuation, r.family, r.sketch, r.k, r.c});
            ratios.emplace_back();
        }
        ratios[it->second].push_back(r.ratio);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = ratios[i];
        rows[i].count = v.size();
        rows[i].min = *std::min_element(v.begin(), v.end());
        rows[i].max = *std::max_element(v.begin(), v.end());
        rows[i].q1 = sample_quantile(v, 0.25);
        rows[i].median = sample_quantile(v, 0.5);
        rows[i].q3 = sample_quantile(v, 0.75);
    }
    return rows;
}

std::string results_csv(const std::vector<RatioRecord>& records) {
    std::ostringstream os;
    os << "valuation,family,sketch,k,c,epsilon,lower_cut,delta,alpha,beta,set,u,u_std_error,u_method,v,v_std_error,"
          "v_method,ratio\n";
    for (const auto& r : records) {
        os << csv_field(r.valuation) << ',' << r.family << ',' << r.sketch << ',' << r.k << ',' << opt_num(r.c) << ','
           << opt_num(r.epsilon) << ',' << opt_num(r.lower_cut) << ',' << opt_num(r.delta) << ','
           << opt_num(r.alpha) << ',' << opt_num(r.beta) << ',' << csv_field(r.set.to_string()) << ','
           << io::format_double(r.u.value) << ',' << io::format_double(r.u.std_error) << ','
           << to_string(r.u.method) << ',' << io::format_double(r.v.value) << ','
           << io::format_double(r.v.std_error) << ',' << to_string(r.v.method) << ','
           << io::format_double(r.ratio) << '\n';
    }
    return os.str();
}

std::string skips_csv(const std::vector<SkipRecord>& skips) {
    std::ostringstream os;
    os << "valuation,family,sketch,k,c,set,reason\n";
    for (const auto& s : skips) {
        os << csv_field(s.valuation) << ',' << s.family << ',' << s.sketch << ',' << s.k << ',' << opt_num(s.c) << ','
           << csv_field(s.set.to_string()) << ',' << csv_field(s.reason) << '\n';
    }
    return os.str();
}

void emit_report(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    if (result.records.empty()) {
        throw InvalidInput("no records to report (" + std::to_string(result.skips.size()) + " tasks skipped)");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw InvalidInput("cannot create " + out_dir.string() + ": " + ec.message());

    io::write_text_file(out_dir / "results.csv", results_csv(result.records));
    io::write_text_file(out_dir / "skips.csv", skips_csv(result.skips));

    json groups = json::array();
    for (const auto& row : summarize(result.records)) {
        groups.push_back({{"valuation", row.valuation},
                          {"family", row.family},
                          {"sketch", row.sketch},
                          {"k", row.k},
                          {"c", row.c ? json(*row.c) : json(nullptr)},
                          {"count", row.count},
                          {"min", row.min},
                          {"q1", row.q1},
                          {"median", row.median},
                          {"q3", row.q3},
                          {"max", row.max}});
    }
    io::write_text_file(out_dir / "summary.json", json{{"groups", groups}}.dump(2) + "\n");

    json meta = {{"tool", "valsketch"},
                 {"version", kVersion},
                 {"seed", cfg.seed},
                 {"config", config_to_json(cfg)},
                 {"items", result.item_meta},
                 {"tasks", result.tasks},
                 {"records", result.records.size()},
                 {"skips", result.skips.size()}};
    io::write_text_file(out_dir / "run_meta.json", meta.dump(2) + "\n");
}

}  // namespace valsketch::bench
