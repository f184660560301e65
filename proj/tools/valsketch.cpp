// valsketch: command-line front end for discretization sketches,
// set evaluation, greedy selection and the ratio experiments.

#include <charconv>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "valsketch/baseline.hpp"
#include "valsketch/bench.hpp"
#include "valsketch/error.hpp"
#include "valsketch/io.hpp"
#include "valsketch/optimize.hpp"
#include "valsketch/sketcher.hpp"

using namespace valsketch;
using io::json;

namespace {

EvalMethod parse_method(const std::string& s) {
    if (s == "exact") return EvalMethod::ExactEnum;
    if (s == "fast") return EvalMethod::FastPath;
    if (s == "mc") return EvalMethod::MonteCarlo;
    throw InvalidInput("unknown method '" + s + "' (expected exact, fast or mc)");
}

struct Evaluator {
    ValuationSpec spec;
    DistributionCatalog dists;
    DiscreteCatalog discrete;
    EvalMethod method;
    MonteCarloOptions mc;

    Evaluator(ValuationSpec s, DistributionCatalog d, EvalMethod m, MonteCarloOptions o)
        : spec(std::move(s)), dists(std::move(d)), method(m), mc(o) {
        if (method != EvalMethod::MonteCarlo) discrete = io::to_discrete_catalog(dists);
    }

    EvalEstimate operator()(const ItemSet& set) const {
        switch (method) {
            case EvalMethod::ExactEnum: return expected_value_exact(spec, discrete, set);
            case EvalMethod::FastPath: return expected_value_fast(spec, discrete, set);
            case EvalMethod::MonteCarlo: return expected_value_mc(spec, dists, set, mc);
        }
        return {};
    }
};

std::vector<ItemId> ids_of(const DistributionCatalog& c) {
    std::vector<ItemId> ids;
    for (const auto& [id, _] : c) ids.push_back(id);
    return ids;
}

json set_json(const ItemSet& s) { return std::vector<ItemId>(s.begin(), s.end()); }

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"valsketch: discretization sketches for stochastic set valuations"};
    app.require_subcommand(1);

    // discretize
    auto* disc = app.add_subcommand("discretize", "Build one item's sketch");
    std::string dist_path, valuation_path, out_path;
    double epsilon = 0.0;
    double lower_cut = 0.0;
    int item = 1;
    disc->add_option("--dist", dist_path, "Distribution JSON or a CSV column of samples")->required();
    disc->add_option("--valuation", valuation_path, "Valuation spec JSON")->required();
    disc->add_option("--epsilon", epsilon, "Tail quantile level")->required();
    auto* lower_cut_opt = disc->add_option("--lower-cut", lower_cut, "Lower cut a (default [eps (eps - delta)]^{1/d})");
    disc->add_option("--item", item, "Item id (selects the coordinate for per-coordinate transforms)");
    disc->add_option("--out", out_path, "Output file (stdout when omitted)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Expected value of a set");
    std::string sketches_dir, set_text, method_text = "fast";
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    eval->add_option("--valuation", valuation_path)->required();
    eval->add_option("--sketches", sketches_dir, "Directory of per-item JSON files")->required();
    eval->add_option("--set", set_text, "Comma-separated item ids")->required();
    eval->add_option("--method", method_text)->check(CLI::IsMember({"exact", "fast", "mc"}));
    eval->add_option("--samples", samples);
    eval->add_option("--seed", seed);
    eval->add_option("--workers", workers);

    // greedy
    auto* greedy = app.add_subcommand("greedy", "Greedy set selection or welfare partition");
    std::size_t k = 0;
    std::string welfare_text;
    bool lazy = false;
    greedy->add_option("--valuation", valuation_path)->required();
    greedy->add_option("--sketches", sketches_dir)->required();
    auto* k_opt = greedy->add_option("--k", k, "Set size");
    auto* welfare_opt = greedy->add_option("--welfare", welfare_text, "Part sizes k1,k2,...");
    k_opt->excludes(welfare_opt);
    greedy->add_option("--method", method_text)->check(CLI::IsMember({"exact", "fast", "mc"}));
    greedy->add_option("--samples", samples);
    greedy->add_option("--seed", seed);
    greedy->add_flag("--lazy", lazy, "Lazy greedy");
    greedy->add_option("--workers", workers);

    // testscore
    auto* ts = app.add_subcommand("testscore", "Replication test scores for every item");
    std::size_t replicas = 1;
    ts->add_option("--valuation", valuation_path)->required();
    ts->add_option("--dists", sketches_dir, "Directory of per-item JSON files")->required();
    ts->add_option("--k", replicas, "Replicas per score")->required();
    ts->add_option("--samples", samples);
    ts->add_option("--seed", seed);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Ratio experiments and bound factors");
    bench_cmd->require_subcommand(1);
    std::string config_path, data_path, out_dir;
    auto* synth = bench_cmd->add_subcommand("synthetic", "Synthetic ratio experiment");
    synth->add_option("--config", config_path)->required();
    synth->add_option("--out", out_dir)->required();
    auto* real = bench_cmd->add_subcommand("real", "Ratio experiment on a grouped CSV");
    real->add_option("--config", config_path)->required();
    real->add_option("--data", data_path)->required();
    real->add_option("--out", out_dir)->required();
    auto* bounds = bench_cmd->add_subcommand("bounds", "Approximation factors alpha and beta");
    int bk = 1;
    double delta = 0.0, degree = 1.0, tolerance = 1.0;
    std::string variant_text = "weakhom";
    bounds->add_option("--k", bk)->required();
    bounds->add_option("--epsilon", epsilon)->required();
    bounds->add_option("--lower-cut", lower_cut)->required();
    bounds->add_option("--delta", delta);
    bounds->add_option("--degree", degree);
    bounds->add_option("--tolerance", tolerance);
    bounds->add_option("--variant", variant_text)->check(CLI::IsMember({"weakhom", "concave", "coordinate"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 64;
    }

    try {
        if (*disc) {
            const auto spec = io::valuation_from_json(io::read_json_file(valuation_path));
            const std::filesystem::path p(dist_path);
            const ItemDistribution dist = p.extension() == ".csv" ? from_samples(io::read_samples_csv(p))
                                                                  : io::distribution_from_json(io::read_json_file(p));
            if (item < 1) throw InvalidInput("--item must be >= 1");
            if (!*lower_cut_opt) {
                const auto props = properties(spec);
                const double d = parameter_degree(props, select_bound_variant(props));
                lower_cut = lower_cut_for(epsilon, d, atom_mass_at(dist, quantile(dist, 1.0 - epsilon)));
            }
            const SketchParams params{epsilon, lower_cut};
            const auto res = discretize(dist, spec, params, static_cast<std::size_t>(item - 1));
            const std::string text = io::sketch_to_json(res, params, item).dump(2) + "\n";
            if (out_path.empty()) {
                std::cout << text;
            } else {
                io::write_text_file(out_path, text);
            }
        } else if (*eval) {
            Evaluator ev(io::valuation_from_json(io::read_json_file(valuation_path)), io::load_catalog(sketches_dir),
                         parse_method(method_text), MonteCarloOptions{samples, seed, workers});
            print(io::estimate_to_json(ev(ItemSet::parse(set_text))));
        } else if (*greedy) {
            Evaluator ev(io::valuation_from_json(io::read_json_file(valuation_path)), io::load_catalog(sketches_dir),
                         parse_method(method_text), MonteCarloOptions{samples, seed, 1});
            const SetOracle oracle = [&ev](const ItemSet& s) { return ev(s).value; };
            const GreedyOptions opts{lazy, workers};
            if (*welfare_opt) {
                std::vector<std::size_t> sizes;
                std::stringstream ss(welfare_text);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    std::size_t v = 0;
                    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                        throw InvalidInput("bad part size '" + tok + "' in --welfare");
                    }
                    sizes.push_back(v);
                }
                const std::vector<SetOracle> oracles(sizes.size(), oracle);
                const auto res = greedy_welfare(oracles, ids_of(ev.dists), sizes, opts);
                json parts = json::array();
                for (const auto& p : res.parts) parts.push_back(set_json(p));
                json trace = json::array();
                for (const auto& t : res.trace) trace.push_back({{"part", t.part}, {"item", t.item}, {"gain", t.gain}});
                print({{"parts", parts}, {"welfare", res.welfare}, {"oracle_calls", res.oracle_calls}, {"trace", trace}});
            } else {
                if (!*k_opt) throw InvalidInput("greedy needs --k or --welfare");
                const auto res = greedy_select(oracle, ids_of(ev.dists), k, opts);
                json trace = json::array();
                for (const auto& t : res.trace) trace.push_back({{"item", t.item}, {"gain", t.gain}});
                print({{"chosen", set_json(res.chosen)},
                       {"objective", res.objective},
                       {"oracle_calls", res.oracle_calls},
                       {"trace", trace}});
            }
        } else if (*ts) {
            const auto spec = io::valuation_from_json(io::read_json_file(valuation_path));
            print(io::testscore_table_to_json(
                build_test_score_table(io::load_catalog(sketches_dir), spec, replicas, samples, seed)));
        } else if (*synth) {
            const auto cfg = bench::config_from_json(io::read_json_file(config_path));
            const auto res = bench::run_synthetic(cfg);
            bench::emit_report(res, cfg, out_dir);
            print({{"records", res.records.size()}, {"skips", res.skips.size()}, {"out", out_dir}});
        } else if (*real) {
            const auto cfg = bench::config_from_json(io::read_json_file(config_path));
            const auto res = bench::run_real(cfg, bench::ingest_csv(data_path, cfg.csv));
            bench::emit_report(res, cfg, out_dir);
            print({{"records", res.records.size()}, {"skips", res.skips.size()}, {"out", out_dir}});
        } else if (*bounds) {
            const auto report =
                approximation_factors(bk, epsilon, lower_cut, delta, degree, tolerance, parse_bound_variant(variant_text));
            json j = io::bound_to_json(report);
            j["k"] = bk;
            j["epsilon"] = epsilon;
            j["lower_cut"] = lower_cut;
            j["delta"] = delta;
            j["degree"] = degree;
            j["tolerance"] = tolerance;
            print(j);
        }
    } catch (const InvalidInput& e) {
        std::cerr << json{{"error", "invalid_input"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << json{{"error", "cap_exceeded"}, {"message", e.what()}}.dump() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
