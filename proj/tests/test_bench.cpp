#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "valsketch/bench.hpp"
#include "valsketch/error.hpp"
#include "valsketch/io.hpp"

using namespace valsketch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("valsketch_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_csv(const std::string& name, const std::string& text) {
    const auto p = scratch(name) / "data.csv";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bench::ExperimentConfig small_config() {
    auto cfg = bench::ExperimentConfig::defaults();
    cfg.n = 6;
    cfg.n_train = 200;
    cfg.k_values = {1, 2};
    cfg.c_values = {0.1};
    cfg.sets_per_k = 4;
    cfg.seed = 3;
    cfg.v_samples = 2000;
    return cfg;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("csv ingestion groups rows") {
    const auto p = write_csv("ingest", "item,value\na,1\na,2\nb,5\n");
    const auto g = bench::ingest_csv(p, {});
    REQUIRE(g.size() == 2);
    CHECK(std::vector<double>(g.at("a").samples().begin(), g.at("a").samples().end()) == std::vector<double>{1, 2});
    CHECK(g.at("b").size() == 1);

    const auto filtered = bench::ingest_csv(p, {"value", "item", 2});
    CHECK(filtered.size() == 1);
    CHECK(filtered.count("a") == 1);
}

TEST_CASE("csv ingestion errors") {
    CHECK_THROWS_AS((void)bench::ingest_csv(write_csv("neg", "item,value\na,1\na,-2\n"), {}), InvalidInput);
    CHECK_THROWS_AS((void)bench::ingest_csv(write_csv("nan", "item,value\na,x\n"), {}), InvalidInput);
    CHECK_THROWS_AS((void)bench::ingest_csv(write_csv("col", "group,value\na,1\n"), {}), InvalidInput);
    CHECK_THROWS_AS((void)bench::ingest_csv(write_csv("few", "item,value\na,1\n"), {"value", "item", 3}), InvalidInput);
}

TEST_CASE("bayesian ratio") {
    CHECK(bench::bayesian_ratio(0, 0, 2, 8) == 0.25);
    CHECK(bench::bayesian_ratio(0, 0, 10, 10) == 1.0);
    CHECK(bench::bayesian_ratio(100'000'000, 3, 2, 8) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(bench::bayesian_ratio(5, 2, 2, 8) < bench::bayesian_ratio(6, 2, 2, 8));
    CHECK(bench::bayesian_ratio(5, 2, 2, 8) > bench::bayesian_ratio(5, 3, 2, 8));
}

TEST_CASE("sample quantile") {
    CHECK(bench::sample_quantile({4, 1, 3, 2}, 0.5) == 2.5);
    CHECK(bench::sample_quantile({4, 1, 3, 2}, 0.25) == 1.75);
    CHECK(bench::sample_quantile({7}, 0.9) == 7.0);
}

TEST_CASE("config parsing") {
    const auto j = io::json::parse(R"({"n": 4, "k_values": [1, 3], "c_values": [0.1, 0.5], "seed": 9,
        "valuations": [{"variant": "max", "id": "m"}], "dist_family": "pareto"})");
    const auto cfg = bench::config_from_json(j);
    CHECK(cfg.n == 4);
    CHECK(cfg.valuations.size() == 1);
    CHECK(cfg.valuations[0].id == "m");
    CHECK(cfg.families == std::vector<bench::DistFamily>{bench::DistFamily::Pareto});
    CHECK(bench::config_from_json(bench::config_to_json(cfg)).k_values == cfg.k_values);
    CHECK_THROWS_AS((void)bench::config_from_json(io::json::parse(R"({"nn": 4})")), InvalidInput);
    CHECK_THROWS_AS((void)bench::config_from_json(io::json::parse(R"({"k_values": [0]})")), InvalidInput);
}

TEST_CASE("every task is a record or a skip") {
    auto cfg = small_config();
    cfg.c_values = {0.1, 1.5};
    cfg.baseline = bench::BaselineConfig{500, std::nullopt};
    const auto r = bench::run_synthetic(cfg);
    CHECK(r.tasks == r.records.size() + r.skips.size());
    CHECK(r.skips.size() > 0);  // c = 1.5 with k = 1 gives epsilon >= 1
    bool saw_testscore = false;
    for (const auto& rec : r.records) saw_testscore |= rec.sketch == "testscore";
    CHECK(saw_testscore);
}

TEST_CASE("single-item ratios stay inside the bound interval") {
    auto cfg = small_config();
    cfg.n = 5;
    cfg.k_values = {1};
    cfg.c_values = {0.1, 0.3, 0.6};
    cfg.sets_per_k = 5;
    const auto r = bench::run_synthetic(cfg);
    REQUIRE(r.records.size() == 5 * 3 * 3 * 2);
    for (const auto& rec : r.records) {
        REQUIRE(rec.alpha.has_value());
        REQUIRE(rec.v.method != EvalMethod::MonteCarlo);
        const double ratio = rec.u.value / rec.v.value;
        CHECK(ratio >= *rec.alpha - 1e-9);
        CHECK(ratio <= *rec.beta + 1e-9);
    }
}

TEST_CASE("reports") {
    auto cfg = small_config();
    cfg.k_values = {2};
    cfg.valuations.erase(cfg.valuations.begin() + 1, cfg.valuations.end());
    cfg.families = {bench::DistFamily::Exponential};
    auto res = bench::run_synthetic(cfg);
    REQUIRE(!res.records.empty());

    bench::ExperimentResult one = res;
    one.records.resize(1);
    one.skips.clear();
    const auto d1 = scratch("report1");
    bench::emit_report(one, cfg, d1);
    CHECK(count_lines(slurp(d1 / "results.csv")) == 2);
    CHECK(fs::exists(d1 / "run_meta.json"));

    auto two = one;
    two.records.push_back(one.records[0]);
    two.records[1].c = 0.5;
    bench::emit_report(two, cfg, d1);
    CHECK(io::read_json_file(d1 / "summary.json").at("groups").size() == 2);

    bench::ExperimentResult none;
    CHECK_THROWS_AS(bench::emit_report(none, cfg, scratch("report0")), InvalidInput);
}

TEST_CASE("reruns are byte identical") {
    auto cfg = small_config();
    cfg.workers = 1;
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    bench::emit_report(bench::run_synthetic(cfg), cfg, a);
    cfg.workers = 3;
    bench::emit_report(bench::run_synthetic(cfg), cfg, b);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("real data") {
    auto cfg = small_config();
    cfg.k_values = {5};
    cfg.c_values = {0.5};
    cfg.families = {bench::DistFamily::Csv};
    std::map<std::string, Empirical> one{{"only", Empirical({1, 2, 3, 4, 5, 6, 7, 8, 9, 10})}};
    const auto r = bench::run_real(cfg, one);
    REQUIRE(!r.records.empty());
    for (const auto& rec : r.records) {
        CHECK(rec.k == 1);
        CHECK(rec.set == ItemSet{1});
    }
    CHECK_THROWS_AS((void)bench::run_real(cfg, {}), InvalidInput);
}

TEST_CASE("results csv layout") {
    bench::RatioRecord r;
    r.valuation = "max";
    r.family = "exponential";
    r.sketch = "discretization";
    r.k = 3;
    r.c = 0.1;
    r.set = ItemSet{1, 4, 7};
    r.u.value = 2.0;
    r.v.value = 1.0;
    r.ratio = 0.5;
    const auto csv = bench::results_csv({r});
    CHECK(csv.rfind("valuation,family,sketch,k,c,", 0) == 0);
    CHECK(csv.find("\"1,4,7\"") != std::string::npos);
}

}  // TEST_SUITE
