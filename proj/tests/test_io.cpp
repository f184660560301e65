#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "valsketch/error.hpp"
#include "valsketch/io.hpp"

using namespace valsketch;
using io::json;
namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("valuation json round trip") {
    FunctionProperties p;
    p.subadditive = true;
    p.weak_hom_degree = 0.4;
    const std::vector<ValuationSpec> specs{
        ValuationSpec::max(),
        ValuationSpec::top_h(3),
        ValuationSpec::ces(2.5),
        ValuationSpec::power_of_sum(0.5),
        ValuationSpec::concave_of_sum(ScalarConcave::sqrt()),
        ValuationSpec::concave_of_sum(ScalarConcave::power(0.3)),
        ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(2.0)),
        ValuationSpec::success_probability(),
        apply_transform(ValuationSpec::power_of_sum(0.5), {ScalarMap::power(2.0)}),
        apply_transform(ValuationSpec::ces(2.0), {ScalarMap::power(0.5)}, p),
    };
    for (const auto& s : specs) {
        const json j = io::valuation_to_json(s);
        CHECK(j.contains("variant"));
        const auto back = io::valuation_from_json(json::parse(j.dump()));
        CHECK(back.name() == s.name());
        CHECK(back.properties() == s.properties());
        CHECK(io::valuation_to_json(back) == j);
    }
}

TEST_CASE("valuation json errors") {
    CHECK_THROWS_AS((void)io::valuation_from_json(json::parse(R"({"variant": "median"})")), InvalidInput);
    CHECK_THROWS_AS((void)io::valuation_from_json(json::parse(R"({"variant": "ces"})")), InvalidInput);
    CHECK_THROWS_AS((void)io::valuation_from_json(json::parse(R"({"variant": "max", "r": 2})")), InvalidInput);
    CHECK_THROWS_AS((void)io::valuation_from_json(json::parse(R"({"variant": "ces", "r": 0.5})")), InvalidInput);
}

TEST_CASE("distribution json forms") {
    auto d = io::distribution_from_json(json::parse(R"({"atoms": [[0, 0.5], [2, 0.5]]})"));
    CHECK(d.as<DiscreteDistribution>() != nullptr);
    d = io::distribution_from_json(json::parse(R"({"family": "pareto", "shape": 2, "scale": 1.5})"));
    REQUIRE(d.as<Pareto>() != nullptr);
    CHECK(d.as<Pareto>()->shape == 2.0);
    d = io::distribution_from_json(json::parse(R"({"samples": [3, 1, 2]})"));
    CHECK(d.as<Empirical>() != nullptr);
    d = io::distribution_from_json(json::parse(R"({"tau": 1, "summary": {"atoms": [[1, 1]]}})"));
    CHECK(d.as<DiscreteDistribution>() != nullptr);
    CHECK_THROWS_AS((void)io::distribution_from_json(json::parse(R"({"atoms": [[1, 0.5]]})")), InvalidInput);
    CHECK_THROWS_AS((void)io::distribution_from_json(json::parse(R"({"family": "gamma"})")), InvalidInput);
}

TEST_CASE("sketch json fields") {
    const SketchParams params{0.1, 0.01};
    const auto r = discretize(ItemDistribution::exponential(1.0), ValuationSpec::max(), params);
    const json j = io::sketch_to_json(r, params, 4);
    for (const char* key : {"tau", "tail_mean", "tail_atom", "bin_count", "summary"}) CHECK(j.contains(key));
    CHECK(j.at("bin_count") == 43);
    CHECK(j.at("item") == 4);
    const auto back = io::distribution_from_json(j);
    CHECK(*back.as<DiscreteDistribution>() == r.summary);
}

TEST_CASE("catalog loading") {
    const auto dir = fs::temp_directory_path() / "valsketch_test_catalog";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "2.json") << R"({"atoms": [[1, 1]]})";
    std::ofstream(dir / "item_5.json") << R"({"atoms": [[2, 1]]})";
    std::ofstream(dir / "whatever.json") << R"({"item": 9, "summary": {"atoms": [[3, 1]]}})";
    const auto c = io::load_catalog(dir);
    REQUIRE(c.size() == 3);
    CHECK(c.count(2) == 1);
    CHECK(c.count(5) == 1);
    CHECK(c.count(9) == 1);
    CHECK(io::to_discrete_catalog(c).at(9).atoms()[0].value == 3.0);

    std::ofstream(dir / "nameless.json") << R"({"atoms": [[3, 1]]})";
    CHECK_THROWS_AS((void)io::load_catalog(dir), InvalidInput);
}

TEST_CASE("samples csv") {
    const auto p = fs::temp_directory_path() / "valsketch_test_samples.csv";
    std::ofstream(p) << "score\n1.5\n2\n0.25,ignored\n";
    CHECK(io::read_samples_csv(p) == std::vector<double>{1.5, 2.0, 0.25});
    std::ofstream(p) << "1\n2\n";
    CHECK(io::read_samples_csv(p) == std::vector<double>{1.0, 2.0});
}

TEST_CASE("double formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, 2.302585092994046, 1e-300, 12345678.9}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.25) == "0.25");
}

TEST_CASE("csv line splitting") {
    CHECK(io::split_csv_line(R"(a,"1,2",c)") == std::vector<std::string>{"a", "1,2", "c"});
    CHECK(io::split_csv_line(R"("say ""hi""",x)") == std::vector<std::string>{"say \"hi\"", "x"});
}

}  // TEST_SUITE
