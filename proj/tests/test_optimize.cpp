#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "valsketch/error.hpp"
#include "valsketch/optimize.hpp"

using namespace valsketch;

namespace {

SetOracle modular(std::vector<double> w) {
    return [w](const ItemSet& s) {
        double v = 0.0;
        for (ItemId i : s) v += w[static_cast<std::size_t>(i - 1)];
        return v;
    };
}

std::vector<ItemId> range(int n) {
    std::vector<ItemId> ids;
    for (int i = 1; i <= n; ++i) ids.push_back(i);
    return ids;
}

SetOracle exact_oracle(const ValuationSpec& spec, DiscreteCatalog c) {
    return [spec, c = std::move(c)](const ItemSet& s) { return expected_value_fast(spec, c, s).value; };
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("greedy on a modular oracle") {
    const auto r = greedy_select(modular({5, 3, 1}), range(3), 2);
    CHECK(r.chosen == ItemSet{1, 2});
    CHECK(r.objective == 8.0);
    CHECK(r.oracle_calls == 3 + 2);
    REQUIRE(r.trace.size() == 2);
    CHECK(r.trace[0].item == 1);
    CHECK(r.trace[0].gain == 5.0);

    const auto z = greedy_select(modular({5, 3, 1}), range(3), 0);
    CHECK(z.chosen.empty());
    CHECK(z.objective == 0.0);
    CHECK_THROWS_AS((void)greedy_select(modular({5, 3, 1}), range(3), 4), InvalidInput);
}

TEST_CASE("ties go to the lowest id") {
    const auto r = greedy_select(modular({2, 2, 2}), {3, 1, 2}, 1);
    CHECK(r.chosen == ItemSet{1});
}

TEST_CASE("brute force") {
    const auto r = brute_force_best(modular({5, 3, 1}), range(3), 2);
    CHECK(r.chosen == ItemSet{1, 2});
    CHECK(r.objective == 8.0);
    CHECK(brute_force_best(modular({5, 3, 1}), range(3), 3).chosen == ItemSet{1, 2, 3});
    CHECK_THROWS_AS((void)brute_force_best(modular(std::vector<double>(30, 1.0)), range(30), 15), CapExceeded);
    CHECK(choose(8, 3) == 56.0);
}

TEST_CASE("greedy is within 1 - 1/e of the optimum") {
    CounterStream r(71, 0);
    for (int t = 0; t < 200; ++t) {
        DiscreteCatalog c;
        for (ItemId i = 1; i <= 8; ++i) c[i] = testsupport::random_discrete(r, 6);
        const auto oracle = exact_oracle(ValuationSpec::max(), c);
        const auto g = greedy_select(oracle, range(8), 3);
        const auto b = brute_force_best(oracle, range(8), 3);
        CHECK(g.objective >= (1.0 - std::exp(-1.0)) * b.objective - 1e-12);
        CHECK(b.objective >= g.objective - 1e-12);
        CHECK(g.oracle_calls == 8 + 7 + 6);
    }
}

TEST_CASE("lazy greedy agrees with plain greedy on submodular oracles") {
    CounterStream r(72, 0);
    for (int t = 0; t < 50; ++t) {
        DiscreteCatalog c;
        for (ItemId i = 1; i <= 10; ++i) c[i] = testsupport::random_discrete(r, 5);
        const auto oracle = exact_oracle(ValuationSpec::concave_of_sum(ScalarConcave::sqrt()), c);
        const auto plain = greedy_select(oracle, range(10), 4);
        const auto lazy = greedy_select(oracle, range(10), 4, {true, 1});
        CHECK(lazy.objective == doctest::Approx(plain.objective).epsilon(1e-12));
        CHECK(lazy.oracle_calls <= plain.oracle_calls);
    }
}

TEST_CASE("workers do not change the result") {
    CounterStream r(73, 0);
    DiscreteCatalog c;
    for (ItemId i = 1; i <= 12; ++i) c[i] = testsupport::random_discrete(r, 5);
    const auto oracle = exact_oracle(ValuationSpec::ces(2.0), c);
    const auto one = greedy_select(oracle, range(12), 4);
    const auto four = greedy_select(oracle, range(12), 4, {false, 4});
    CHECK(one.chosen == four.chosen);
    CHECK(one.objective == four.objective);
    CHECK(one.oracle_calls == four.oracle_calls);
}

TEST_CASE("welfare with one part matches greedy selection") {
    const auto o = modular({1, 4, 2, 8, 5});
    const auto w = greedy_welfare({o}, range(5), {3});
    const auto g = greedy_select(o, range(5), 3);
    REQUIRE(w.parts.size() == 1);
    CHECK(w.parts[0] == g.chosen);
    CHECK(w.welfare == g.objective);
    CHECK(w.oracle_calls == g.oracle_calls);
}

TEST_CASE("welfare with disjoint favourites is optimal") {
    const auto a = modular({10, 9, 1, 1});
    const auto b = modular({1, 1, 10, 9});
    const auto w = greedy_welfare({a, b}, range(4), {2, 2});
    CHECK(w.parts[0] == ItemSet{1, 2});
    CHECK(w.parts[1] == ItemSet{3, 4});
    CHECK(w.welfare == 38.0);
    CHECK(brute_force_welfare({a, b}, range(4), {2, 2}).welfare == 38.0);
    CHECK_THROWS_AS((void)greedy_welfare({a, b}, range(4), {3, 2}), InvalidInput);
    CHECK_THROWS_AS((void)greedy_welfare({a}, range(4), {1, 1}), InvalidInput);
}

TEST_CASE("welfare greedy is within one half of the optimum") {
    CounterStream r(74, 0);
    for (int t = 0; t < 100; ++t) {
        std::vector<SetOracle> oracles;
        for (int p = 0; p < 2; ++p) {
            DiscreteCatalog c;
            for (ItemId i = 1; i <= 6; ++i) c[i] = testsupport::random_discrete(r, 5);
            oracles.push_back(exact_oracle(p == 0 ? ValuationSpec::max() : ValuationSpec::ces(2.0), c));
        }
        const auto g = greedy_welfare(oracles, range(6), {2, 2});
        const auto b = brute_force_welfare(oracles, range(6), {2, 2});
        CHECK(g.welfare >= 0.5 * b.welfare - 1e-12);
        CHECK(b.welfare >= g.welfare - 1e-12);
    }
}

TEST_CASE("greedy is deterministic") {
    CounterStream r(75, 0);
    DiscreteCatalog c;
    for (ItemId i = 1; i <= 9; ++i) c[i] = testsupport::random_discrete(r, 4);
    const auto oracle = exact_oracle(ValuationSpec::max(), c);
    const auto a = greedy_select(oracle, range(9), 3);
    const auto b = greedy_select(oracle, range(9), 3);
    CHECK(a.chosen == b.chosen);
    CHECK(a.objective == b.objective);
}

}  // TEST_SUITE
