#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "valsketch/error.hpp"
#include "valsketch/valuation.hpp"

using namespace valsketch;
using testsupport::uniform;

namespace {

struct Case {
    const char* label;
    ValuationSpec spec;
    bool unit_box;  // domain [0, 1]^n
};

std::vector<Case> builtins() {
    return {
        {"max", ValuationSpec::max(), false},
        {"top2", ValuationSpec::top_h(2), false},
        {"ces2", ValuationSpec::ces(2.0), false},
        {"ces3.5", ValuationSpec::ces(3.5), false},
        {"pos0.5", ValuationSpec::power_of_sum(0.5), false},
        {"pos1", ValuationSpec::power_of_sum(1.0), false},
        {"sqrt", ValuationSpec::concave_of_sum(ScalarConcave::sqrt()), false},
        {"pow0.3", ValuationSpec::concave_of_sum(ScalarConcave::power(0.3)), false},
        {"expsat", ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(1.5)), false},
        {"success", ValuationSpec::success_probability(), true},
        {"pos-transformed", apply_transform(ValuationSpec::power_of_sum(0.5), {ScalarMap::power(2.0)}), false},
        {"success-transformed",
         apply_transform(ValuationSpec::success_probability(), {ScalarMap::exp_saturation(1.0)}), false},
    };
}

std::vector<double> draw_point(CounterStream& s, std::size_t n, bool unit_box) {
    std::vector<double> x(n);
    for (auto& v : x) {
        v = s.uniform() < 0.15 ? 0.0 : uniform(s, 0.0, unit_box ? 1.0 : 5.0);
    }
    return x;
}

}  // namespace

TEST_SUITE("valuation") {

TEST_CASE("evaluate matches hand-computed values") {
    const std::vector<double> a{1.0, 3.0};
    CHECK(evaluate(ValuationSpec::max(), a) == 3.0);
    const std::vector<double> b{3.0, 4.0};
    CHECK(evaluate(ValuationSpec::ces(2.0), b) == doctest::Approx(5.0).epsilon(1e-15));
    const std::vector<double> c{0.5, 0.5};
    CHECK(evaluate(ValuationSpec::success_probability(), c) == doctest::Approx(0.75));
    const std::vector<double> d{5.0, 4.0, 3.0};
    CHECK(evaluate(ValuationSpec::top_h(2), d) == 9.0);
    CHECK(evaluate(ValuationSpec::top_h(5), d) == 12.0);
    CHECK(evaluate(ValuationSpec::max(), std::vector<double>{}) == 0.0);
}

TEST_CASE("evaluate rejects inputs outside the domain") {
    CHECK_THROWS_AS((void)evaluate(ValuationSpec::max(), std::vector<double>{1.0, -0.1}), InvalidInput);
    CHECK_THROWS_AS((void)evaluate(ValuationSpec::ces(2), std::vector<double>{NAN}), InvalidInput);
    CHECK_THROWS_AS((void)evaluate(ValuationSpec::success_probability(), std::vector<double>{0.2, 1.2}),
                    InvalidInput);
}

TEST_CASE("constructors reject invalid parameters") {
    CHECK_THROWS_AS((void)ValuationSpec::top_h(0), InvalidInput);
    CHECK_THROWS_AS((void)ValuationSpec::ces(0.5), InvalidInput);
    CHECK_THROWS_AS((void)ValuationSpec::power_of_sum(1.5), InvalidInput);
    CHECK_THROWS_AS((void)ScalarConcave::power(0.0), InvalidInput);
    CHECK_THROWS_AS((void)ScalarConcave::exp_saturation(-1.0), InvalidInput);
}

TEST_CASE("scalar inverse examples") {
    CHECK(scalar_inverse(ValuationSpec::max(), 2.5) == 2.5);
    CHECK(scalar_inverse(ValuationSpec::concave_of_sum(ScalarConcave::sqrt()), 3.0) == doctest::Approx(9.0));
    CHECK(scalar_inverse(ValuationSpec::power_of_sum(0.5), 4.0) == doctest::Approx(16.0));
    CHECK_THROWS_AS((void)scalar_inverse(ValuationSpec::success_probability(), 1.5), InvalidInput);
    CHECK_THROWS_AS((void)scalar_inverse(ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(1.0)), 1.0),
                    InvalidInput);
}

TEST_CASE("scalar inverse is a right inverse") {
    CounterStream s(11, 0);
    for (const auto& c : builtins()) {
        for (int t = 0; t < 500; ++t) {
            const double x0 = uniform(s, 0.0, c.unit_box ? 1.0 : 8.0);
            const std::vector<double> e{x0};
            const double y = evaluate(c.spec, e);
            if (c.spec.as<valuation::ConcaveOfSum>() && y > 0.999999) continue;
            const double x = scalar_inverse(c.spec, y);
            const double back = evaluate(c.spec, std::vector<double>{x});
            CHECK_MESSAGE(std::abs(back - y) <= 1e-9 * std::max(1.0, y), c.label);
        }
    }
}

TEST_CASE("declared properties follow the table") {
    const auto mx = properties(ValuationSpec::max());
    CHECK(mx.subadditive);
    CHECK(mx.submodular);
    CHECK(mx.weak_hom_degree == 1.0);
    CHECK(mx.weak_hom_tolerance == 1.0);

    CHECK(properties(ValuationSpec::top_h(3)).weak_hom_degree == 1.0);
    CHECK(properties(ValuationSpec::ces(2)).weak_hom_degree == 1.0);
    CHECK(properties(ValuationSpec::power_of_sum(0.25)).weak_hom_degree == 0.25);
    CHECK(properties(ValuationSpec::concave_of_sum(ScalarConcave::sqrt())).weak_hom_degree == 0.5);
    CHECK(properties(ValuationSpec::concave_of_sum(ScalarConcave::power(0.3))).weak_hom_degree == 0.3);

    const auto es = properties(ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(2.0)));
    CHECK(es.weak_hom_degree == 0.0);
    CHECK(es.weak_hom_tolerance == 1.0);
    CHECK(es.extendable_concave);

    const auto sp = properties(ValuationSpec::success_probability());
    CHECK(sp.weak_hom_degree == 0.5);
    CHECK(sp.weak_hom_tolerance == 1.0);
    CHECK(properties(ValuationSpec::success_probability(), 1).weak_hom_degree == 1.0);
}

TEST_CASE("min elasticity per concave kind") {
    CHECK(ScalarConcave::sqrt().min_elasticity() == 0.5);
    CHECK(ScalarConcave::power(0.7).min_elasticity() == 0.7);
    CHECK(ScalarConcave::exp_saturation(3.0).min_elasticity() == 0.0);
}

TEST_CASE("transform worked examples") {
    const auto pos = ValuationSpec::power_of_sum(0.5);
    const auto star = apply_transform(pos, {ScalarMap::power(2.0)});
    CHECK(star.properties().weak_hom_degree == 1.0);
    CHECK(star.properties().weak_hom_tolerance == 1.0);
    CHECK(star.properties().subadditive);
    CHECK(star.properties().submodular);
    const std::vector<double> x{3.0, 4.0};
    CHECK(evaluate(star, x) == doctest::Approx(5.0));

    const auto sp = apply_transform(ValuationSpec::success_probability(), {ScalarMap::exp_saturation(1.0)});
    CHECK(sp.properties() == ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(1.0)).properties());
    const std::vector<double> y{0.3, 1.1, 0.0};
    CHECK(evaluate(sp, y) == doctest::Approx(1.0 - std::exp(-1.4)).epsilon(1e-14));
}

TEST_CASE("identity transform leaves the spec unchanged") {
    const auto ces = ValuationSpec::ces(3.0);
    const auto same = apply_transform(ces, {ScalarMap::identity(), ScalarMap::identity()});
    CHECK(same.as<valuation::Ces>() != nullptr);
    CHECK(same.properties() == ces.properties());
    CHECK(same.name() == ces.name());
}

TEST_CASE("other composites need declared properties") {
    CHECK_THROWS_AS((void)apply_transform(ValuationSpec::max(), {ScalarMap::power(0.5)}), InvalidInput);
    FunctionProperties p;
    p.subadditive = true;
    p.submodular = true;
    p.weak_hom_degree = 0.5;
    const auto t = apply_transform(ValuationSpec::max(), {ScalarMap::power(0.5)}, p);
    CHECK(t.properties() == p);
    CHECK(evaluate(t, std::vector<double>{4.0, 9.0}) == doctest::Approx(3.0));
}

TEST_CASE("per-coordinate transforms are applied by position") {
    FunctionProperties p;
    p.subadditive = true;
    p.submodular = true;
    const auto t = apply_transform(ValuationSpec::max(), {ScalarMap::power(2.0), ScalarMap::power(1.0)}, p);
    CHECK_FALSE(t.symmetric());
    CHECK(evaluate(t, std::vector<double>{3.0, 5.0}) == 9.0);
    CHECK(scalar_inverse(t, 9.0, 0) == doctest::Approx(3.0));
    CHECK(scalar_inverse(t, 9.0, 1) == doctest::Approx(9.0));
}

TEST_CASE("weak homogeneity examples") {
    const std::vector<double> x{3.0, 4.0};
    CHECK(check_weak_homogeneity(ValuationSpec::max(), x, 1.0).holds);
    const auto ces = check_weak_homogeneity(ValuationSpec::ces(2.0), x, 0.5);
    CHECK(ces.holds);
    CHECK(ces.f_theta_x == doctest::Approx(2.5));
    const std::vector<double> ones{1.0, 1.0};
    const auto sp = check_weak_homogeneity(ValuationSpec::success_probability(), ones, 1.0);
    CHECK(sp.holds);
    CHECK(sp.f_theta_x == doctest::Approx(std::pow(1.0, 0.5) * sp.f_x));
}

TEST_CASE("weak homogeneity checker reports the violated side") {
    FunctionProperties p = properties(ValuationSpec::max());
    p.weak_hom_degree = 1.0;
    // (x1 x2)-free example: sqrt of a sum is not degree-1 homogeneous.
    const auto sq = ValuationSpec::concave_of_sum(ScalarConcave::sqrt());
    const auto r = check_weak_homogeneity(p, sq, std::vector<double>{4.0}, 0.25);
    CHECK_FALSE(r.holds);
    CHECK(r.violated == WeakHomogeneityCheck::Side::Upper);
}

TEST_CASE("success probability exceeds the degree one half bound near (1, 1)") {
    // f(x, x) = 1 - (1 - x)^2; at theta = 2/3 the ratio f(theta 1)/f(1) is 8/9 > sqrt(2/3).
    const std::vector<double> ones{1.0, 1.0};
    const auto r = check_weak_homogeneity(ValuationSpec::success_probability(), ones, 2.0 / 3.0);
    CHECK_FALSE(r.holds);
    CHECK(r.violated == WeakHomogeneityCheck::Side::Upper);
    CHECK(r.f_theta_x == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("monotone in every coordinate") {
    CounterStream s(21, 0);
    for (const auto& c : builtins()) {
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = testsupport::pick(s, 1, 6);
            auto x = draw_point(s, n, c.unit_box);
            auto y = x;
            for (auto& v : y) v = std::min(c.unit_box ? 1.0 : 1e9, v + (s.uniform() < 0.5 ? 0.0 : uniform(s, 0, 1)));
            CHECK_MESSAGE(evaluate(c.spec, x) <= evaluate(c.spec, y) + 1e-12, c.label);
        }
    }
}

TEST_CASE("subadditive where flagged, including the scaled floor") {
    CounterStream s(22, 0);
    for (const auto& c : builtins()) {
        if (!c.spec.properties().subadditive) continue;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = testsupport::pick(s, 1, 6);
            auto x = draw_point(s, n, c.unit_box);
            auto y = draw_point(s, n, c.unit_box);
            std::vector<double> sum(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (c.unit_box) y[i] = std::min(y[i], 1.0 - x[i]);
                sum[i] = x[i] + y[i];
            }
            CHECK_MESSAGE(evaluate(c.spec, sum) <= evaluate(c.spec, x) + evaluate(c.spec, y) + 1e-9, c.label);

            const double lambda = uniform(s, 0.01, 1.0);
            auto scaled = x;
            for (auto& v : scaled) v *= lambda;
            CHECK_MESSAGE(evaluate(c.spec, scaled) >= evaluate(c.spec, x) / std::ceil(1.0 / lambda) - 1e-9, c.label);
        }
    }
}

TEST_CASE("weak DR submodularity where flagged") {
    CounterStream s(23, 0);
    for (const auto& c : builtins()) {
        if (!c.spec.properties().submodular) continue;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = testsupport::pick(s, 1, 6);
            auto x = draw_point(s, n, c.unit_box);
            auto y = x;
            const std::size_t i = testsupport::pick(s, 0, n - 1);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) y[j] = std::min(c.unit_box ? 1.0 : 1e9, y[j] + uniform(s, 0.0, 1.0));
            }
            double z = uniform(s, 0.0, 1.0);
            if (c.unit_box) z = std::min(z, 1.0 - x[i]);
            auto xz = x;
            auto yz = y;
            xz[i] += z;
            yz[i] += z;
            const double gx = evaluate(c.spec, xz) - evaluate(c.spec, x);
            const double gy = evaluate(c.spec, yz) - evaluate(c.spec, y);
            CHECK_MESSAGE(gx >= gy - 1e-9, c.label);
        }
    }
}

TEST_CASE("weak homogeneity holds with declared parameters") {
    CounterStream s(24, 0);
    for (const auto& c : builtins()) {
        if (c.spec.as<valuation::SuccessProbability>()) continue;  // see the dedicated counterexample
        for (int t = 0; t < 2000; ++t) {
            const std::size_t n = testsupport::pick(s, 1, 6);
            const auto x = draw_point(s, n, c.unit_box);
            const double theta = s.uniform();
            CHECK_MESSAGE(check_weak_homogeneity(c.spec, x, theta).holds, c.label);
        }
    }
}

}  // TEST_SUITE
