#include "valsketch/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "valsketch/error.hpp"

namespace valsketch {

namespace {

constexpr double kSlack = 1e-9;
constexpr double kInformativeFloor = 1e-12;

FunctionProperties table_row(double degree, bool extendable = false) {
    FunctionProperties p;
    p.monotone = true;
    p.subadditive = true;
    p.submodular = true;
    p.weak_hom_degree = degree;
    p.weak_hom_tolerance = 1.0;
    p.extendable_concave = extendable;
    return p;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

const ScalarMap& transform_for(const valuation::Transformed& t, std::size_t coordinate) {
    return t.transforms.size() == 1 ? t.transforms.front() : t.transforms.at(coordinate);
}

bool all_same(const std::vector<ScalarMap>& maps) {
    return std::all_of(maps.begin(), maps.end(), [&](const ScalarMap& m) { return m == maps.front(); });
}

double eval_impl(const ValuationSpec& spec, std::span<const double> x, bool checked);

struct EvalVisitor {
    std::span<const double> x;
    bool checked;

    double operator()(const valuation::Max&) const {
        double m = 0.0;
        for (double v : x) m = std::max(m, v);
        return m;
    }
    double operator()(const valuation::TopH& t) const {
        std::vector<double> buf(x.begin(), x.end());
        auto h = std::min<std::size_t>(static_cast<std::size_t>(t.h), buf.size());
        std::partial_sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(h), buf.end(),
                          std::greater<>());
        return std::accumulate(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(h), 0.0);
    }
    double operator()(const valuation::Ces& c) const {
        if (c.r == 1.0) return std::accumulate(x.begin(), x.end(), 0.0);
        double s = 0.0;
        if (c.r == 2.0) {
            for (double v : x) s += v * v;
            return std::sqrt(s);
        }
        for (double v : x) s += std::pow(v, c.r);
        return std::pow(s, 1.0 / c.r);
    }
    double operator()(const valuation::PowerOfSum& p) const {
        double s = std::accumulate(x.begin(), x.end(), 0.0);
        return p.r == 1.0 ? s : std::pow(s, p.r);
    }
    double operator()(const valuation::ConcaveOfSum& c) const {
        return c.g(std::accumulate(x.begin(), x.end(), 0.0));
    }
    double operator()(const valuation::SuccessProbability&) const {
        double miss = 1.0;
        for (double v : x) {
            if (checked && v > 1.0) {
                throw InvalidInput("success probability accepts coordinates in [0, 1], got " + fmt_num(v));
            }
            miss *= 1.0 - v;
        }
        return 1.0 - miss;
    }
    double operator()(const valuation::Transformed& t) const {
        if (t.transforms.size() > 1 && x.size() > t.transforms.size()) {
            throw InvalidInput("more coordinates than per-coordinate transforms");
        }
        std::vector<double> mapped(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) mapped[i] = transform_for(t, i)(x[i]);
        return eval_impl(*t.base, mapped, checked);
    }
};

double eval_impl(const ValuationSpec& spec, std::span<const double> x, bool checked) {
    return std::visit(EvalVisitor{x, checked}, spec.variant());
}

}  // namespace

void FunctionProperties::validate() const {
    if (!(weak_hom_degree >= 0.0 && weak_hom_degree <= 1.0)) {
        throw InvalidInput("weak homogeneity degree must lie in [0, 1]");
    }
    if (!(weak_hom_tolerance >= 1.0) || !std::isfinite(weak_hom_tolerance)) {
        throw InvalidInput("weak homogeneity tolerance must be finite and >= 1");
    }
    if (extendable_concave && !(monotone && subadditive)) {
        throw InvalidInput("an extendable concave function must be monotone and subadditive");
    }
    if (coordinate_wise_degree && !(*coordinate_wise_degree >= 0.0 && *coordinate_wise_degree <= 1.0)) {
        throw InvalidInput("coordinate-wise degree must lie in [0, 1]");
    }
}

ScalarConcave ScalarConcave::power(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidInput("concave power needs r in (0, 1]");
    return {Kind::Power, r};
}

ScalarConcave ScalarConcave::exp_saturation(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidInput("exp saturation needs rate > 0");
    return {Kind::ExpSaturation, rate};
}

double ScalarConcave::min_elasticity() const noexcept {
    switch (kind_) {
        case Kind::Sqrt: return 0.5;
        case Kind::Power: return param_;
        // z g'(z) / g(z) falls from 1 at 0 towards 0 as z grows.
        case Kind::ExpSaturation: return 0.0;
    }
    return 0.0;
}

ScalarMap ScalarConcave::as_map() const {
    switch (kind_) {
        case Kind::Sqrt: return ScalarMap::power(0.5);
        case Kind::Power: return ScalarMap::power(param_);
        case Kind::ExpSaturation: return ScalarMap::exp_saturation(param_);
    }
    return ScalarMap::identity();
}

ValuationSpec ValuationSpec::max() { return {valuation::Max{}, table_row(1.0)}; }

ValuationSpec ValuationSpec::top_h(int h) {
    if (h < 1) throw InvalidInput("top-h valuation needs h >= 1");
    return {valuation::TopH{h}, table_row(1.0)};
}

ValuationSpec ValuationSpec::ces(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidInput("CES valuation needs r >= 1");
    return {valuation::Ces{r}, table_row(1.0)};
}

ValuationSpec ValuationSpec::power_of_sum(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidInput("power-of-sum valuation needs r in (0, 1]");
    return {valuation::PowerOfSum{r}, table_row(r, r == 1.0)};
}

ValuationSpec ValuationSpec::concave_of_sum(ScalarConcave g) {
    bool extendable = g.kind() == ScalarConcave::Kind::ExpSaturation ||
                      (g.kind() == ScalarConcave::Kind::Power && g.param() == 1.0);
    return {valuation::ConcaveOfSum{g}, table_row(g.min_elasticity(), extendable)};
}

ValuationSpec ValuationSpec::success_probability() {
    return {valuation::SuccessProbability{}, table_row(0.5)};
}

std::string ValuationSpec::name() const {
    struct Namer {
        std::string operator()(const valuation::Max&) const { return "max"; }
        std::string operator()(const valuation::TopH& t) const { return "top_h(h=" + std::to_string(t.h) + ")"; }
        std::string operator()(const valuation::Ces& c) const { return "ces(r=" + fmt_num(c.r) + ")"; }
        std::string operator()(const valuation::PowerOfSum& p) const {
            return "power_of_sum(r=" + fmt_num(p.r) + ")";
        }
        std::string operator()(const valuation::ConcaveOfSum& c) const {
            switch (c.g.kind()) {
                case ScalarConcave::Kind::Sqrt: return "concave_of_sum(sqrt)";
                case ScalarConcave::Kind::Power: return "concave_of_sum(power r=" + fmt_num(c.g.param()) + ")";
                case ScalarConcave::Kind::ExpSaturation:
                    return "concave_of_sum(exp_saturation lambda=" + fmt_num(c.g.param()) + ")";
            }
            return "concave_of_sum";
        }
        std::string operator()(const valuation::SuccessProbability&) const { return "success_probability"; }
        std::string operator()(const valuation::Transformed& t) const {
            return "transformed(" + t.base->name() + ")";
        }
    };
    return std::visit(Namer{}, variant_);
}

bool ValuationSpec::symmetric() const noexcept {
    if (const auto* t = as<valuation::Transformed>()) return all_same(t->transforms) && t->base->symmetric();
    return true;
}

double evaluate(const ValuationSpec& spec, std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidInput("valuation inputs must be finite and >= 0, got " + fmt_num(v));
        }
    }
    return eval_impl(spec, x, true);
}

double evaluate_unchecked(const ValuationSpec& spec, std::span<const double> x) {
    return eval_impl(spec, x, false);
}

ScalarChain scalar_embedding(const ValuationSpec& spec, std::size_t coordinate) {
    if (const auto* p = spec.as<valuation::PowerOfSum>()) return ScalarChain(ScalarMap::power(p->r));
    if (const auto* c = spec.as<valuation::ConcaveOfSum>()) return ScalarChain(c->g.as_map());
    if (const auto* t = spec.as<valuation::Transformed>()) {
        return ScalarChain::compose(scalar_embedding(*t->base, coordinate),
                                    ScalarChain(transform_for(*t, coordinate)));
    }
    return {};
}

double scalar_inverse(const ValuationSpec& spec, double y, std::size_t coordinate) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw InvalidInput("scalar inverse needs a finite y >= 0");
    if (spec.as<valuation::SuccessProbability>()) {
        if (y > 1.0) throw InvalidInput("success probability has scalar range [0, 1], got " + fmt_num(y));
        return y;
    }
    if (const auto* t = spec.as<valuation::Transformed>()) {
        return transform_for(*t, coordinate).inverse(scalar_inverse(*t->base, y, coordinate));
    }
    return scalar_embedding(spec, coordinate).inverse(y);
}

FunctionProperties properties(const ValuationSpec& spec) { return spec.properties(); }

FunctionProperties properties(const ValuationSpec& spec, std::size_t dimension) {
    auto p = spec.properties();
    // With one coordinate the success probability is the identity.
    if (dimension <= 1 && spec.as<valuation::SuccessProbability>()) p.weak_hom_degree = 1.0;
    return p;
}

ValuationSpec apply_transform(const ValuationSpec& spec, std::vector<ScalarMap> transforms,
                              std::optional<FunctionProperties> declared) {
    if (transforms.empty()) throw InvalidInput("apply_transform needs at least one transform");
    bool identity = std::all_of(transforms.begin(), transforms.end(),
                                [](const ScalarMap& m) { return m.is_identity(); });
    if (identity) return spec;
    if (all_same(transforms)) transforms.erase(transforms.begin() + 1, transforms.end());

    std::optional<FunctionProperties> props = declared;
    if (!props && transforms.size() == 1) {
        const ScalarMap& phi = transforms.front();
        const auto* pos = spec.as<valuation::PowerOfSum>();
        if (pos && phi.kind() == ScalarMap::Kind::Power && std::abs(phi.param() * pos->r - 1.0) < 1e-12) {
            // (sum x_i^{1/r})^r: a CES aggregate, homogeneous of degree 1.
            props = table_row(1.0);
        } else if (spec.as<valuation::SuccessProbability>() && phi.kind() == ScalarMap::Kind::ExpSaturation) {
            // 1 - exp(-lambda sum x_i).
            props = ValuationSpec::concave_of_sum(ScalarConcave::exp_saturation(phi.param())).properties();
        }
    }
    if (!props) {
        throw InvalidInput("properties of this transformed valuation are not built in; declare them explicitly");
    }
    props->validate();
    return ValuationSpec(valuation::Transformed{std::make_shared<const ValuationSpec>(spec), std::move(transforms)},
                         *props);
}

WeakHomogeneityCheck check_weak_homogeneity(const FunctionProperties& props, const ValuationSpec& spec,
                                            std::span<const double> x, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidInput("theta must lie in [0, 1]");
    WeakHomogeneityCheck out;
    out.f_x = evaluate(spec, x);
    std::vector<double> scaled(x.begin(), x.end());
    for (double& v : scaled) v *= theta;
    out.f_theta_x = evaluate(spec, scaled);
    if (out.f_x < kInformativeFloor) return out;
    const double lower = theta * out.f_x / props.weak_hom_tolerance;
    const double upper = std::pow(theta, props.weak_hom_degree) * out.f_x;
    if (out.f_theta_x < lower - kSlack) {
        out.holds = false;
        out.violated = WeakHomogeneityCheck::Side::Lower;
    } else if (out.f_theta_x > upper + kSlack) {
        out.holds = false;
        out.violated = WeakHomogeneityCheck::Side::Upper;
    }
    return out;
}

WeakHomogeneityCheck check_weak_homogeneity(const ValuationSpec& spec, std::span<const double> x, double theta) {
    return check_weak_homogeneity(properties(spec, x.size()), spec, x, theta);
}

}  // namespace valsketch
