#include "valsketch/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "valsketch/error.hpp"

namespace valsketch {

namespace {

// Cumulative masses are sums of doubles; a quantile level that matches a
// cumulative mass up to this slack counts as reached.
constexpr double kQuantileSlack = 1e-12;

template <class... Ts>
struct Overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_level(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("quantile level must lie in (0, 1), got " + num(p));
}

// E_nu(z) = int_1^inf exp(-z t) t^-nu dt for real nu > 0, z > 0.
double generalized_expint(double nu, double z) {
    if (z >= 1.0) {
        // Modified Lentz evaluation of the continued fraction.
        constexpr double tiny = 1e-300;
        double b = z + nu;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < 10000; ++i) {
            const double an = -i * (nu - 1.0 + i);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            const double del = c * d;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return h * std::exp(-z);
    }
    double base = nu - std::floor(nu);
    double e;
    if (base == 0.0) {
        base = 1.0;
        e = boost::math::expint(1, z);
    } else {
        e = std::pow(z, base - 1.0) * boost::math::tgamma(1.0 - base, z);
    }
    for (double v = base; v + 0.5 < nu; v += 1.0) e = (std::exp(-z) - z * e) / v;
    return e;
}

// exp(z) * Gamma(a, z), the upper incomplete gamma scaled to stay finite.
double scaled_upper_gamma(double a, double z) {
    if (z < 600.0) return std::exp(z) * boost::math::tgamma(a, z);
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < 30; ++i) {
        term *= (a - i) / z;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(z, a - 1.0) * sum;
}

[[noreturn]] void infinite_tail() {
    throw InvalidInput("E[f(X) | X > tau] is infinite for this distribution and valuation");
}

double exponential_tail(const Exponential& d, const ScalarMap& h, double tau) {
    const double t = std::max(tau, 0.0);
    const double mu = d.mean;
    if (h.kind() == ScalarMap::Kind::Power) {
        const double p = h.param();
        if (p == 1.0) return t + mu;  // memorylessness
        return std::pow(mu, p) * scaled_upper_gamma(p + 1.0, t / mu);
    }
    const double lambda = h.param();
    return 1.0 - std::exp(-lambda * t) / (1.0 + lambda * mu);
}

double pareto_tail(const Pareto& d, const ScalarMap& h, double tau) {
    const double t = std::max(tau, d.scale);
    const double alpha = d.shape;
    if (h.kind() == ScalarMap::Kind::Power) {
        const double p = h.param();
        if (!(alpha > p)) infinite_tail();
        return alpha * std::pow(t, p) / (alpha - p);
    }
    const double z = h.param() * t;
    if (z > 700.0) return 1.0;
    return 1.0 - alpha * generalized_expint(alpha + 1.0, z);
}

double uniform_tail(const Uniform& d, const ScalarMap& h, double tau) {
    const double t = std::max(tau, d.lo);
    const double w = d.hi - t;
    if (h.kind() == ScalarMap::Kind::Power) {
        const double p = h.param();
        if (p == 1.0) return 0.5 * (t + d.hi);
        return (std::pow(d.hi, p + 1.0) - std::pow(t, p + 1.0)) / ((p + 1.0) * w);
    }
    const double lambda = h.param();
    return 1.0 - (std::exp(-lambda * t) - std::exp(-lambda * d.hi)) / (lambda * w);
}

// inf{x : P(X > x) <= v}, the quantile expressed through the tail level.
double upper_quantile(const ItemDistribution::Variant& v, double level) {
    return std::visit(Overloaded{
        [&](const Exponential& d) { return -d.mean * std::log(level); },
        [&](const Pareto& d) { return d.scale * std::pow(level, -1.0 / d.shape); },
        [&](const Uniform& d) { return d.hi - level * (d.hi - d.lo); },
        [&](const auto&) -> double { throw InvalidInput("upper quantile is for parametric laws"); },
    }, v);
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidInput("discrete distribution needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& a = atoms_[i];
        if (!std::isfinite(a.value) || a.value < 0.0) {
            throw InvalidInput("atom values must be finite and >= 0, got " + num(a.value));
        }
        if (!(a.prob > 0.0 && a.prob <= 1.0 + 1e-12)) {
            throw InvalidInput("atom masses must lie in (0, 1], got " + num(a.prob));
        }
        if (i > 0 && !(atoms_[i - 1].value < a.value)) {
            throw InvalidInput("atom values must be strictly ascending");
        }
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("atom masses sum to " + num(total) + ", not 1");
    cum_.assign(atoms_.size() + 1, 0.0);
    tail_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) cum_[i + 1] = cum_[i] + atoms_[i].prob;
    for (std::size_t i = atoms_.size(); i-- > 0;) tail_[i] = tail_[i + 1] + atoms_[i].prob;
}

DiscreteDistribution DiscreteDistribution::from_masses(std::vector<Atom> atoms) {
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!(a.prob > 0.0)) continue;
        if (!merged.empty() && merged.back().value == a.value) {
            merged.back().prob += a.prob;
        } else {
            merged.push_back(a);
        }
    }
    return DiscreteDistribution(std::move(merged));
}

double DiscreteDistribution::cdf(double x) const {
    auto count = static_cast<std::size_t>(
        std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.value; }) -
        atoms_.begin());
    return std::min(1.0, cum_[count]);
}

double DiscreteDistribution::tail_mass(double x) const {
    auto count = static_cast<std::size_t>(
        std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.value; }) -
        atoms_.begin());
    return std::min(1.0, tail_[count]);
}

double DiscreteDistribution::quantile(double p) const {
    require_level(p);
    auto it = std::lower_bound(cum_.begin() + 1, cum_.end(), p - kQuantileSlack);
    auto idx = static_cast<std::size_t>(it - cum_.begin());
    return atoms_[std::min(idx, atoms_.size()) - 1].value;
}

double DiscreteDistribution::atom_mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.value < v; });
    return (it != atoms_.end() && it->value == x) ? it->prob : 0.0;
}

double DiscreteDistribution::max_atom_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, a.prob);
    return m;
}

double DiscreteDistribution::mean() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.value * a.prob;
    return s;
}

Empirical::Empirical(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw InvalidInput("empirical distribution needs at least one sample");
    for (double v : sorted_) {
        if (!std::isfinite(v) || v < 0.0) throw InvalidInput("samples must be finite and >= 0, got " + num(v));
    }
    std::sort(sorted_.begin(), sorted_.end());
}

ItemDistribution ItemDistribution::exponential(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw InvalidInput("exponential mean must be > 0");
    return ItemDistribution(Exponential{mean});
}

ItemDistribution ItemDistribution::pareto(double shape, double scale) {
    if (!(shape > 1.0) || !std::isfinite(shape)) throw InvalidInput("Pareto shape must be > 1 for a finite mean");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("Pareto scale must be > 0");
    return ItemDistribution(Pareto{shape, scale});
}

ItemDistribution ItemDistribution::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) throw InvalidInput("uniform needs 0 <= lo < hi");
    return ItemDistribution(Uniform{lo, hi});
}

ItemDistribution from_samples(std::vector<double> values) {
    return ItemDistribution(Empirical(std::move(values)));
}

double cdf(const ItemDistribution& dist, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(Overloaded{
        [&](const Exponential& d) { return -std::expm1(-x / d.mean); },
        [&](const Pareto& d) { return x < d.scale ? 0.0 : 1.0 - std::pow(d.scale / x, d.shape); },
        [&](const Uniform& d) { return std::clamp((x - d.lo) / (d.hi - d.lo), 0.0, 1.0); },
        [&](const Empirical& e) {
            auto s = e.samples();
            auto count = std::upper_bound(s.begin(), s.end(), x) - s.begin();
            return static_cast<double>(count) / static_cast<double>(s.size());
        },
        [&](const DiscreteDistribution& d) { return d.cdf(x); },
    }, dist.variant());
}

double tail_mass(const ItemDistribution& dist, double x) {
    if (x < 0.0) return 1.0;
    return std::visit(Overloaded{
        [&](const Exponential& d) { return std::exp(-x / d.mean); },
        [&](const Pareto& d) { return x < d.scale ? 1.0 : std::pow(d.scale / x, d.shape); },
        [&](const Uniform& d) { return std::clamp((d.hi - x) / (d.hi - d.lo), 0.0, 1.0); },
        [&](const Empirical& e) {
            auto s = e.samples();
            auto above = s.end() - std::upper_bound(s.begin(), s.end(), x);
            return static_cast<double>(above) / static_cast<double>(s.size());
        },
        [&](const DiscreteDistribution& d) { return d.tail_mass(x); },
    }, dist.variant());
}

double quantile(const ItemDistribution& dist, double p) {
    require_level(p);
    return std::visit(Overloaded{
        [&](const Exponential& d) { return -d.mean * std::log1p(-p); },
        [&](const Pareto& d) { return d.scale * std::pow(1.0 - p, -1.0 / d.shape); },
        [&](const Uniform& d) { return d.lo + p * (d.hi - d.lo); },
        [&](const Empirical& e) {
            auto s = e.samples();
            const double n = static_cast<double>(s.size());
            auto j = static_cast<std::size_t>(std::ceil((p - kQuantileSlack) * n));
            j = std::clamp<std::size_t>(j, 1, s.size());
            return s[j - 1];
        },
        [&](const DiscreteDistribution& d) { return d.quantile(p); },
    }, dist.variant());
}

double atom_mass_at(const ItemDistribution& dist, double x) {
    return std::visit(Overloaded{
        [&](const Empirical& e) {
            auto s = e.samples();
            auto [lo, hi] = std::equal_range(s.begin(), s.end(), x);
            return static_cast<double>(hi - lo) / static_cast<double>(s.size());
        },
        [&](const DiscreteDistribution& d) { return d.atom_mass_at(x); },
        [&](const auto&) { return 0.0; },
    }, dist.variant());
}

double max_atom_mass(const ItemDistribution& dist) {
    return std::visit(Overloaded{
        [&](const Empirical& e) {
            auto s = e.samples();
            std::size_t best = 0, run = 0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
                best = std::max(best, run);
            }
            return static_cast<double>(best) / static_cast<double>(s.size());
        },
        [&](const DiscreteDistribution& d) { return d.max_atom_mass(); },
        [&](const auto&) { return 0.0; },
    }, dist.variant());
}

double tail_value(const ItemDistribution& dist, const ScalarChain& h, double tau) {
    const double mass = tail_mass(dist, tau);
    if (!(mass > 0.0)) throw InvalidInput("no probability mass above tau = " + num(tau));

    if (const auto* e = dist.as<Empirical>()) {
        auto s = e->samples();
        auto first = std::upper_bound(s.begin(), s.end(), tau);
        double sum = 0.0;
        for (auto it = first; it != s.end(); ++it) sum += h(*it);
        return sum / static_cast<double>(s.end() - first);
    }
    if (const auto* d = dist.as<DiscreteDistribution>()) {
        double num_sum = 0.0, den = 0.0;
        for (const auto& a : d->atoms()) {
            if (a.value > tau) {
                num_sum += a.prob * h(a.value);
                den += a.prob;
            }
        }
        return num_sum / den;
    }

    if (auto single = h.as_single()) {
        return std::visit(Overloaded{
            [&](const Exponential& d) { return exponential_tail(d, *single, tau); },
            [&](const Pareto& d) { return pareto_tail(d, *single, tau); },
            [&](const Uniform& d) { return uniform_tail(d, *single, tau); },
            [&](const auto&) -> double { throw InvalidInput("unreachable distribution kind"); },
        }, dist.variant());
    }

    // Composite maps have no closed form here; integrate over the tail level.
    boost::math::quadrature::tanh_sinh<double> integrator;
    double result = std::numeric_limits<double>::quiet_NaN();
    try {
        result = integrator.integrate([&](double v) { return h(upper_quantile(dist.variant(), v)); }, 0.0, mass);
    } catch (const std::exception&) {
        infinite_tail();
    }
    result /= mass;
    if (!std::isfinite(result)) infinite_tail();
    return result;
}

double sample_at(const ItemDistribution& dist, double u) {
    if (const auto* d = dist.as<DiscreteDistribution>()) {
        auto atoms = d->atoms();
        double cum = 0.0;
        // Linear scan is fine for small supports; fall back to the quantile otherwise.
        if (atoms.size() <= 8) {
            for (const auto& a : atoms) {
                cum += a.prob;
                if (u <= cum) return a.value;
            }
            return atoms.back().value;
        }
    }
    return quantile(dist, u);
}

double sample(const ItemDistribution& dist, CounterStream& rng) { return sample_at(dist, rng.uniform()); }

DiscreteDistribution map_values(const DiscreteDistribution& dist, const ScalarChain& h) {
    std::vector<Atom> mapped;
    mapped.reserve(dist.size());
    for (const auto& a : dist.atoms()) mapped.push_back({h(a.value), a.prob});
    return DiscreteDistribution::from_masses(std::move(mapped));
}

ItemDistribution map_values(const ItemDistribution& dist, const ScalarChain& h) {
    if (const auto* e = dist.as<Empirical>()) {
        std::vector<double> mapped(e->samples().begin(), e->samples().end());
        for (double& v : mapped) v = h(v);
        return from_samples(std::move(mapped));
    }
    if (const auto* d = dist.as<DiscreteDistribution>()) return ItemDistribution::discrete(map_values(*d, h));
    throw InvalidInput("change of variables is supported for empirical and discrete laws");
}

DiscreteDistribution to_discrete(const ItemDistribution& dist) {
    if (const auto* d = dist.as<DiscreteDistribution>()) return *d;
    if (const auto* e = dist.as<Empirical>()) {
        std::vector<Atom> atoms;
        const double w = 1.0 / static_cast<double>(e->size());
        for (double v : e->samples()) {
            if (!atoms.empty() && atoms.back().value == v) {
                atoms.back().prob += w;
            } else {
                atoms.push_back({v, w});
            }
        }
        return DiscreteDistribution(std::move(atoms));
    }
    throw InvalidInput("only empirical and discrete laws have a finite atom list");
}

}  // namespace valsketch
