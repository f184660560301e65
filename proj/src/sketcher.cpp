#include "valsketch/sketcher.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "valsketch/error.hpp"

namespace valsketch {

namespace {

constexpr double kBoundaryRelTol = 1e-12;

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::size_t index_with_count(double x, double tau, double epsilon, double lower_cut, std::size_t l) {
    const double base = lower_cut * tau;
    double est = std::ceil(std::log(x / base) / -std::log1p(-epsilon));
    if (!std::isfinite(est) || est < 1.0) est = 1.0;
    auto j = static_cast<std::size_t>(std::min<double>(est, static_cast<double>(l + 1)));
    while (j > 1 && x <= bin_boundary(tau, epsilon, lower_cut, j - 1)) --j;
    while (j <= l && x > bin_boundary(tau, epsilon, lower_cut, j)) ++j;
    return j;
}

}  // namespace

void SketchParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1), got " + num(epsilon));
    if (!(lower_cut > 0.0 && lower_cut < 1.0)) {
        throw InvalidInput("lower cut a must lie in (0, 1), got " + num(lower_cut));
    }
}

std::string to_string(BoundVariant v) {
    switch (v) {
        case BoundVariant::WeakHom: return "weakhom";
        case BoundVariant::ExtendableConcave: return "concave";
        case BoundVariant::CoordinateWise: return "coordinate";
    }
    return "weakhom";
}

BoundVariant parse_bound_variant(const std::string& s) {
    if (s == "weakhom") return BoundVariant::WeakHom;
    if (s == "concave") return BoundVariant::ExtendableConcave;
    if (s == "coordinate") return BoundVariant::CoordinateWise;
    throw InvalidInput("unknown bound variant '" + s + "' (expected weakhom, concave or coordinate)");
}

std::size_t bin_count(double epsilon, double lower_cut) {
    SketchParams{epsilon, lower_cut}.validate();
    const double ratio = 1.0 - epsilon;
    const double threshold = lower_cut * (1.0 - kBoundaryRelTol);
    auto l = static_cast<long long>(std::floor(std::log(lower_cut) / std::log(ratio)));
    if (l < 0) l = 0;
    while (std::pow(ratio, static_cast<double>(l + 1)) >= threshold) ++l;
    while (l > 0 && std::pow(ratio, static_cast<double>(l)) < threshold) --l;
    return static_cast<std::size_t>(l);
}

double bin_boundary(double tau, double epsilon, double lower_cut, std::size_t j) {
    return lower_cut * tau / std::pow(1.0 - epsilon, static_cast<double>(j));
}

std::size_t bin_index(double x, double tau, double epsilon, double lower_cut) {
    SketchParams{epsilon, lower_cut}.validate();
    if (!(tau > 0.0)) throw InvalidInput("quantizer needs tau > 0");
    if (!(x > lower_cut * tau && x <= tau)) {
        throw InvalidInput("quantizer input " + num(x) + " outside (a tau, tau]");
    }
    return index_with_count(x, tau, epsilon, lower_cut, bin_count(epsilon, lower_cut));
}

double quantize(double x, double tau, double epsilon, double lower_cut) {
    return bin_boundary(tau, epsilon, lower_cut, bin_index(x, tau, epsilon, lower_cut) - 1);
}

SketchResult discretize(const ItemDistribution& dist, const ValuationSpec& spec, const SketchParams& params,
                        std::size_t coordinate) {
    params.validate();
    const double eps = params.epsilon;
    const double a = params.lower_cut;

    SketchResult out;
    out.tau = quantile(dist, 1.0 - eps);
    out.delta_at_tau = atom_mass_at(dist, out.tau);
    if (!(eps > out.delta_at_tau)) {
        throw InvalidInput("epsilon = " + num(eps) + " does not exceed the atom mass " + num(out.delta_at_tau) +
                           " at tau = " + num(out.tau));
    }
    const double tail = tail_mass(dist, out.tau);
    if (!(tail > 0.0)) throw InvalidInput("no probability mass above tau = " + num(out.tau));

    out.tail_mean = tail_value(dist, scalar_embedding(spec, coordinate), out.tau);
    if (!std::isfinite(out.tail_mean)) throw InvalidInput("tail mean H is not finite");
    out.tail_atom = scalar_inverse(spec, out.tail_mean, coordinate);
    out.bin_count = bin_count(eps, a);
    const std::size_t l = out.bin_count;

    std::vector<Atom> atoms;
    atoms.reserve(l + 3);
    atoms.push_back({0.0, cdf(dist, a * out.tau)});
    if (out.tau > 0.0) {
        const double tau = out.tau;
        auto bin_mass = [&](std::size_t j) {
            const double lower = bin_boundary(tau, eps, a, j - 1);
            const double upper = j <= l ? std::min(bin_boundary(tau, eps, a, j), tau) : tau;
            return cdf(dist, upper) - cdf(dist, lower);
        };
        auto push_bin = [&](std::size_t j) {
            const double m = bin_mass(j);
            if (m > 0.0) atoms.push_back({bin_boundary(tau, eps, a, j - 1), m});
        };
        const bool residual = bin_boundary(tau, eps, a, l) < tau;
        const std::size_t last = residual ? l + 1 : l;

        if (dist.is_atomic()) {
            // Only bins that hold an atom can carry mass.
            const DiscreteDistribution atomic = to_discrete(dist);
            std::size_t prev = 0;
            for (const auto& atom : atomic.atoms()) {
                if (atom.value <= a * tau) continue;
                if (atom.value > tau) break;
                const std::size_t j = index_with_count(atom.value, tau, eps, a, l);
                if (j != prev) push_bin(j);
                prev = j;
            }
        } else {
            for (std::size_t j = 1; j <= last; ++j) push_bin(j);
        }
    }
    atoms.push_back({out.tail_atom, tail});
    out.summary = DiscreteDistribution::from_masses(std::move(atoms));
    return out;
}

double lower_cut_for(double epsilon, double degree, double delta) {
    if (!(degree > 0.0 && degree <= 1.0)) throw InvalidInput("degree d must lie in (0, 1], got " + num(degree));
    if (!(delta >= 0.0)) throw InvalidInput("atom mass bound delta must be >= 0");
    if (!(epsilon > delta && epsilon < 1.0)) {
        throw InvalidInput("epsilon = " + num(epsilon) + " must lie in (delta, 1) = (" + num(delta) + ", 1)");
    }
    const double a = std::pow(epsilon * (epsilon - delta), 1.0 / degree);
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("derived lower cut a = " + num(a) + " is outside (0, 1)");
    return a;
}

SketchParams default_params(int k, double c, double degree, double delta) {
    if (k < 1) throw InvalidInput("k must be >= 1");
    if (!(degree > 0.0 && degree <= 1.0)) throw InvalidInput("degree d must lie in (0, 1], got " + num(degree));
    if (!(delta >= 0.0)) throw InvalidInput("atom mass bound delta must be >= 0");
    if (!(c > delta * k && c < 1.0)) {
        throw InvalidInput("c = " + num(c) + " must lie in (delta k, 1) = (" + num(delta * k) + ", 1)");
    }
    const double epsilon = c / k;
    return SketchParams{epsilon, lower_cut_for(epsilon, degree, delta)};
}

double psi(double c, double delta) { return std::exp(-c / (1.0 - c)) * (1.0 - delta); }

BoundReport approximation_factors(int k, double epsilon, double lower_cut, double delta, double degree,
                                  double tolerance, BoundVariant variant) {
    if (k < 1) throw InvalidInput("k must be >= 1");
    if (!(delta >= 0.0)) throw InvalidInput("atom mass bound delta must be >= 0");
    if (!(epsilon > delta && epsilon < 1.0)) {
        throw InvalidInput("epsilon = " + num(epsilon) + " must lie in (delta, 1) = (" + num(delta) + ", 1)");
    }
    if (!(lower_cut > 0.0 && lower_cut < 1.0)) throw InvalidInput("lower cut a must lie in (0, 1)");
    if (!(degree >= 0.0 && degree <= 1.0)) throw InvalidInput("degree d must lie in [0, 1]");
    if (!(tolerance >= 1.0)) throw InvalidInput("tolerance eta must be >= 1");

    const double kd = static_cast<double>(k);
    const double atom_factor = 1.0 - delta / epsilon;
    const double keep = 1.0 - epsilon;

    BoundReport r;
    r.variant = variant;
    r.alpha = 0.5 * std::pow(keep, kd - 1.0) * atom_factor;
    switch (variant) {
        case BoundVariant::WeakHom:
            r.beta = 2.0 * tolerance * (1.0 + std::pow(lower_cut, degree) * kd / (epsilon - delta)) /
                     (std::pow(keep, kd) * atom_factor);
            break;
        case BoundVariant::ExtendableConcave:
            r.beta = 2.0 * (1.0 + lower_cut * kd / (epsilon - delta)) / (std::pow(keep, kd) * atom_factor);
            break;
        case BoundVariant::CoordinateWise:
            r.beta = 2.0 * std::pow(tolerance, kd) * (1.0 + std::pow(lower_cut, degree) * kd / (epsilon - delta)) /
                     std::pow(keep, 2.0 * kd);
            break;
    }
    const double c = epsilon * kd;
    if (c < 1.0) r.psi = psi(c, delta * kd / c);
    return r;
}

BoundVariant select_bound_variant(const FunctionProperties& props) {
    if (props.weak_hom_degree > 0.0) return BoundVariant::WeakHom;
    if (props.extendable_concave) return BoundVariant::ExtendableConcave;
    if (props.coordinate_wise_degree && *props.coordinate_wise_degree > 0.0) return BoundVariant::CoordinateWise;
    throw InvalidInput("valuation has no positive degree, no concave extension and no coordinate-wise degree");
}

double parameter_degree(const FunctionProperties& props, BoundVariant variant) {
    switch (variant) {
        case BoundVariant::WeakHom: return props.weak_hom_degree;
        case BoundVariant::ExtendableConcave: return 1.0;
        case BoundVariant::CoordinateWise:
            if (!props.coordinate_wise_degree) throw InvalidInput("no coordinate-wise degree declared");
            return *props.coordinate_wise_degree;
    }
    return props.weak_hom_degree;
}

}  // namespace valsketch
