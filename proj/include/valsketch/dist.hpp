#pragma once

#include <span>
#include <variant>
#include <vector>

#include "valsketch/rng.hpp"
#include "valsketch/scalar.hpp"

namespace valsketch {

struct Atom {
    double value;
    double prob;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite distribution on R_+: strictly ascending values, positive masses
/// summing to 1 within 1e-9.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    /// Validates the invariants as given; throws InvalidInput otherwise.
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    /// Sorts, merges atoms whose values are equal, and drops zero masses.
    static DiscreteDistribution from_masses(std::vector<Atom> atoms);
    static DiscreteDistribution point_mass(double value) { return DiscreteDistribution({{value, 1.0}}); }

    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }

    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] double tail_mass(double x) const;
    [[nodiscard]] double quantile(double p) const;
    [[nodiscard]] double atom_mass_at(double x) const;
    [[nodiscard]] double max_atom_mass() const;
    [[nodiscard]] double mean() const;

    friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
        return a.atoms_ == b.atoms_;
    }

private:
    std::vector<Atom> atoms_;
    std::vector<double> cum_;   // P(X <= atoms_[i].value)
    std::vector<double> tail_;  // P(X > atoms_[i].value)
};

/// P(X > x) = exp(-x / mean).
struct Exponential { double mean; };
/// P(X > x) = (scale / x)^shape for x >= scale; shape > 1.
struct Pareto { double shape; double scale; };
struct Uniform { double lo; double hi; };

/// Empirical law of a sample; ties are kept, so atoms carry multiplicity / N.
class Empirical {
public:
    explicit Empirical(std::vector<double> samples);
    [[nodiscard]] std::span<const double> samples() const noexcept { return sorted_; }
    [[nodiscard]] std::size_t size() const noexcept { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

/// An item's value law.
class ItemDistribution {
public:
    using Variant = std::variant<Exponential, Pareto, Uniform, Empirical, DiscreteDistribution>;

    static ItemDistribution exponential(double mean);
    static ItemDistribution pareto(double shape, double scale);
    static ItemDistribution uniform(double lo, double hi);
    static ItemDistribution discrete(DiscreteDistribution d) { return ItemDistribution(std::move(d)); }

    [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
    template <class T>
    [[nodiscard]] const T* as() const noexcept { return std::get_if<T>(&variant_); }

    /// Empirical and discrete laws.
    [[nodiscard]] bool is_atomic() const noexcept {
        return as<Empirical>() != nullptr || as<DiscreteDistribution>() != nullptr;
    }

private:
    friend ItemDistribution from_samples(std::vector<double> values);
    explicit ItemDistribution(Variant v) : variant_(std::move(v)) {}
    Variant variant_;
};

[[nodiscard]] ItemDistribution from_samples(std::vector<double> values);

[[nodiscard]] double cdf(const ItemDistribution& dist, double x);
/// P(X > x), computed without cancellation where possible.
[[nodiscard]] double tail_mass(const ItemDistribution& dist, double x);
/// Generalized inverse inf{x : cdf(x) >= p} for p in (0, 1).
[[nodiscard]] double quantile(const ItemDistribution& dist, double p);
[[nodiscard]] double atom_mass_at(const ItemDistribution& dist, double x);
[[nodiscard]] double max_atom_mass(const ItemDistribution& dist);

/// E[h(X) | X > tau] for monotone increasing h. Closed forms cover single
/// power and exp-saturation maps for the parametric laws; atomic laws are
/// summed exactly. Throws InvalidInput on zero tail mass or an infinite
/// conditional expectation.
[[nodiscard]] double tail_value(const ItemDistribution& dist, const ScalarChain& h, double tau);

/// One inverse-transform draw.
[[nodiscard]] double sample(const ItemDistribution& dist, CounterStream& rng);
[[nodiscard]] double sample_at(const ItemDistribution& dist, double u);

/// Pushes the law through a strictly increasing map (atomic laws only).
[[nodiscard]] ItemDistribution map_values(const ItemDistribution& dist, const ScalarChain& h);
[[nodiscard]] DiscreteDistribution map_values(const DiscreteDistribution& dist, const ScalarChain& h);

/// The law as an atom list (atomic laws only).
[[nodiscard]] DiscreteDistribution to_discrete(const ItemDistribution& dist);

}  // namespace valsketch
