#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "valsketch/scalar.hpp"

namespace valsketch {

/// Structural facts about a valuation f that the approximation bounds need.
/// Weak homogeneity of degree d and tolerance eta means
///   (1/eta) theta f(x) <= f(theta x) <= theta^d f(x)  for theta in [0, 1].
struct FunctionProperties {
    bool monotone = true;
    bool subadditive = false;
    bool submodular = false;
    double weak_hom_degree = 0.0;
    double weak_hom_tolerance = 1.0;
    bool extendable_concave = false;
    std::optional<double> coordinate_wise_degree;

    /// Throws InvalidInput when the fields are mutually inconsistent.
    void validate() const;

    friend bool operator==(const FunctionProperties&, const FunctionProperties&) = default;
};

/// Concave outer function g of a sum, with its minimum elasticity
/// inf_z z g'(z) / g(z) stored analytically.
class ScalarConcave {
public:
    enum class Kind { Sqrt, Power, ExpSaturation };

    static ScalarConcave sqrt() { return {Kind::Sqrt, 0.5}; }
    static ScalarConcave power(double r);
    static ScalarConcave exp_saturation(double rate);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double param() const noexcept { return param_; }
    [[nodiscard]] double min_elasticity() const noexcept;
    [[nodiscard]] ScalarMap as_map() const;
    [[nodiscard]] double operator()(double z) const { return as_map()(z); }

    friend bool operator==(const ScalarConcave&, const ScalarConcave&) = default;

private:
    ScalarConcave(Kind kind, double param) : kind_(kind), param_(param) {}
    Kind kind_;
    double param_;
};

class ValuationSpec;

namespace valuation {

struct Max {};
struct TopH { int h; };
struct Ces { double r; };
struct PowerOfSum { double r; };
struct ConcaveOfSum { ScalarConcave g; };
struct SuccessProbability {};
/// f*(x) = base(phi_1(x_1), ..., phi_n(x_n)); a single transform is shared
/// by every coordinate.
struct Transformed {
    std::shared_ptr<const ValuationSpec> base;
    std::vector<ScalarMap> transforms;
};

}  // namespace valuation

/// Immutable description of a valuation function f : R_+^n -> R_+.
class ValuationSpec {
public:
    using Variant = std::variant<valuation::Max, valuation::TopH, valuation::Ces,
                                 valuation::PowerOfSum, valuation::ConcaveOfSum,
                                 valuation::SuccessProbability, valuation::Transformed>;

    static ValuationSpec max();
    static ValuationSpec top_h(int h);
    static ValuationSpec ces(double r);
    static ValuationSpec power_of_sum(double r);
    static ValuationSpec concave_of_sum(ScalarConcave g);
    static ValuationSpec success_probability();

    [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
    [[nodiscard]] const FunctionProperties& properties() const noexcept { return props_; }
    [[nodiscard]] std::string name() const;

    template <class T>
    [[nodiscard]] const T* as() const noexcept { return std::get_if<T>(&variant_); }

    /// True when the value does not depend on which coordinate holds which
    /// value (no per-coordinate transforms anywhere in the tree).
    [[nodiscard]] bool symmetric() const noexcept;

private:
    friend ValuationSpec apply_transform(const ValuationSpec&, std::vector<ScalarMap>,
                                         std::optional<FunctionProperties>);
    ValuationSpec(Variant v, FunctionProperties p) : variant_(std::move(v)), props_(p) {}

    Variant variant_;
    FunctionProperties props_;
};

/// f applied to the coordinate vector x (absent coordinates are 0).
/// Throws InvalidInput on negative or non-finite entries, and on entries
/// above 1 for the success-probability function.
[[nodiscard]] double evaluate(const ValuationSpec& spec, std::span<const double> x);

/// Same as evaluate without the domain checks; x must already be valid.
[[nodiscard]] double evaluate_unchecked(const ValuationSpec& spec, std::span<const double> x);

/// The single-coordinate embedding x -> f(x e_i) for coordinate i (0-based).
[[nodiscard]] ScalarChain scalar_embedding(const ValuationSpec& spec, std::size_t coordinate = 0);

/// Inverse of x -> f(x e_i). Throws InvalidInput when y is outside its range.
[[nodiscard]] double scalar_inverse(const ValuationSpec& spec, double y, std::size_t coordinate = 0);

/// Declared properties. The success-probability function reports the
/// tabulated degree 1/2; pass `dimension` = 1 to get its one-item form.
[[nodiscard]] FunctionProperties properties(const ValuationSpec& spec);
[[nodiscard]] FunctionProperties properties(const ValuationSpec& spec, std::size_t dimension);

/// Change of variables f*(x) = f(phi_1(x_1), ..., phi_n(x_n)). Identity
/// transforms return `spec` unchanged. The two composites with known
/// structure (power-of-sum with phi = z^{1/r}, success probability with
/// phi = 1 - exp(-lambda z)) carry built-in properties; any other composite
/// requires `declared`.
[[nodiscard]] ValuationSpec apply_transform(const ValuationSpec& spec, std::vector<ScalarMap> transforms,
                                            std::optional<FunctionProperties> declared = std::nullopt);

struct WeakHomogeneityCheck {
    enum class Side { None, Lower, Upper };
    bool holds = true;
    Side violated = Side::None;
    double f_x = 0.0;
    double f_theta_x = 0.0;

    explicit operator bool() const noexcept { return holds; }
};

/// Checks (1/eta) theta f(x) <= f(theta x) <= theta^d f(x) with the spec's
/// declared (d, eta) and 1e-9 absolute slack. Points with f(x) < 1e-12 are
/// not informative and pass.
[[nodiscard]] WeakHomogeneityCheck check_weak_homogeneity(const ValuationSpec& spec,
                                                          std::span<const double> x, double theta);
[[nodiscard]] WeakHomogeneityCheck check_weak_homogeneity(const FunctionProperties& props,
                                                          const ValuationSpec& spec,
                                                          std::span<const double> x, double theta);

}  // namespace valsketch
