#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "valsketch/dist.hpp"
#include "valsketch/valuation.hpp"

namespace valsketch {

/// Discretization parameters: the quantile level epsilon of the tail cut
/// and the lower cut fraction a of tau.
struct SketchParams {
    double epsilon;
    double lower_cut;

    void validate() const;
};

/// Output of `discretize` for one item.
struct SketchResult {
    DiscreteDistribution summary;
    double tau = 0.0;          ///< (1 - epsilon)-quantile
    double tail_mean = 0.0;    ///< H = E[f(X e_1) | X > tau]
    double tail_atom = 0.0;    ///< f^{-1}(H)
    std::size_t bin_count = 0; ///< l = floor(log_{1/(1-epsilon)}(1/a))
    double delta_at_tau = 0.0; ///< P(X = tau)
};

/// Which family of factors applies.
enum class BoundVariant { WeakHom, ExtendableConcave, CoordinateWise };

/// Multiplicative guarantee alpha v(S) <= u(S) <= beta v(S) for |S| <= k.
struct BoundReport {
    double alpha = 0.0;
    double beta = 0.0;
    BoundVariant variant = BoundVariant::WeakHom;
    std::optional<double> psi;
};

[[nodiscard]] std::string to_string(BoundVariant v);
[[nodiscard]] BoundVariant parse_bound_variant(const std::string& s);

/// l: the largest integer j with j <= log_{1/(1-epsilon)}(1/a).
[[nodiscard]] std::size_t bin_count(double epsilon, double lower_cut);

/// Upper boundary a tau / (1-epsilon)^j of bin j; boundary 0 is a tau.
[[nodiscard]] double bin_boundary(double tau, double epsilon, double lower_cut, std::size_t j);

/// Index j in [1, l+1] of the bin holding x in (a tau, tau]; index l+1 is
/// the residual bin (a tau/(1-epsilon)^l, tau] when that interval is non-empty.
[[nodiscard]] std::size_t bin_index(double x, double tau, double epsilon, double lower_cut);

/// Lower boundary of x's bin. Satisfies (1-epsilon) x <= quantize(x) <= x.
/// Throws InvalidInput for x outside (a tau, tau].
[[nodiscard]] double quantize(double x, double tau, double epsilon, double lower_cut);

/// Per-item discretization: tail collapsed to one atom at f^{-1}(H), values
/// at or below a tau sent to 0, the middle exponentially binned.
/// `coordinate` selects the item's coordinate for per-coordinate transforms.
/// Throws InvalidInput when epsilon <= P(X = tau), when nothing lies above
/// tau, or when H is infinite.
[[nodiscard]] SketchResult discretize(const ItemDistribution& dist, const ValuationSpec& spec,
                                      const SketchParams& params, std::size_t coordinate = 0);

/// a = [epsilon (epsilon - delta)]^{1/d}; needs delta < epsilon < 1.
[[nodiscard]] double lower_cut_for(double epsilon, double degree, double delta);

/// epsilon = c / k and a = [epsilon (epsilon - delta)]^{1/d}; needs
/// delta k < c < 1 and d in (0, 1].
[[nodiscard]] SketchParams default_params(int k, double c, double degree, double delta);

/// psi(c, delta) = exp(-c / (1 - c)) (1 - delta).
[[nodiscard]] double psi(double c, double delta);

[[nodiscard]] BoundReport approximation_factors(int k, double epsilon, double lower_cut, double delta,
                                                double degree, double tolerance, BoundVariant variant);

/// Picks the bound whose hypotheses the declared properties satisfy:
/// positive degree first, then extendable concavity, then coordinate-wise.
[[nodiscard]] BoundVariant select_bound_variant(const FunctionProperties& props);

/// Degree to use in default_params for the selected variant (extendable
/// concave functions use a = epsilon (epsilon - delta), i.e. degree 1).
[[nodiscard]] double parameter_degree(const FunctionProperties& props, BoundVariant variant);

}  // namespace valsketch
