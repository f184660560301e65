#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace valsketch {

/// A continuous, strictly increasing map of the half line with map(0) = 0.
/// Used both as a univariate change of variables and as the building block
/// of a valuation's single-coordinate embedding x -> f(x e_1).
class ScalarMap {
public:
    enum class Kind { Power, ExpSaturation };

    /// x -> x^exponent, exponent > 0.
    static ScalarMap power(double exponent);
    /// x -> 1 - exp(-rate x), rate > 0.
    static ScalarMap exp_saturation(double rate);
    static ScalarMap identity() { return power(1.0); }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double param() const noexcept { return param_; }
    [[nodiscard]] bool is_identity() const noexcept {
        return kind_ == Kind::Power && param_ == 1.0;
    }

    [[nodiscard]] double operator()(double x) const;
    /// Inverse on the map's range; throws InvalidInput outside it.
    [[nodiscard]] double inverse(double y) const;
    /// Supremum of the range (infinity for powers, 1 for saturations).
    [[nodiscard]] double range_sup() const noexcept;

    friend bool operator==(const ScalarMap&, const ScalarMap&) = default;

private:
    ScalarMap(Kind kind, double param) : kind_(kind), param_(param) {}
    Kind kind_;
    double param_;
};

/// Composition h = maps[n-1] o ... o maps[0], kept in a simplified normal
/// form: identities dropped, adjacent powers fused.
class ScalarChain {
public:
    ScalarChain() = default;
    explicit ScalarChain(ScalarMap m) { then(m); }

    /// Returns the chain followed by `outer`, i.e. outer o (*this).
    ScalarChain& then(ScalarMap outer);
    /// Returns outer o inner.
    static ScalarChain compose(const ScalarChain& outer, const ScalarChain& inner);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double inverse(double y) const;

    [[nodiscard]] std::span<const ScalarMap> maps() const noexcept { return maps_; }
    [[nodiscard]] bool is_identity() const noexcept { return maps_.empty(); }
    /// The chain as one elementary map when it has that form.
    [[nodiscard]] std::optional<ScalarMap> as_single() const;

private:
    std::vector<ScalarMap> maps_;
};

}  // namespace valsketch
