#include "valsketch/scalar.hpp"

#include <cmath>
#include <limits>

#include "valsketch/error.hpp"

namespace valsketch {

ScalarMap ScalarMap::power(double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw InvalidInput("power map needs a finite exponent > 0");
    }
    return {Kind::Power, exponent};
}

ScalarMap ScalarMap::exp_saturation(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw InvalidInput("exp-saturation map needs a finite rate > 0");
    }
    return {Kind::ExpSaturation, rate};
}

double ScalarMap::operator()(double x) const {
    switch (kind_) {
        case Kind::Power:
            return param_ == 1.0 ? x : std::pow(x, param_);
        case Kind::ExpSaturation:
            return -std::expm1(-param_ * x);
    }
    return x;
}

double ScalarMap::inverse(double y) const {
    if (!(y >= 0.0)) throw InvalidInput("scalar inverse of a negative value");
    switch (kind_) {
        case Kind::Power:
            if (!std::isfinite(y)) throw InvalidInput("scalar inverse of a non-finite value");
            return param_ == 1.0 ? y : std::pow(y, 1.0 / param_);
        case Kind::ExpSaturation:
            if (!(y < 1.0)) throw InvalidInput("value outside the range [0, 1) of 1 - exp(-rate x)");
            return -std::log1p(-y) / param_;
    }
    return y;
}

double ScalarMap::range_sup() const noexcept {
    return kind_ == Kind::Power ? std::numeric_limits<double>::infinity() : 1.0;
}

ScalarChain& ScalarChain::then(ScalarMap outer) {
    if (outer.is_identity()) return *this;
    if (!maps_.empty() && maps_.back().kind() == ScalarMap::Kind::Power &&
        outer.kind() == ScalarMap::Kind::Power) {
        double fused = maps_.back().param() * outer.param();
        maps_.pop_back();
        if (std::abs(fused - 1.0) > 1e-14) maps_.push_back(ScalarMap::power(fused));
        return *this;
    }
    maps_.push_back(outer);
    return *this;
}

ScalarChain ScalarChain::compose(const ScalarChain& outer, const ScalarChain& inner) {
    ScalarChain out = inner;
    for (const auto& m : outer.maps_) out.then(m);
    return out;
}

double ScalarChain::operator()(double x) const {
    for (const auto& m : maps_) x = m(x);
    return x;
}

double ScalarChain::inverse(double y) const {
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) y = it->inverse(y);
    return y;
}

std::optional<ScalarMap> ScalarChain::as_single() const {
    if (maps_.empty()) return ScalarMap::identity();
    if (maps_.size() == 1) return maps_.front();
    return std::nullopt;
}

}  // namespace valsketch
