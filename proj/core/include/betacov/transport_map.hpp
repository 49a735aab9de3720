#pragma once

#include <functional>

namespace betacov {

/// A strictly increasing map of [0,1] onto itself, with its inverse.
///
/// `inverse_derivative`, when set, is d/dz inverse(z); pushforward densities
/// need it, distances never do.
struct TransportMap {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    std::function<double(double)> inverse_derivative;

    double operator()(double u) const { return forward(u); }

    static TransportMap identity() {
        return {[](double u) { return u; }, [](double z) { return z; }, [](double) { return 1.0; }};
    }
};

} // namespace betacov
