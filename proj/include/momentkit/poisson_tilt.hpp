#pragma once

// Exponentially tilted Poisson moments.  For N ~ Poisson(rate):
//   m0 = E[e^{zN}]     = exp(rate * (e^z - 1))
//   m1 = E[N e^{zN}]   = rate e^z * m0
//   m2 = E[N^2 e^{zN}] = ((rate e^z)^2 + rate e^z) * m0
// The Poisson MGF is entire, so there is no domain restriction; results that
// would overflow a double are reported as RangeError instead of returning inf.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "momentkit/ig_mgf.hpp"

namespace momentkit {

struct TiltArgument {
    double z = 0.0;     // tilt exponent
    double rate = 0.0;  // Poisson mean

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("TiltArgument: rate must be positive");
        if (!std::isfinite(z)) throw std::invalid_argument("TiltArgument: z must be finite");
    }
};

namespace detail {

// log(DBL_MAX) with a small safety margin.
inline constexpr double kMaxExp = 709.0;

inline void check_tilt_magnitude(double log_value, const char* fn) {
    if (log_value > kMaxExp)
        throw RangeError(std::string(fn) + ": result exceeds double range");
}

}  // namespace detail

inline double poisson_tilt_m0(const TiltArgument& arg) {
    arg.validate();
    const double e = arg.rate * std::expm1(arg.z);
    detail::check_tilt_magnitude(e, "poisson_tilt_m0");
    return std::exp(e);
}

inline double poisson_tilt_m1(const TiltArgument& arg) {
    arg.validate();
    const double e = arg.rate * std::expm1(arg.z);
    detail::check_tilt_magnitude(std::log(arg.rate) + arg.z + e, "poisson_tilt_m1");
    return arg.rate * std::exp(arg.z) * std::exp(e);
}

inline double poisson_tilt_m2(const TiltArgument& arg) {
    arg.validate();
    const double e = arg.rate * std::expm1(arg.z);
    const double lw = std::log(arg.rate) + arg.z;  // log(rate e^z)
    detail::check_tilt_magnitude(2.0 * lw + e, "poisson_tilt_m2");
    detail::check_tilt_magnitude(lw + e, "poisson_tilt_m2");
    const double w = arg.rate * std::exp(arg.z);
    return (w * w + w) * std::exp(e);
}

}  // namespace momentkit
