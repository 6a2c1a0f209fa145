#pragma once

// Inverse-Gaussian moment generating function and its first two derivatives.
//
// For R ~ IG(mean mu, variance b) the MGF is
//   M(z)  = exp( (mu^2/b) * (1 - sqrt(1 - 2 b z / mu)) ),
// finite iff z <= mu/(2b).  The derivatives (E[R e^{zR}], E[R^2 e^{zR}]) need
// the strict interior of that domain:
//   M'(z) = M(z) * mu * s^{-1/2}
//   M''(z)= M'(z) * ( mu * s^{-1/2} + (b/mu) * s^{-1} ),   s = 1 - 2 b z / mu.
// A variance below kDegenerateB selects the point-mass limit R == mu, giving
// M(z) = e^{mu z} and derivatives mu e^{mu z}, mu^2 e^{mu z}.

#include <cmath>
#include <stdexcept>
#include <string>

namespace momentkit {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct RangeError : std::range_error {
    using std::range_error::range_error;
};

// Variance threshold below which a random effect is treated as degenerate
// (the analytic b -> 0 limit); avoids catastrophic cancellation in
// (1 - sqrt(1 - 2bz))/b for tiny b.
inline constexpr double kDegenerateB = 1e-12;

struct IgSpec {
    double mean = 1.0;  // E[R]; the model fixes this to 1
    double b = 0.0;     // var[R]

    bool degenerate() const { return b < kDegenerateB; }

    void validate() const {
        if (!(mean > 0.0)) throw std::invalid_argument("IgSpec: mean must be positive");
        if (!(b >= 0.0)) throw std::invalid_argument("IgSpec: variance must be nonnegative");
    }
};

namespace detail {

// s = 1 - 2bz/mu, the quantity under the square root; negative means the MGF
// argument has left the domain.
inline double ig_branch(double z, const IgSpec& spec) {
    return 1.0 - 2.0 * spec.b * z / spec.mean;
}

[[noreturn]] inline void throw_domain(double z, const IgSpec& spec, const char* fn) {
    throw DomainError(std::string(fn) + ": z = " + std::to_string(z) +
                      " outside MGF domain z <= mean/(2b) = " +
                      std::to_string(spec.mean / (2.0 * spec.b)));
}

}  // namespace detail

inline double ig_mgf(double z, const IgSpec& spec) {
    spec.validate();
    if (spec.degenerate()) return std::exp(spec.mean * z);
    const double s = detail::ig_branch(z, spec);
    if (s < 0.0) detail::throw_domain(z, spec, "ig_mgf");
    return std::exp(spec.mean * spec.mean / spec.b * (1.0 - std::sqrt(s)));
}

inline double ig_mgf_d1(double z, const IgSpec& spec) {
    spec.validate();
    if (spec.degenerate()) return spec.mean * std::exp(spec.mean * z);
    const double s = detail::ig_branch(z, spec);
    if (s <= 0.0) detail::throw_domain(z, spec, "ig_mgf_d1");
    return ig_mgf(z, spec) * spec.mean / std::sqrt(s);
}

inline double ig_mgf_d2(double z, const IgSpec& spec) {
    spec.validate();
    if (spec.degenerate()) return spec.mean * spec.mean * std::exp(spec.mean * z);
    const double s = detail::ig_branch(z, spec);
    if (s <= 0.0) detail::throw_domain(z, spec, "ig_mgf_d2");
    return ig_mgf_d1(z, spec) * (spec.mean / std::sqrt(s) + spec.b / (spec.mean * s));
}

}  // namespace momentkit
