#pragma once

// Exact samplers for the model's building blocks.  No MCMC and no
// approximations: gamma via Marsaglia-Tsang rejection, inverse Gaussian via
// the Michael-Schucany-Haas transform-with-rejection, Poisson via Knuth's
// product-of-uniforms (chunked so the e^{-rate} floor never underflows).
//
// Gamma parameterization used throughout: (mean mu, dispersion psi) maps to
// shape 1/psi, scale psi*mu, giving variance psi * mu^2.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "momentkit/ig_mgf.hpp"
#include "simlab/rng.hpp"

namespace simlab {

// Standard normal, Box-Muller (cosine branch only; one draw per call keeps
// the stream layout independent of call parity).
inline double sample_normal(RngStream& rng) {
    const double u1 = rng.next_double_open();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

namespace detail {

// Gamma(shape alpha, scale 1), Marsaglia-Tsang; the alpha < 1 boost draws
// Gamma(alpha + 1) and multiplies by U^{1/alpha}.
inline double sample_gamma_shape(double alpha, RngStream& rng) {
    if (!(alpha > 0.0)) throw std::invalid_argument("sample_gamma_shape: shape must be positive");
    if (alpha < 1.0) {
        const double boost = std::pow(rng.next_double_open(), 1.0 / alpha);
        return sample_gamma_shape(alpha + 1.0, rng) * boost;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_double_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace detail

// Gamma with mean mu and dispersion psi (variance psi mu^2); degenerate
// dispersion collapses to the mean.
inline double sample_unit_gamma(double mean, double dispersion, RngStream& rng) {
    if (!(mean > 0.0)) throw std::invalid_argument("sample_unit_gamma: mean must be positive");
    if (dispersion < momentkit::kDegenerateB) return mean;
    return detail::sample_gamma_shape(1.0 / dispersion, rng) * (dispersion * mean);
}

// Poisson(rate), Knuth.  Rates above 500 are split into independent chunks
// (Poisson additivity) so the e^{-rate} comparison floor stays representable.
inline std::int64_t sample_poisson(double rate, RngStream& rng) {
    if (!(rate >= 0.0)) throw std::invalid_argument("sample_poisson: rate must be nonnegative");
    std::int64_t total = 0;
    while (rate > 500.0) {
        rate -= 500.0;
        const double threshold = std::exp(-500.0);
        std::int64_t k = 0;
        double prod = rng.next_double_open();
        while (prod > threshold) {
            ++k;
            prod *= rng.next_double_open();
        }
        total += k;
    }
    const double threshold = std::exp(-rate);
    std::int64_t k = 0;
    double prod = rng.next_double_open();
    while (prod > threshold) {
        ++k;
        prod *= rng.next_double_open();
    }
    return total + k;
}

// Inverse Gaussian with the library's (mean, b = variance) convention;
// classic shape parameter lambda = mean^3 / b.  Michael-Schucany-Haas: one
// chi-square (squared normal), one uniform for the root selection.
inline double sample_ig(const momentkit::IgSpec& spec, RngStream& rng) {
    spec.validate();
    if (spec.degenerate()) return spec.mean;
    const double mu = spec.mean;
    const double lambda = mu * mu * mu / spec.b;
    const double nu = sample_normal(rng);
    const double w = mu * nu * nu;
    // Smaller root of the quadratic, rationalized so the subtraction of two
    // nearly equal square roots cannot cancel to a negative value.
    const double root = std::sqrt(w * w + 4.0 * lambda * w);
    const double x = mu * (1.0 - 2.0 * w / (w + root));
    if (rng.next_double() <= mu / (mu + x)) return x;
    return mu * mu / x;
}

}  // namespace simlab
