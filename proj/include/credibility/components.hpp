#pragma once

// Structural components of the two Buhlmann premiums.
//
// Both premiums target the hypothetical mean E[S_{t+1} | R, lambda] and take
// the usual credibility form Z * (observation mean) + (1-Z) * u with
// Z = t a / (t a + v):
//
//   AggregateSeverity: observations are the aggregates S_k.
//   Frequency:         observations are S~_k = lambda2 N_k e^{beta0 N_k},
//                      the conditional expected aggregate given the count.
//   FrequencyCount:    observations are the raw counts N_k; only exposed for
//                      beta0 = 0, where scaling its premium by lambda2
//                      reproduces the Frequency premium exactly.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "crm/moments.hpp"
#include "crm/params.hpp"
#include "momentkit/ig_mgf.hpp"

namespace credibility {

struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Variant { AggregateSeverity, Frequency, FrequencyCount };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::AggregateSeverity: return "AggregateSeverity";
        case Variant::Frequency: return "Frequency";
        case Variant::FrequencyCount: return "FrequencyCount";
    }
    return "?";
}

struct CredibilityComponents {
    double u = 0.0;  // collective mean
    double v = 0.0;  // expected process variance
    double a = 0.0;  // variance of hypothetical means
    double z = 0.0;  // credibility factor t a / (t a + v)
    std::int64_t t = 0;
    Variant variant = Variant::AggregateSeverity;
};

namespace detail {

inline double credibility_factor(double a, double v, std::int64_t t) {
    if (t < 0) throw std::invalid_argument("credibility: negative horizon");
    if (t == 0 || a <= 0.0) return 0.0;
    return static_cast<double>(t) * a / (static_cast<double>(t) * a + v);
}

}  // namespace detail

// E[S_{t+1} | R, lambda] at a given realization (r1, r2):
//   lambda1 lambda2 r1 r2 e^{beta0} exp(lambda1 r1 (e^{beta0} - 1))
inline double hypothetical_mean(const crm::ModelParams& p, double r1, double r2) {
    p.validate();
    if (!(r1 > 0.0 && r2 > 0.0))
        throw std::invalid_argument("hypothetical_mean: random effects must be positive");
    return p.lambda1 * p.lambda2 * r1 * r2 * std::exp(p.beta0) *
           std::exp(p.lambda1 * r1 * std::expm1(p.beta0));
}

// S~ = lambda2 * n * e^{beta0 n}
inline double buhlmann_observation(std::int64_t n, const crm::ModelParams& p) {
    p.validate();
    if (n < 0) throw std::invalid_argument("buhlmann_observation: negative count");
    return p.lambda2 * static_cast<double>(n) * std::exp(p.beta0 * static_cast<double>(n));
}

inline CredibilityComponents components_agg(const crm::ModelParams& p, std::int64_t t) {
    p.validate();
    const auto zs = crm::zeta(p);
    const auto ig = p.frequency_effect();
    const double e_b = std::exp(p.beta0);
    const double e_2b = std::exp(2.0 * p.beta0);
    const double d1_z1 = momentkit::ig_mgf_d1(zs.zeta1, ig);
    const double d2_2z1 = momentkit::ig_mgf_d2(2.0 * zs.zeta1, ig);

    CredibilityComponents c;
    c.variant = Variant::AggregateSeverity;
    c.t = t;
    c.u = p.lambda1 * p.lambda2 * e_b * d1_z1;
    const double pre = p.lambda1 * p.lambda2 * e_b;
    c.a = pre * pre * ((1.0 + p.b2) * d2_2z1 - d1_z1 * d1_z1);
    c.v = p.lambda1 * p.lambda2 * p.lambda2 * (1.0 + p.b2) * e_2b *
          ((1.0 + p.psi2) * momentkit::ig_mgf_d1(zs.zeta2, ig) +
           p.lambda1 * e_2b * momentkit::ig_mgf_d2(zs.zeta2, ig) - p.lambda1 * d2_2z1);
    c.z = detail::credibility_factor(c.a, c.v, t);
    return c;
}

inline CredibilityComponents components_freq(const crm::ModelParams& p, std::int64_t t) {
    p.validate();
    const auto zs = crm::zeta(p);
    const auto ig = p.frequency_effect();
    const double e_b = std::exp(p.beta0);
    const double e_2b = std::exp(2.0 * p.beta0);
    const double d1_z1 = momentkit::ig_mgf_d1(zs.zeta1, ig);
    const double d2_2z1 = momentkit::ig_mgf_d2(2.0 * zs.zeta1, ig);

    CredibilityComponents c;
    c.variant = Variant::Frequency;
    c.t = t;
    c.u = p.lambda1 * p.lambda2 * e_b * d1_z1;
    const double pre = p.lambda1 * p.lambda2 * e_b;
    c.a = pre * pre * (d2_2z1 - d1_z1 * d1_z1);
    c.v = p.lambda1 * p.lambda2 * p.lambda2 * e_2b *
          (p.lambda1 * e_2b * momentkit::ig_mgf_d2(zs.zeta2, ig) +
           momentkit::ig_mgf_d1(zs.zeta2, ig) - p.lambda1 * d2_2z1);
    c.z = detail::credibility_factor(c.a, c.v, t);
    return c;
}

// Count-based components: a* = lambda1^2 b1, v* = lambda1, u* = lambda1.
// Only meaningful under independence (beta0 = 0); the premium linkage
// premium_freq = lambda2 * count-premium breaks otherwise.
inline CredibilityComponents components_freq_count(const crm::ModelParams& p, std::int64_t t) {
    p.validate();
    if (p.beta0 != 0.0)
        throw UsageError("components_freq_count requires beta0 = 0 (independence linkage)");
    CredibilityComponents c;
    c.variant = Variant::FrequencyCount;
    c.t = t;
    c.u = p.lambda1;
    c.a = p.lambda1 * p.lambda1 * p.b1;
    c.v = p.lambda1;
    c.z = detail::credibility_factor(c.a, c.v, t);
    return c;
}

struct Coefficients {
    double alpha0 = 0.0;       // intercept
    double alpha_shared = 0.0; // common weight on each of the t observations
};

// alpha0 = (1 - Z) u, alpha_i = Z / t; unbiasedness alpha0 + t alpha_i u = u.
inline Coefficients coefficients(const CredibilityComponents& c) {
    if (c.t < 1) throw std::invalid_argument("coefficients: horizon must be >= 1");
    return {(1.0 - c.z) * c.u, c.z / static_cast<double>(c.t)};
}

}  // namespace credibility
