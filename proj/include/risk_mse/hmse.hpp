#pragma once

// Hypothetical mean-square error of the two credibility premiums, measured
// against the target E[S_{t+1} | R, lambda].
//
// Each HMSE is implemented twice on purpose:
//   *_expanded    - term-by-term evaluation of the full quadratic expansion
//                   E[(T - alpha0 - alpha1 * sum X_i)^2], no algebraic
//                   simplification.  Long and cancellation-prone, which is
//                   exactly why it exists: it is the transcription check.
//   *_simplified  - the reduced closed form (a1 * v1 / (t a1 + v1) for the
//                   aggregate premium, a1 - t a2^2 / (t a2 + v2) for the
//                   frequency premium).
// The two must agree to relative 1e-9 everywhere; a mismatch means one of
// them was transcribed wrong.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "credibility/components.hpp"
#include "crm/moments.hpp"
#include "crm/params.hpp"
#include "momentkit/ig_mgf.hpp"

namespace risk_mse {

namespace detail {

// Common quadratic expansion of E[(T - alpha0 - alpha1 sum_i X_i)^2] for an
// exchangeable observation process X with mean u, second moment ex2, pairwise
// cross moment exx = E[X_i X_j] (i != j), and cross moment ext = E[X_i T].
// E[T] = u for both premium variants; E[T^2] comes in from the caller.
inline double quadratic_mse(double et2, double u, double ex2, double exx, double ext,
                            double alpha0, double alpha1, std::int64_t t) {
    const double td = static_cast<double>(t);
    return et2 + alpha0 * alpha0 + td * alpha1 * alpha1 * ex2 +
           2.0 * td * alpha0 * alpha1 * u + td * (td - 1.0) * alpha1 * alpha1 * exx -
           2.0 * alpha0 * u - 2.0 * alpha1 * td * ext;
}

inline void require_horizon(std::int64_t t) {
    if (t < 1) throw std::invalid_argument("hmse: horizon must be >= 1");
}

}  // namespace detail

// Aggregate-severity premium, full expansion.  Observations X_i = S_i:
// E[S^2] via the total variance, E[S_i S_j] and E[S_i T] via a1.
inline double hmse_agg_expanded(const crm::ModelParams& p, std::int64_t t) {
    detail::require_horizon(t);
    const auto c = credibility::components_agg(p, t);
    const auto coef = credibility::coefficients(c);
    const double u = c.u;
    const double et2 = c.a + u * u;                       // T is the hypothetical mean
    const double es2 = crm::var_aggregate(p) + u * u;     // independent of (v, a) split
    const double exx = c.a + u * u;
    const double ext = c.a + u * u;                       // cov(S_i, T) = a1
    return detail::quadratic_mse(et2, u, es2, exx, ext, coef.alpha0, coef.alpha_shared, t);
}

// Aggregate-severity premium, reduced form a1 (1 - Z1) = a1 v1 / (t a1 + v1).
inline double hmse_agg_simplified(const crm::ModelParams& p, std::int64_t t) {
    detail::require_horizon(t);
    const auto c = credibility::components_agg(p, t);
    if (c.a == 0.0) return 0.0;
    return c.a * c.v / (static_cast<double>(t) * c.a + c.v);
}

// Frequency premium, full expansion.  Observations X_i = S~_i = lambda2 N_i
// e^{beta0 N_i}; the target is still the aggregate hypothetical mean, so
// E[T^2] uses a1 while the observation moments use (u, v2, a2).  The cross
// moment E[S~_i T] equals a2 + u^2 (the severity effect integrates out).
inline double hmse_freq_expanded(const crm::ModelParams& p, std::int64_t t) {
    detail::require_horizon(t);
    const auto agg = credibility::components_agg(p, t);
    const auto c = credibility::components_freq(p, t);
    const auto coef = credibility::coefficients(c);
    const double u = c.u;
    const double et2 = agg.a + u * u;
    const double es2 = c.v + c.a + u * u;
    const double exx = c.a + u * u;
    const double ext = c.a + u * u;
    return detail::quadratic_mse(et2, u, es2, exx, ext, coef.alpha0, coef.alpha_shared, t);
}

// Frequency premium, reduced form a1 - Z2 a2 = a1 - t a2^2 / (t a2 + v2).
inline double hmse_freq_simplified(const crm::ModelParams& p, std::int64_t t) {
    detail::require_horizon(t);
    const auto agg = credibility::components_agg(p, t);
    const auto c = credibility::components_freq(p, t);
    const double denom = static_cast<double>(t) * c.a + c.v;
    if (denom == 0.0) return agg.a;
    return agg.a - static_cast<double>(t) * c.a * c.a / denom;
}

// Large-horizon limit of the frequency premium's HMSE: the frequency
// observations never reveal R2, so the error floors at
// b2 e^{2 beta0} (lambda1 lambda2)^2 M''(2 zeta1).  Zero iff b2 = 0.
inline double hmse_freq_limit(const crm::ModelParams& p) {
    p.validate();
    const auto zs = crm::zeta(p);
    const double pre = p.lambda1 * p.lambda2;
    return p.b2 * std::exp(2.0 * p.beta0) * pre * pre *
           momentkit::ig_mgf_d2(2.0 * zs.zeta1, p.frequency_effect());
}

// Portfolio mix: convex combination of per-class HMSEs under the class
// weights.  Uses the simplified forms (the canonical closed-form values).
inline double weighted_hmse(const crm::Portfolio& portfolio, std::int64_t t,
                            credibility::Variant variant) {
    portfolio.validate();
    detail::require_horizon(t);
    double total = 0.0;
    for (const auto& cls : portfolio.classes) {
        double h = 0.0;
        switch (variant) {
            case credibility::Variant::AggregateSeverity:
                h = hmse_agg_simplified(cls.params, t);
                break;
            case credibility::Variant::Frequency:
                h = hmse_freq_simplified(cls.params, t);
                break;
            case credibility::Variant::FrequencyCount:
                throw credibility::UsageError(
                    "weighted_hmse: no closed-form HMSE for the count variant");
        }
        total += cls.weight * h;
    }
    return total;
}

}  // namespace risk_mse
