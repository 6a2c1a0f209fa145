#pragma once

// Closed-form conditional moments of the dependent collective risk model,
// everything conditional on the a priori rates (lambda1, lambda2).
//
// Notation: M, M', M'' are the IG(1, b1) MGF and derivatives, evaluated at
//   zeta1 = lambda1 (e^{beta0} - 1)   and   zeta2 = lambda1 (e^{2 beta0} - 1).
// Subscripts "same"/"cross" distinguish one period from two distinct periods.

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crm/params.hpp"
#include "momentkit/ig_mgf.hpp"

namespace crm {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exp(x . beta) under the log link.
inline double a_priori_rate(const CovariateSpec& spec) {
    spec.validate();
    const double xb = std::inner_product(spec.x.begin(), spec.x.end(), spec.beta.begin(), 0.0);
    return std::exp(xb);
}

struct Zeta {
    double zeta1 = 0.0;
    double zeta2 = 0.0;
};

inline Zeta zeta(const ModelParams& p) {
    return {p.lambda1 * std::expm1(p.beta0), p.lambda1 * std::expm1(2.0 * p.beta0)};
}

// Dispersion psi that makes var[Y | lambda] equal the target constant c:
//   psi = ( c/lambda2^2 + M(zeta1)^2 ) / ( (1+b2) M(zeta2) ) - 1.
// psi2 on the input record is ignored; all other fields are used as given.
inline double calibrate_psi(double c, const ModelParams& base) {
    if (!(c > 0.0)) throw std::invalid_argument("calibrate_psi: c must be positive");
    ModelParams probe = base;
    probe.psi2 = 1.0;  // placeholder so range validation passes
    probe.validate();
    const auto zs = zeta(probe);
    const auto ig = probe.frequency_effect();
    const double m1sq = momentkit::ig_mgf(zs.zeta1, ig) * momentkit::ig_mgf(zs.zeta1, ig);
    const double psi =
        (c / (probe.lambda2 * probe.lambda2) + m1sq) /
            ((1.0 + probe.b2) * momentkit::ig_mgf(zs.zeta2, ig)) -
        1.0;
    if (!(psi > 0.0))
        throw CalibrationError(
            "calibrate_psi: target c = " + std::to_string(c) +
            " implies nonpositive dispersion psi = " + std::to_string(psi) +
            "; c must exceed lambda2^2 * ((1+b2) M(zeta2) - M(zeta1)^2)");
    return psi;
}

// E[S | lambda] = lambda1 lambda2 e^{beta0} M'(zeta1)
inline double mean_aggregate(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    return p.lambda1 * p.lambda2 * std::exp(p.beta0) *
           momentkit::ig_mgf_d1(zs.zeta1, p.frequency_effect());
}

// var[S | lambda] = lambda1 lambda2^2 (1+b2) e^{2 beta0}
//                     [ (1+psi) M'(zeta2) + lambda1 e^{2 beta0} M''(zeta2) ]
//                   - E[S | lambda]^2
inline double var_aggregate(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    const double e2b = std::exp(2.0 * p.beta0);
    const double mean = mean_aggregate(p);
    return p.lambda1 * p.lambda2 * p.lambda2 * (1.0 + p.b2) * e2b *
               ((1.0 + p.psi2) * momentkit::ig_mgf_d1(zs.zeta2, ig) +
                p.lambda1 * e2b * momentkit::ig_mgf_d2(zs.zeta2, ig)) -
           mean * mean;
}

// cov[S_a, S_b | lambda] = (lambda1 lambda2 e^{beta0})^2
//                            [ (1+b2) M''(2 zeta1) - M'(zeta1)^2 ]
inline double cov_aggregate_lag(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    const double pre = p.lambda1 * p.lambda2 * std::exp(p.beta0);
    const double d1 = momentkit::ig_mgf_d1(zs.zeta1, ig);
    return pre * pre *
           ((1.0 + p.b2) * momentkit::ig_mgf_d2(2.0 * zs.zeta1, ig) - d1 * d1);
}

// cov[N_a, N_b | lambda] = lambda1^2 b1
inline double cov_frequency_lag(const ModelParams& p) {
    p.validate();
    return p.lambda1 * p.lambda1 * p.b1;
}

// var[Y | lambda] = lambda2^2 [ (1+b2)(1+psi) M(zeta2) - M(zeta1)^2 ]
inline double var_individual_severity(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    const double m1 = momentkit::ig_mgf(zs.zeta1, ig);
    return p.lambda2 * p.lambda2 *
           ((1.0 + p.b2) * (1.0 + p.psi2) * momentkit::ig_mgf(zs.zeta2, ig) - m1 * m1);
}

// cov[Y_j, Y_k | lambda], same period, j != k:
//   lambda2^2 [ (1+b2) M(zeta2) - M(zeta1)^2 ]
inline double cov_severity_same_period(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    const double m1 = momentkit::ig_mgf(zs.zeta1, ig);
    return p.lambda2 * p.lambda2 *
           ((1.0 + p.b2) * momentkit::ig_mgf(zs.zeta2, ig) - m1 * m1);
}

// cov[Y in period a, Y in period b | lambda], a != b:
//   lambda2^2 [ (1+b2) M(2 zeta1) - M(zeta1)^2 ]
inline double cov_severity_cross_period(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    const double m1 = momentkit::ig_mgf(zs.zeta1, ig);
    return p.lambda2 * p.lambda2 *
           ((1.0 + p.b2) * momentkit::ig_mgf(2.0 * zs.zeta1, ig) - m1 * m1);
}

// cov[N, Y | lambda], same period:
//   lambda1 lambda2 [ e^{beta0} M'(zeta1) - M(zeta1) ]
inline double cov_freq_severity_same_period(const ModelParams& p) {
    p.validate();
    const auto zs = zeta(p);
    const auto ig = p.frequency_effect();
    return p.lambda1 * p.lambda2 *
           (std::exp(p.beta0) * momentkit::ig_mgf_d1(zs.zeta1, ig) -
            momentkit::ig_mgf(zs.zeta1, ig));
}

// cov[N in period a, Y in period b | lambda], a != b: fixed at 0 by contract.
// The simulator does not reproduce this zero when beta0 != 0 and b1 > 0; see
// the "Known discrepancies" section of the README.
inline double cov_freq_severity_cross_period(const ModelParams& p) {
    p.validate();
    return 0.0;
}

}  // namespace crm
