#pragma once

// Numeric best-linear-predictor oracle.  Builds the (t+1)x(t+1) normal
// equations from the model's closed-form first and second moments and solves
// them directly; the closed-form credibility coefficients must reproduce this
// solution.  Gaussian elimination with partial pivoting plus one step of
// extended-precision iterative refinement keeps the solve accurate to well
// below the 1e-9 comparison tolerance for t <= 10.
//
/// Modes for the Frequency variant:
//   CredibilityWeights - right-hand side from the S~ process's own
//                        hypothetical mean (the premium the engine quotes).
//   TargetProjection   - right-hand side from the cross moment with the true
//                        target E[S_{t+1} | R, lambda], evaluated through an
//                        independent closed form.  The two give identical
//                        coefficients (the severity effect integrates out of
//                        the cross moment); a test pins that identity.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "credibility/components.hpp"
#include "crm/moments.hpp"
#include "crm/params.hpp"
#include "momentkit/ig_mgf.hpp"

namespace credibility {

struct SingularSystemError : std::runtime_error {
    double condition_estimate;
    SingularSystemError(const std::string& msg, double cond)
        : std::runtime_error(msg + " (condition estimate " + std::to_string(cond) + ")"),
          condition_estimate(cond) {}
};

enum class BlpMode { CredibilityWeights, TargetProjection };

namespace detail {

// Solve A x = b for dense row-major A (n x n), destroying local copies.
// Partial pivoting; one iterative-refinement pass with long double residuals.
inline std::vector<double> solve_normal_equations(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw std::invalid_argument("solve_normal_equations: shape mismatch");
    const std::vector<double> a0 = a;  // pristine copy for refinement
    const std::vector<double> b0 = b;

    double norm_a = 0.0;  // max absolute column sum
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::fabs(a[i * n + j]);
        norm_a = std::max(norm_a, col);
    }

    std::vector<std::size_t> piv(n);
    std::vector<double> mult(n * n, 0.0);
    double min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i * n + k]) > std::fabs(a[best * n + k])) best = i;
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[best * n + j]);
            for (std::size_t j = 0; j < k; ++j) std::swap(mult[k * n + j], mult[best * n + j]);
            std::swap(b[k], b[best]);
        }
        piv[k] = best;
        const double pivot = a[k * n + k];
        min_pivot = std::min(min_pivot, std::fabs(pivot));
        if (std::fabs(pivot) <= norm_a * 1e-14)
            throw SingularSystemError("normal equations numerically singular",
                                      min_pivot > 0.0 ? norm_a / min_pivot
                                                      : std::numeric_limits<double>::infinity());
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / pivot;
            a[i * n + k] = 0.0;
            mult[i * n + k] = f;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
        x[k] = s / a[k * n + k];
    }

    // One iterative-refinement pass: residual in long double against the
    // pristine system, correction solved with the retained factorization.
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = b0[i];
        for (std::size_t j = 0; j < n; ++j)
            acc -= static_cast<long double>(a0[i * n + j]) * static_cast<long double>(x[j]);
        r[i] = static_cast<double>(acc);
    }
    for (std::size_t k = 0; k < n; ++k)
        if (piv[k] != k) std::swap(r[k], r[piv[k]]);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) r[i] -= mult[i * n + k] * r[k];
    for (std::size_t k = n; k-- > 0;) {
        double s = r[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * r[j];
        r[k] = s / a[k * n + k];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] += r[i];
    return x;
}

struct SecondMoments {
    double mean;   // E[X]
    double var;    // var[X]
    double cov;    // cov[X_i, X_j], i != j
    double target_mean;   // E[T]
    double target_cross;  // E[X_i T]
};

inline SecondMoments blp_moments(const crm::ModelParams& p, Variant variant, BlpMode mode) {
    SecondMoments m{};
    switch (variant) {
        case Variant::AggregateSeverity: {
            m.mean = crm::mean_aggregate(p);
            m.var = crm::var_aggregate(p);
            m.cov = crm::cov_aggregate_lag(p);
            m.target_mean = m.mean;
            m.target_cross = m.cov + m.mean * m.mean;  // cov(S_i, T) = a1
            break;
        }
        case Variant::Frequency: {
            const auto c = components_freq(p, 1);
            m.mean = c.u;
            m.var = c.v + c.a;
            m.cov = c.a;
            m.target_mean = c.u;
            if (mode == BlpMode::CredibilityWeights) {
                m.target_cross = c.a + c.u * c.u;  // projection on the S~ process
            } else {
                // E[S~_i T] = e^{2 beta0} (lambda1 lambda2)^2 M''(2 zeta1),
                // evaluated directly rather than through (a2, u2).
                const auto zs = crm::zeta(p);
                const double pre = p.lambda1 * p.lambda2;
                m.target_cross = std::exp(2.0 * p.beta0) * pre * pre *
                                 momentkit::ig_mgf_d2(2.0 * zs.zeta1, p.frequency_effect());
            }
            break;
        }
        case Variant::FrequencyCount: {
            const auto c = components_freq_count(p, 1);  // enforces beta0 = 0
            m.mean = c.u;
            m.var = c.v + c.a;
            m.cov = c.a;
            m.target_mean = p.lambda1;  // target is the count mean lambda1 R1
            m.target_cross = p.lambda1 * p.lambda1 * (1.0 + p.b1);
            break;
        }
    }
    return m;
}

}  // namespace detail

// Coefficient vector (alpha_0, alpha_1, ..., alpha_t) solving the normal
// equations Gram * alpha = cross-moment for the requested variant.
inline std::vector<double> blp_oracle(const crm::ModelParams& p, std::int64_t t, Variant variant,
                                      BlpMode mode = BlpMode::CredibilityWeights) {
    p.validate();
    if (t < 1) throw std::invalid_argument("blp_oracle: horizon must be >= 1");
    const auto m = detail::blp_moments(p, variant, mode);
    const std::size_t n = static_cast<std::size_t>(t) + 1;
    std::vector<double> gram(n * n), rhs(n);
    gram[0] = 1.0;
    rhs[0] = m.target_mean;
    for (std::size_t i = 1; i < n; ++i) {
        gram[i] = m.mean;          // E[1 * X_i]
        gram[i * n] = m.mean;      // symmetric
        rhs[i] = m.target_cross;   // E[X_i T]
        for (std::size_t j = 1; j < n; ++j)
            gram[i * n + j] = (i == j ? m.var : m.cov) + m.mean * m.mean;
    }
    return detail::solve_normal_equations(std::move(gram), std::move(rhs));
}

}  // namespace credibility
