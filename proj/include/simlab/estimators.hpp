#pragma once

// Monte Carlo estimators used to verify the closed forms: empirical premium
// MSE, the nine-moment check matrix (batch-means standard errors), and the
// average-severity distributional equivalence test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "credibility/components.hpp"
#include "crm/moments.hpp"
#include "simlab/simulate.hpp"

namespace simlab {

// Compensated (Kahan) accumulator for long reductions.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct SimEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(n)
    std::int64_t n = 0;
};

// Mean of (hypothetical mean - premium)^2 across n simulated policyholders.
// The premium uses the closed-form credibility components for (params, t),
// so this is a direct Monte Carlo evaluation of the HMSE the risk_mse module
// computes analytically.
inline SimEstimate empirical_premium_mse(const crm::ModelParams& p, std::int64_t t,
                                         std::int64_t n, credibility::Variant variant,
                                         RngStream& rng) {
    p.validate();
    if (t < 1) throw std::invalid_argument("empirical_premium_mse: horizon must be >= 1");
    if (n < 10000)
        throw std::invalid_argument("empirical_premium_mse: need n >= 10^4 for a usable SE");

    credibility::CredibilityComponents comp;
    switch (variant) {
        case credibility::Variant::AggregateSeverity:
            comp = credibility::components_agg(p, t);
            break;
        case credibility::Variant::Frequency:
            comp = credibility::components_freq(p, t);
            break;
        case credibility::Variant::FrequencyCount:
            throw credibility::UsageError(
                "empirical_premium_mse: the count premium has no aggregate target");
    }
    const double z = comp.z;
    const double collective = (1.0 - z) * comp.u;
    const double td = static_cast<double>(t);

    KahanSum err, err2;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto r = draw_effects(p, rng);
        double obs_sum = 0.0;
        for (std::int64_t k = 0; k < t; ++k) {
            const auto period = detail::sample_period_sums(p, r.r1, r.r2, rng);
            if (variant == credibility::Variant::AggregateSeverity)
                obs_sum += period.s;
            else
                obs_sum += credibility::buhlmann_observation(period.n, p);
        }
        const double premium = collective + z * (obs_sum / td);
        const double target = credibility::hypothetical_mean(p, r.r1, r.r2);
        const double e = (target - premium) * (target - premium);
        err.add(e);
        err2.add(e * e);
    }
    SimEstimate est;
    est.n = n;
    const double nd = static_cast<double>(n);
    est.value = err.value() / nd;
    const double var = std::fmax(0.0, (err2.value() - nd * est.value * est.value) / (nd - 1.0));
    est.std_error = std::sqrt(var / nd);
    return est;
}

// One closed-form moment against its Monte Carlo estimate.  std_error comes
// from batch means, so |z| < 4 is the calibrated acceptance band.
struct MomentCheck {
    std::string name;
    double closed_form = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

namespace detail {

inline double batch_mean(const std::vector<double>& v) {
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

inline double batch_sd(const std::vector<double>& v, double mean) {
    KahanSum s;
    for (double x : v) s.add((x - mean) * (x - mean));
    return std::sqrt(s.value() / static_cast<double>(v.size() - 1));
}

inline MomentCheck summarize_batches(std::string name, double closed,
                                     const std::vector<double>& batch_stats) {
    MomentCheck c;
    c.name = std::move(name);
    c.closed_form = closed;
    c.estimate = batch_mean(batch_stats);
    const double sd = batch_sd(batch_stats, c.estimate);
    c.std_error = sd / std::sqrt(static_cast<double>(batch_stats.size()));
    if (c.std_error > 0.0)
        c.z = (c.estimate - closed) / c.std_error;
    else
        c.z = (c.estimate == closed) ? 0.0 : std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace detail

// All nine closed-form moments vs Monte Carlo over two simulated periods per
// policyholder.  Severity draws are extended past the realized claim count
// where a moment needs them (Y_{1,1}, Y_{1,2}, Y_{2,1} exist for every
// policyholder under the model's conditional severity law, claims or not).
inline std::vector<MomentCheck> moment_checks(const crm::ModelParams& p, std::int64_t n,
                                              RngStream& rng, std::int64_t batches = 100) {
    p.validate();
    if (batches < 2) throw std::invalid_argument("moment_checks: need at least 2 batches");
    const std::int64_t m = n / batches;
    if (m < 2) throw std::invalid_argument("moment_checks: need n >= 2 * batches");

    enum Stat {
        kMeanS, kVarS, kCovS, kCovN, kVarY, kCovYSame, kCovYCross, kCovNYSame, kCovNYCross,
        kStatCount
    };
    std::vector<std::vector<double>> stats(kStatCount);
    for (auto& s : stats) s.reserve(static_cast<std::size_t>(batches));

    const double md = static_cast<double>(m);
    for (std::int64_t b = 0; b < batches; ++b) {
        double sum_n1 = 0, sum_n2 = 0, sum_s1 = 0, sum_s2 = 0;
        double sum_y11 = 0, sum_y12 = 0, sum_y21 = 0;
        double sum_n1n2 = 0, sum_s1s2 = 0, sum_s1s1 = 0;
        double sum_y11y11 = 0, sum_y11y12 = 0, sum_y11y21 = 0;
        double sum_n1y11 = 0, sum_n1y21 = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            const auto r = draw_effects(p, rng);

            const std::int64_t n1 = sample_poisson(p.lambda1 * r.r1, rng);
            const double mean1 =
                p.lambda2 * std::exp(p.beta0 * static_cast<double>(n1)) * r.r2;
            double s1 = 0.0, y11 = 0.0, y12 = 0.0;
            const std::int64_t k1 = std::max<std::int64_t>(n1, 2);
            for (std::int64_t j = 0; j < k1; ++j) {
                const double y = sample_unit_gamma(mean1, p.psi2, rng);
                if (j == 0) y11 = y;
                if (j == 1) y12 = y;
                if (j < n1) s1 += y;
            }

            const std::int64_t n2 = sample_poisson(p.lambda1 * r.r1, rng);
            const double mean2 =
                p.lambda2 * std::exp(p.beta0 * static_cast<double>(n2)) * r.r2;
            double s2 = 0.0, y21 = 0.0;
            const std::int64_t k2 = std::max<std::int64_t>(n2, 1);
            for (std::int64_t j = 0; j < k2; ++j) {
                const double y = sample_unit_gamma(mean2, p.psi2, rng);
                if (j == 0) y21 = y;
                if (j < n2) s2 += y;
            }

            const double n1d = static_cast<double>(n1);
            sum_n1 += n1d;
            sum_n2 += static_cast<double>(n2);
            sum_s1 += s1;
            sum_s2 += s2;
            sum_y11 += y11;
            sum_y12 += y12;
            sum_y21 += y21;
            sum_n1n2 += n1d * static_cast<double>(n2);
            sum_s1s2 += s1 * s2;
            sum_s1s1 += s1 * s1;
            sum_y11y11 += y11 * y11;
            sum_y11y12 += y11 * y12;
            sum_y11y21 += y11 * y21;
            sum_n1y11 += n1d * y11;
            sum_n1y21 += n1d * y21;
        }
        const double bessel = md / (md - 1.0);
        const double m_n1 = sum_n1 / md, m_n2 = sum_n2 / md;
        const double m_s1 = sum_s1 / md, m_s2 = sum_s2 / md;
        const double m_y11 = sum_y11 / md, m_y12 = sum_y12 / md, m_y21 = sum_y21 / md;
        stats[kMeanS].push_back(m_s1);
        stats[kVarS].push_back(bessel * (sum_s1s1 / md - m_s1 * m_s1));
        stats[kCovS].push_back(bessel * (sum_s1s2 / md - m_s1 * m_s2));
        stats[kCovN].push_back(bessel * (sum_n1n2 / md - m_n1 * m_n2));
        stats[kVarY].push_back(bessel * (sum_y11y11 / md - m_y11 * m_y11));
        stats[kCovYSame].push_back(bessel * (sum_y11y12 / md - m_y11 * m_y12));
        stats[kCovYCross].push_back(bessel * (sum_y11y21 / md - m_y11 * m_y21));
        stats[kCovNYSame].push_back(bessel * (sum_n1y11 / md - m_n1 * m_y11));
        stats[kCovNYCross].push_back(bessel * (sum_n1y21 / md - m_n1 * m_y21));
    }

    std::vector<MomentCheck> out;
    out.reserve(kStatCount);
    out.push_back(detail::summarize_batches("mean_aggregate", crm::mean_aggregate(p), stats[kMeanS]));
    out.push_back(detail::summarize_batches("var_aggregate", crm::var_aggregate(p), stats[kVarS]));
    out.push_back(detail::summarize_batches("cov_aggregate_lag", crm::cov_aggregate_lag(p), stats[kCovS]));
    out.push_back(detail::summarize_batches("cov_frequency_lag", crm::cov_frequency_lag(p), stats[kCovN]));
    out.push_back(detail::summarize_batches("var_individual_severity", crm::var_individual_severity(p), stats[kVarY]));
    out.push_back(detail::summarize_batches("cov_severity_same_period", crm::cov_severity_same_period(p), stats[kCovYSame]));
    out.push_back(detail::summarize_batches("cov_severity_cross_period", crm::cov_severity_cross_period(p), stats[kCovYCross]));
    out.push_back(detail::summarize_batches("cov_freq_severity_same_period", crm::cov_freq_severity_same_period(p), stats[kCovNYSame]));
    out.push_back(detail::summarize_batches("cov_freq_severity_cross_period", crm::cov_freq_severity_cross_period(p), stats[kCovNYCross]));
    return out;
}

struct EquivalenceResult {
    double distance = 0.0;        // two-sample Kolmogorov-Smirnov statistic
    double critical_value = 0.0;  // 1% level
    bool pass = false;
    std::int64_t n = 0;   // samples per side
    std::int64_t n0 = 0;  // conditioning claim count
};

// Tests the reproductive property behind the average-severity law: the mean
// of n0 i.i.d. Gamma(mu, psi) draws must be distributed Gamma(mu, psi / n0).
// reduced_dispersion_scale deliberately mis-scales the direct law's
// dispersion (psi * scale / n0); anything but 1.0 is a negative control.
inline EquivalenceResult average_severity_equivalence_test(const crm::ModelParams& p,
                                                           std::int64_t n, std::int64_t n0,
                                                           RngStream& rng,
                                                           double reduced_dispersion_scale = 1.0) {
    p.validate();
    if (n < 10) throw std::invalid_argument("average_severity_equivalence_test: n too small");
    if (n0 < 1) throw std::invalid_argument("average_severity_equivalence_test: n0 must be >= 1");

    const double mu = p.lambda2 * std::exp(p.beta0 * static_cast<double>(n0));
    std::vector<double> averaged(static_cast<std::size_t>(n));
    std::vector<double> direct(static_cast<std::size_t>(n));
    for (auto& x : averaged) {
        double s = 0.0;
        for (std::int64_t j = 0; j < n0; ++j) s += sample_unit_gamma(mu, p.psi2, rng);
        x = s / static_cast<double>(n0);
    }
    const double reduced = p.psi2 * reduced_dispersion_scale / static_cast<double>(n0);
    for (auto& x : direct) x = sample_unit_gamma(mu, reduced, rng);

    std::sort(averaged.begin(), averaged.end());
    std::sort(direct.begin(), direct.end());
    const double na = static_cast<double>(averaged.size());
    const double nb = static_cast<double>(direct.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < averaged.size() && j < direct.size()) {
        if (averaged[i] <= direct[j])
            ++i;
        else
            ++j;
        d = std::fmax(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    EquivalenceResult res;
    res.distance = d;
    // c(0.01) = sqrt(-ln(0.01 / 2) / 2), the classical two-sample threshold.
    res.critical_value = 1.6276236307187292 * std::sqrt((na + nb) / (na * nb));
    res.pass = d < res.critical_value;
    res.n = n;
    res.n0 = n0;
    return res;
}

}  // namespace simlab
