#pragma once

// Premium evaluation on claim histories.  An empty history yields the
// collective premium u for either variant.

#include <cmath>
#include <stdexcept>

#include "credibility/components.hpp"
#include "crm/params.hpp"

namespace credibility {

struct PremiumQuote {
    double premium = 0.0;
    CredibilityComponents components;
    double observation_mean = 0.0;  // the S-bar or S~-bar actually used
};

namespace detail {

inline PremiumQuote quote_from(const CredibilityComponents& c, double obs_mean) {
    PremiumQuote q;
    q.components = c;
    q.observation_mean = obs_mean;
    q.premium = c.z * obs_mean + (1.0 - c.z) * c.u;
    // Z in [0,1) and u > 0 make negative premiums impossible for nonnegative
    // observations; a violation indicates a parameter-domain bug upstream.
    if (q.premium < 0.0)
        throw std::logic_error("premium: negative result from nonnegative inputs");
    return q;
}

}  // namespace detail

// Prem1 = Z1 * mean(S_k) + (1 - Z1) * u1
inline PremiumQuote premium_agg(const crm::ClaimHistory& h, const crm::ModelParams& p) {
    h.validate();
    const auto c = components_agg(p, h.horizon());
    double obs = 0.0;
    if (!h.periods.empty()) {
        for (const auto& per : h.periods) obs += per.s;
        obs /= static_cast<double>(h.periods.size());
    }
    return detail::quote_from(c, obs);
}

// Prem2 = Z2 * mean(S~_k) + (1 - Z2) * u2, S~ built from the counts only.
inline PremiumQuote premium_freq(const crm::ClaimHistory& h, const crm::ModelParams& p) {
    h.validate();
    const auto c = components_freq(p, h.horizon());
    double obs = 0.0;
    if (!h.periods.empty()) {
        for (const auto& per : h.periods) obs += buhlmann_observation(per.n, p);
        obs /= static_cast<double>(h.periods.size());
    }
    return detail::quote_from(c, obs);
}

// Count-based premium (predicts N_{t+1}); beta0 = 0 enforced by the
// components.  lambda2 * this premium equals premium_freq exactly.
inline PremiumQuote premium_freq_count(const crm::ClaimHistory& h, const crm::ModelParams& p) {
    h.validate();
    const auto c = components_freq_count(p, h.horizon());
    double obs = 0.0;
    if (!h.periods.empty()) {
        for (const auto& per : h.periods) obs += static_cast<double>(per.n);
        obs /= static_cast<double>(h.periods.size());
    }
    return detail::quote_from(c, obs);
}

}  // namespace credibility
