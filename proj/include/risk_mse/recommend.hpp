#pragma once

// Method-selection guideline: compare the two premiums' HMSE curves and
// recommend the smaller, with a crossover scan for the horizon (if any) at
// which the preference flips.

#include <cmath>
#include <cstdint>
#include <optional>

#include "risk_mse/hmse.hpp"

namespace risk_mse {

enum class Recommendation { AggregateSeverity, Frequency, Tie };

inline const char* recommendation_name(Recommendation r) {
    switch (r) {
        case Recommendation::AggregateSeverity: return "AggregateSeverity";
        case Recommendation::Frequency: return "Frequency";
        case Recommendation::Tie: return "Tie";
    }
    return "?";
}

// Relative tie tolerance.  The scenario grid never actually produces ties;
// the band exists so floating-point noise cannot flip a recommendation.
inline constexpr double kTieRelTol = 1e-9;

inline Recommendation prefer(double hmse1, double hmse2) {
    const double scale = std::fmax(std::fabs(hmse1), std::fabs(hmse2));
    if (std::fabs(hmse1 - hmse2) <= kTieRelTol * scale) return Recommendation::Tie;
    return hmse1 < hmse2 ? Recommendation::AggregateSeverity : Recommendation::Frequency;
}

struct MseRow {
    double beta0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    std::int64_t t = 0;
    double hmse1 = 0.0;             // aggregate premium, expanded form
    double hmse2 = 0.0;             // frequency premium, expanded form
    double hmse1_simplified = 0.0;  // independent reduced forms
    double hmse2_simplified = 0.0;
    double hmse2_limit = 0.0;
    Recommendation recommended = Recommendation::Tie;
    std::optional<std::int64_t> crossover;  // smallest horizon where the preference flips
};

// Smallest horizon s in [2, t_max] with prefer(s) != prefer(s-1), ignoring
// ties.  Early exit: once HMSE2's floor already exceeds HMSE1(s), the
// aggregate premium wins at every later horizon (HMSE1 keeps decreasing), so
// a pro-aggregate preference can never flip back.
inline std::optional<std::int64_t> crossover_horizon(const crm::ModelParams& p,
                                                     std::int64_t t_max = 100) {
    const double limit = hmse_freq_limit(p);
    Recommendation prev = prefer(hmse_agg_simplified(p, 1), hmse_freq_simplified(p, 1));
    for (std::int64_t s = 2; s <= t_max; ++s) {
        const double h1 = hmse_agg_simplified(p, s);
        const double h2 = hmse_freq_simplified(p, s);
        const Recommendation cur = prefer(h1, h2);
        if (cur != Recommendation::Tie) {
            if (prev != Recommendation::Tie && cur != prev) return s;
            prev = cur;
        }
        if (cur == Recommendation::AggregateSeverity && limit > h1) break;
    }
    return std::nullopt;
}

inline MseRow recommend(const crm::ModelParams& p, std::int64_t t, std::int64_t t_max = 100) {
    detail::require_horizon(t);
    MseRow row;
    row.beta0 = p.beta0;
    row.b1 = p.b1;
    row.b2 = p.b2;
    row.t = t;
    row.hmse1 = hmse_agg_expanded(p, t);
    row.hmse2 = hmse_freq_expanded(p, t);
    row.hmse1_simplified = hmse_agg_simplified(p, t);
    row.hmse2_simplified = hmse_freq_simplified(p, t);
    row.hmse2_limit = hmse_freq_limit(p);
    row.recommended = prefer(row.hmse1, row.hmse2);
    row.crossover = crossover_horizon(p, t_max);
    return row;
}

}  // namespace risk_mse
