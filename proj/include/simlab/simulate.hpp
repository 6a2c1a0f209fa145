#pragma once

// Exact simulation of the dependent collective risk model.  Random effects
// (r1, r2) are drawn once per policyholder and shared by all periods; within
// a period the claim count feeds the severity mean through e^{beta0 N}.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crm/params.hpp"
#include "risk_mse/report.hpp"
#include "simlab/sampling.hpp"

namespace simlab {

struct RandomEffects {
    double r1 = 1.0;  // frequency effect, inverse Gaussian(1, b1)
    double r2 = 1.0;  // severity effect, gamma(mean 1, dispersion b2)
};

inline RandomEffects draw_effects(const crm::ModelParams& p, RngStream& rng) {
    RandomEffects r;
    r.r1 = sample_ig(p.frequency_effect(), rng);
    r.r2 = sample_unit_gamma(1.0, p.b2, rng);
    return r;
}

struct PeriodDraw {
    std::int64_t n = 0;               // claim count
    std::vector<double> severities;   // the N individual claims
    double s = 0.0;                   // aggregate, exactly sum(severities)
    double m = 0.0;                   // average severity, 0 when n = 0
};

// One policy period given the policyholder's effects: N ~ Poisson(lambda1 r1),
// then N i.i.d. severities with mean lambda2 e^{beta0 N} r2 and dispersion psi2.
inline PeriodDraw sample_period(const crm::ModelParams& p, double r1, double r2,
                                RngStream& rng) {
    if (!(r1 > 0.0 && r2 > 0.0))
        throw std::invalid_argument("sample_period: random effects must be positive");
    PeriodDraw d;
    d.n = sample_poisson(p.lambda1 * r1, rng);
    if (d.n == 0) return d;
    const double mean = p.lambda2 * std::exp(p.beta0 * static_cast<double>(d.n)) * r2;
    d.severities.reserve(static_cast<std::size_t>(d.n));
    for (std::int64_t j = 0; j < d.n; ++j) {
        const double y = sample_unit_gamma(mean, p.psi2, rng);
        d.severities.push_back(y);
        d.s += y;
    }
    d.m = d.s / static_cast<double>(d.n);
    return d;
}

namespace detail {

// Hot-path variant of sample_period that skips the per-claim storage.
inline crm::ClaimHistory::Period sample_period_sums(const crm::ModelParams& p, double r1,
                                                    double r2, RngStream& rng) {
    crm::ClaimHistory::Period out;
    out.n = sample_poisson(p.lambda1 * r1, rng);
    if (out.n == 0) return out;
    const double mean = p.lambda2 * std::exp(p.beta0 * static_cast<double>(out.n)) * r2;
    for (std::int64_t j = 0; j < out.n; ++j) out.s += sample_unit_gamma(mean, p.psi2, rng);
    return out;
}

}  // namespace detail

inline constexpr std::int64_t kDefaultMaxPanelCells = 100'000'000;

// Panel of n policyholder histories over the given horizon.  Severities are
// not retained per claim; each cell is the (N, S) pair of one period.
inline std::vector<crm::ClaimHistory> simulate_policyholders(
    const crm::ModelParams& p, std::int64_t t, std::int64_t n, RngStream& rng,
    std::int64_t max_cells = kDefaultMaxPanelCells) {
    p.validate();
    if (n < 1 || t < 1)
        throw std::invalid_argument("simulate_policyholders: need n >= 1 and t >= 1");
    if (n > max_cells / t)
        throw std::invalid_argument("simulate_policyholders: panel of " + std::to_string(n) +
                                    "x" + std::to_string(t) + " cells exceeds the cap of " +
                                    std::to_string(max_cells));
    std::vector<crm::ClaimHistory> panel(static_cast<std::size_t>(n));
    for (auto& h : panel) {
        const auto r = draw_effects(p, rng);
        h.periods.resize(static_cast<std::size_t>(t));
        for (auto& period : h.periods) period = detail::sample_period_sums(p, r.r1, r.r2, rng);
    }
    return panel;
}

inline void write_panel_csv(std::ostream& os, const std::vector<crm::ClaimHistory>& panel) {
    os << "policyholder_id,t,N,S\n";
    for (std::size_t i = 0; i < panel.size(); ++i)
        for (std::size_t k = 0; k < panel[i].periods.size(); ++k)
            os << i << ',' << (k + 1) << ',' << panel[i].periods[k].n << ','
               << risk_mse::format_g17(panel[i].periods[k].s) << '\n';
}

}  // namespace simlab
