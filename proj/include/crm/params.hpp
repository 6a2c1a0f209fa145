#pragma once

// Parameter records and observation containers for the dependent collective
// risk model.  One policyholder in one period:
//
//   N  | R      ~ Poisson(lambda1 * R1)
//   Y_j|(R, N)  ~ Gamma(mean lambda2 * e^{beta0 N} * R2, dispersion psi2), iid
//   S = sum_{j<=N} Y_j
//
// R1 ~ IG(1, b1) and R2 ~ Gamma(1, b2) are unit-mean random effects drawn once
// per policyholder.  Gamma(mean mu, dispersion psi) means var = psi * mu^2
// (shape 1/psi, scale psi*mu); see the README for the parameterization note.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "momentkit/ig_mgf.hpp"

namespace crm {

struct ModelParams {
    double lambda1 = 0.0;  // a priori frequency rate
    double lambda2 = 0.0;  // a priori severity scale
    double beta0 = 0.0;    // frequency-severity dependence exponent
    double psi2 = 0.0;     // severity dispersion
    double b1 = 0.0;       // var of the frequency random effect R1
    double b2 = 0.0;       // var of the severity random effect R2

    momentkit::IgSpec frequency_effect() const { return {1.0, b1}; }

    // Field ranges plus MGF-domain feasibility: every closed form evaluates
    // the IG MGF at zeta2 and 2*zeta1, so both must lie below 1/(2 b1).
    void validate() const {
        if (!(lambda1 > 0.0)) throw std::invalid_argument("ModelParams: lambda1 must be positive");
        if (!(lambda2 > 0.0)) throw std::invalid_argument("ModelParams: lambda2 must be positive");
        if (!(psi2 > 0.0)) throw std::invalid_argument("ModelParams: psi2 must be positive");
        if (!(b1 >= 0.0)) throw std::invalid_argument("ModelParams: b1 must be nonnegative");
        if (!(b2 >= 0.0)) throw std::invalid_argument("ModelParams: b2 must be nonnegative");
        if (!std::isfinite(beta0)) throw std::invalid_argument("ModelParams: beta0 must be finite");
        if (b1 >= momentkit::kDegenerateB) {
            const double cap = 1.0 / (2.0 * b1);
            const double z2 = lambda1 * std::expm1(2.0 * beta0);
            const double two_z1 = 2.0 * lambda1 * std::expm1(beta0);
            if (!(z2 < cap))
                throw momentkit::DomainError(
                    "ModelParams: zeta2 = " + std::to_string(z2) +
                    " not below the MGF branch point 1/(2 b1) = " + std::to_string(cap));
            if (!(two_z1 < cap))
                throw momentkit::DomainError(
                    "ModelParams: 2*zeta1 = " + std::to_string(two_z1) +
                    " not below the MGF branch point 1/(2 b1) = " + std::to_string(cap));
        }
    }
};

struct RiskClass {
    ModelParams params;
    double weight = 0.0;  // class weight w in [0,1]
};

struct Portfolio {
    std::vector<RiskClass> classes;

    // Weights must sum to 1 within 1e-12.  Normalization is deliberately NOT
    // performed: a wrong sum is a config mistake, not a rounding issue.
    void validate() const {
        if (classes.empty()) throw std::invalid_argument("Portfolio: no classes");
        double sum = 0.0;
        for (const auto& rc : classes) {
            if (!(rc.weight >= 0.0 && rc.weight <= 1.0))
                throw std::invalid_argument("Portfolio: class weight outside [0,1]");
            rc.params.validate();
            sum += rc.weight;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("Portfolio: weights sum to " + std::to_string(sum) +
                                        ", expected 1 within 1e-12");
    }
};

struct ClaimHistory {
    struct Period {
        std::int64_t n = 0;  // claim count
        double s = 0.0;      // aggregate severity
    };
    std::vector<Period> periods;

    std::int64_t horizon() const { return static_cast<std::int64_t>(periods.size()); }

    // A period with no claims carries no severity, and vice versa.
    void validate() const {
        for (const auto& p : periods) {
            if (p.n < 0) throw std::invalid_argument("ClaimHistory: negative claim count");
            if (!(p.s >= 0.0) || !std::isfinite(p.s))
                throw std::invalid_argument("ClaimHistory: aggregate must be finite and nonnegative");
            if (p.n == 0 && p.s != 0.0)
                throw std::invalid_argument("ClaimHistory: aggregate must be 0 when the count is 0");
            if (p.n > 0 && !(p.s > 0.0))
                throw std::invalid_argument("ClaimHistory: aggregate must be positive when the count is positive");
        }
    }
};

enum class Link { Log };

struct CovariateSpec {
    std::vector<double> x;     // covariates
    std::vector<double> beta;  // coefficients
    Link link = Link::Log;

    void validate() const {
        if (x.size() != beta.size())
            throw std::invalid_argument("CovariateSpec: covariate/coefficient length mismatch");
        if (link != Link::Log)
            throw std::invalid_argument("CovariateSpec: only the log link is supported");
    }
};

}  // namespace crm
