#pragma once

// Joint auxiliary expectations for the mixed Poisson layer: N | R ~
// Poisson(lambda1 * R) with R ~ IG(1, b), everything conditional on lambda1.
// With w = lambda1 * (e^z - 1) these reduce to IG MGF evaluations:
//
//   E[e^{zN}]                          = M(w)
//   E[N e^{zN}]                        = lambda1 e^z M'(w)
//   E[N^2 e^{zN}]                      = (lambda1 e^z)^2 M''(w) + lambda1 e^z M'(w)
//   E[N e^{zN} R e^{R w}]              = lambda1 e^z M''(2w)
//   E[N_a N_b e^{z(N_a+N_b)}]          = (lambda1 e^z)^2 M''(2w)
//
// where N_a, N_b are two conditionally independent counts sharing one R.

#include "momentkit/ig_mgf.hpp"

#include <cmath>
#include <stdexcept>

namespace momentkit {

struct JointAux {
    double n2_tilt;        // E[N^2 e^{zN}]
    double n_tilt_effect;  // E[N e^{zN} R e^{R lambda1 (e^z - 1)}]
    double cross_product;  // E[N_a N_b e^{z(N_a + N_b)}], shared R
    double tilt;           // E[e^{zN}]
    double n_tilt;         // E[N e^{zN}]
};

inline JointAux joint_aux(double z, double lambda1, const IgSpec& spec) {
    if (!(lambda1 > 0.0))
        throw std::invalid_argument("joint_aux: lambda1 must be positive");
    const double w = lambda1 * std::expm1(z);
    const double le = lambda1 * std::exp(z);
    const double d1 = ig_mgf_d1(w, spec);
    const double d2w2 = ig_mgf_d2(2.0 * w, spec);
    JointAux out;
    out.n2_tilt = le * le * ig_mgf_d2(w, spec) + le * d1;
    out.n_tilt_effect = le * d2w2;
    out.cross_product = le * le * d2w2;
    out.tilt = ig_mgf(w, spec);
    out.n_tilt = le * d1;
    return out;
}

}  // namespace momentkit
