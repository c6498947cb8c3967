#pragma once

#include <algorithm>
#include <cmath>

#include "rwave/errors.hpp"

namespace rwave {

// Physical and analytic constants governing one experiment.
//
//   p       nonlinearity exponent, 3 <= p < 5
//   epsilon weight exponent of the data measure (1+r)^{1+2*epsilon}, > 0
//   A       weighted-data bound
//   kappa   damping exponent of the e^{-kappa*t} source factor, >= 0
//   delta   exterior decay exponent
//   B1      exterior decay amplitude
//   R       exterior radius (decay statements live on r > t + R)
//   t0      hyperboloid anchor time, < -1
struct Parameters {
    double p = 3.0;
    double epsilon = 0.5;
    double A = 1.0;
    double kappa = 0.0;
    double delta = 0.1;
    double B1 = 1.0;
    double R = 1.0;
    double t0 = -std::sqrt(2.0) - 1.0;
    double C_flux = 0.0;  // frozen constant of the characteristic flux envelope f
};

inline double derive_delta(double epsilon) { return std::min(epsilon / 2.0, 0.1); }

inline double derive_t0(double R) { return -std::sqrt(R * R + 1.0) - 1.0; }

// Validates the invariants. The derived delta = min{epsilon/2, 1/10} can sit
// exactly at 1/10, so the delta cap is inclusive there while remaining strict
// against epsilon.
inline void validate(const Parameters& prm) {
    if (!(prm.p >= 3.0 && prm.p < 5.0)) throw InvalidArgument("parameters.p: need 3 <= p < 5");
    if (!(prm.epsilon > 0.0)) throw InvalidArgument("parameters.epsilon: need epsilon > 0");
    if (!(prm.kappa >= 0.0)) throw InvalidArgument("parameters.kappa: need kappa >= 0");
    if (!(prm.delta > 0.0 && prm.delta <= 0.1 && prm.delta < prm.epsilon))
        throw InvalidArgument("parameters.delta: need 0 < delta <= 1/10 and delta < epsilon");
    if (!(prm.R >= 1.0)) throw InvalidArgument("parameters.R: need R >= 1");
    if (!(prm.t0 < -1.0)) throw InvalidArgument("parameters.t0: need t0 < -1");
    if (!(prm.A > 0.0)) throw InvalidArgument("parameters.A: need A > 0");
    if (!(prm.B1 > 0.0)) throw InvalidArgument("parameters.B1: need B1 > 0");
}

// Fills delta and t0 from (epsilon, R) and checks everything.
inline Parameters derive(Parameters prm) {
    prm.delta = derive_delta(prm.epsilon);
    prm.t0 = derive_t0(prm.R);
    validate(prm);
    return prm;
}

} // namespace rwave
