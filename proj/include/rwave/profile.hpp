#pragma once

#include <cmath>

#include "rwave/errors.hpp"

namespace rwave {

// s / sinh(s), the removable-singularity ratio. Series below 1e-4 keeps the
// relative error under 1e-16 where the direct quotient is ill-conditioned.
inline double sinh_ratio(double s) {
    if (s < 1e-4) {
        const double s2 = s * s;
        return 1.0 - s2 / 6.0 + 7.0 * s2 * s2 / 360.0;
    }
    if (s > 700.0) return 0.0;  // sinh would overflow; the ratio is ~0 anyway
    return s / std::sinh(s);
}

// (s / sinh s)^{p-1}, the spatial coefficient of the transformed equation.
inline double phi_weight(double s, double p) {
    if (!(s >= 0.0)) throw InvalidArgument("phi_weight: s must be non-negative");
    return std::pow(sinh_ratio(s), p - 1.0);
}

// Coefficient profile of the source term G(x,t,v) = -phi(|x|) e^{-kappa t} |v|^{p-1} v.
// Two concrete kinds plus "free" (phi == 0) for linear reference runs.
class CoefficientProfile {
public:
    enum class Kind { Free, Unit, Hyperbolic };

    CoefficientProfile(Kind kind, double kappa, double p) : kind_(kind), kappa_(kappa), p_(p) {
        if (!(kappa >= 0.0)) throw InvalidArgument("profile: kappa must be non-negative");
        if (!(p >= 3.0 && p < 5.0)) throw InvalidArgument("profile: need 3 <= p < 5");
        verify_morawetz_condition();
    }

    Kind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double p() const { return p_; }

    double phi(double r) const {
        switch (kind_) {
            case Kind::Free: return 0.0;
            case Kind::Unit: return 1.0;
            case Kind::Hyperbolic: return phi_weight(r, p_);
        }
        return 0.0;
    }

    // (p-1)*phi(r) - r*phi'(r), closed form per kind. For the hyperbolic
    // profile this equals (p-1) r^p cosh(r) / sinh(r)^p.
    double morawetz_weight(double r) const {
        switch (kind_) {
            case Kind::Free:
                return 0.0;
            case Kind::Unit:
                return p_ - 1.0;
            case Kind::Hyperbolic: {
                if (r > 700.0) return 0.0;
                const double ratio = sinh_ratio(r);
                const double cosh_term = r < 1e-4 ? (1.0 + r * r / 2.0) : std::cosh(r);
                return (p_ - 1.0) * std::pow(ratio, p_ - 1.0) * ratio * cosh_term;
            }
        }
        return 0.0;
    }

private:
    // Numerical audit of (p-1)phi - s phi' >= 0 on a sample of radii.
    void verify_morawetz_condition() const {
        if (kind_ == Kind::Free) return;
        const double h = 1e-6;
        for (double s = 0.01; s < 60.0; s *= 1.35) {
            const double dphi = (phi(s + h) - phi(s - h)) / (2.0 * h);
            if ((p_ - 1.0) * phi(s) - s * dphi < -1e-8)
                throw InvalidArgument("profile: Morawetz condition (p-1)phi - s phi' >= 0 violated");
        }
    }

    Kind kind_;
    double kappa_;
    double p_;
};

} // namespace rwave
