#pragma once

#include <cmath>
#include <string>

#include "rwave/grid.hpp"
#include "rwave/state.hpp"

namespace rwave {

// Concrete initial-data families. The position and velocity components are
// specified independently; "tail" is an algebraic tail |u(r)| <= a*(1+r)^{-1-eps-eta}
// tapered smoothly to zero over [cutoff, 3*cutoff] so the exterior region
// r > t + 2*cutoff still sees the tail while the field stays compactly
// supported for the truncation rules.
struct DataComponent {
    enum class Family { Zero, Gaussian, Tail };
    Family family = Family::Zero;
    double amplitude = 0.0;
    double width = 1.0;   // gaussian only
    double center = 0.0;  // gaussian only
    double eta = 0.5;     // tail only: decay margin, must be > 0
    double cutoff = 4.0;  // tail only: taper start radius
};

struct DataSpec {
    DataComponent u0;
    DataComponent u1;
};

namespace detail {

// C^2 taper: 1 on [0, cutoff], 0 beyond 3*cutoff.
inline double tail_taper(double r, double cutoff) {
    if (r <= cutoff) return 1.0;
    const double x = (r - cutoff) / (2.0 * cutoff);
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

inline double eval_component(const DataComponent& c, double epsilon, double r) {
    switch (c.family) {
        case DataComponent::Family::Zero:
            return 0.0;
        case DataComponent::Family::Gaussian: {
            const double x = (r - c.center) / c.width;
            return c.amplitude * std::exp(-x * x);
        }
        case DataComponent::Family::Tail:
            return c.amplitude * std::pow(1.0 + r, -1.0 - epsilon - c.eta) * tail_taper(r, c.cutoff);
    }
    return 0.0;
}

// Radius beyond which the component is below 1e-12 * amplitude.
inline double support_radius(const DataComponent& c) {
    constexpr double kLogTol = 27.63102111592855;  // ln(1e12)
    switch (c.family) {
        case DataComponent::Family::Zero:
            return 0.0;
        case DataComponent::Family::Gaussian:
            return c.center + c.width * std::sqrt(kLogTol);
        case DataComponent::Family::Tail:
            return 3.0 * c.cutoff;
    }
    return 0.0;
}

inline void validate_component(const DataComponent& c, const RadialGrid& g, const char* name) {
    using F = DataComponent::Family;
    if (c.family == F::Zero || c.amplitude == 0.0) return;
    if (c.family == F::Gaussian && !(c.width > 0.0))
        throw InvalidArgument(std::string(name) + ": gaussian width must be positive");
    if (c.family == F::Tail && !(c.eta > 0.0))
        throw InvalidArgument(std::string(name) + ": tail eta must be positive (weighted norm would be infinite)");
    if (c.family == F::Tail && !(c.cutoff > 0.0))
        throw InvalidArgument(std::string(name) + ": tail cutoff must be positive");
    const double support = support_radius(c);
    if (support > 0.5 * g.r_max())
        throw InvalidArgument(std::string(name) + ": data support radius " + std::to_string(support) +
                              " exceeds r_max/2 = " + std::to_string(0.5 * g.r_max()));
}

} // namespace detail

inline double data_support_radius(const DataSpec& spec) {
    return std::max(detail::support_radius(spec.u0), detail::support_radius(spec.u1));
}

// Samples (u0, u1) on the grid at t = 0 in reduced form: w_j = r_j*u0(r_j),
// wdot_j = r_j*u1(r_j). Enforces the truncation rules (support within
// r_max/2, field negligible at r_max).
inline ReducedState synthesize_data(const DataSpec& spec, const RadialGrid& g, double epsilon) {
    detail::validate_component(spec.u0, g, "data.u0");
    detail::validate_component(spec.u1, g, "data.u1");
    ReducedState s = zero_state(g);
    for (std::size_t j = 0; j <= g.J; ++j) {
        const double r = g.r(j);
        s.w[j] = r * detail::eval_component(spec.u0, epsilon, r);
        s.wdot[j] = r * detail::eval_component(spec.u1, epsilon, r);
    }
    s.w[0] = 0.0;
    s.wdot[0] = 0.0;
    return s;
}

struct WeightedNorms {
    double norm_mu = 0.0;  // || . ||_{L^2(dmu)} aggregate of (grad u0, u1)
    double norm_r = 0.0;   // radial form: Int (|du0|^2 + |u1|^2) r^{3+2eps} dr, square root
};

// Weighted data norms of a t = 0 state:
//   norm_mu^2 = 4*pi Int (|du0/dr|^2 + |u1|^2) r^2 (1+r)^{1+2eps} dr
//   norm_r^2  =      Int (|du0/dr|^2 + |u1|^2) r^{3+2eps} dr
// Since (1+r)^{1+2eps} >= r^{1+2eps} pointwise, norm_r^2 <= norm_mu^2/(4*pi)
// holds node-by-node in the shared quadrature.
inline WeightedNorms weighted_data_norm(const ReducedState& s, const RadialGrid& g, double epsilon) {
    check_state(s, g);
    if (s.t != 0.0) throw InvalidArgument("weighted_data_norm: state must be at t = 0");
    const std::vector<double> u = recover_u(s.w, g);
    const std::vector<double> du = radial_derivative(u, g.dr);
    const std::vector<double> u1 = recover_u(s.wdot, g);
    std::vector<double> f_mu(g.points(), 0.0), f_r(g.points(), 0.0);
    for (std::size_t j = 0; j <= g.J; ++j) {
        const double r = g.r(j);
        const double dens = du[j] * du[j] + u1[j] * u1[j];
        f_mu[j] = dens * r * r * std::pow(1.0 + r, 1.0 + 2.0 * epsilon);
        f_r[j] = dens * std::pow(r, 3.0 + 2.0 * epsilon);
    }
    WeightedNorms n;
    n.norm_mu = std::sqrt(4.0 * M_PI * trapz(f_mu, g.dr));
    n.norm_r = std::sqrt(trapz(f_r, g.dr));
    return n;
}

struct TailCheck {
    double max_ratio = 0.0;  // max over r_j >= 1 of |u0(r_j)| r_j^{1+eps} / A
    bool pass = true;
};

// Point-wise exterior decay audit: |u0(r)| <= A r^{-1-eps} for r >= 1.
inline TailCheck pointwise_tail_check(const ReducedState& s, const RadialGrid& g, double A,
                                      double epsilon, double tol = 1e-9) {
    check_state(s, g);
    if (!(A > 0.0)) throw InvalidArgument("pointwise_tail_check: A must be positive");
    TailCheck out;
    for (std::size_t j = 1; j <= g.J; ++j) {
        const double r = g.r(j);
        if (r < 1.0) continue;
        const double ratio = std::abs(s.w[j] / r) * std::pow(r, 1.0 + epsilon) / A;
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    out.pass = out.max_ratio <= 1.0 + tol;
    return out;
}

} // namespace rwave
