#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rwave/errors.hpp"
#include "rwave/grid.hpp"

namespace rwave {

// One time slice of the reduced field w = r*u and its time derivative.
// w[0] is exactly zero: u is finite at the origin and w = r*u.
struct ReducedState {
    double t = 0.0;
    std::vector<double> w;
    std::vector<double> wdot;

    std::size_t size() const { return w.size(); }
};

inline ReducedState zero_state(const RadialGrid& g, double t = 0.0) {
    return ReducedState{t, std::vector<double>(g.points(), 0.0), std::vector<double>(g.points(), 0.0)};
}

inline void check_state(const ReducedState& s, const RadialGrid& g) {
    if (s.w.size() != g.points() || s.wdot.size() != g.points())
        throw InvalidArgument("state arrays must have length J+1 matching the grid");
    if (s.w[0] != 0.0) throw InvalidArgument("state.w[0] must be exactly zero (w = r*u)");
}

// u_j = w_j / r_j with the origin value extrapolated from the first two
// interior nodes. For smooth radial data u(r) = u0 + c*r^2 + ..., so
// u(0) = (4*u_1 - u_2) / 3 is exact through the quadratic term.
inline std::vector<double> recover_u(const std::vector<double>& w, const RadialGrid& g) {
    std::vector<double> u(w.size());
    for (std::size_t j = 1; j < w.size(); ++j) u[j] = w[j] / g.r(j);
    u[0] = w.size() > 2 ? (4.0 * u[1] - u[2]) / 3.0 : 0.0;
    return u;
}

// Second-order first derivative: centered interior, one-sided at the ends.
inline std::vector<double> radial_derivative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

// Discrete H^1 x L^2 norm of a reduced pair: with u = w/r the gradient term
// is r^2 |du/dr|^2 = (w_r - w/r)^2 and the velocity term is wdot^2, so
//   ||(w, wdot)||^2 = 4*pi * Int [ (w_r - w/r)^2 + wdot^2 ] dr.
// The gradient integrand vanishes at r = 0 (w_r -> u(0), w/r -> u(0)).
inline double energy_norm(const std::vector<double>& w, const std::vector<double>& wdot,
                          const RadialGrid& g) {
    const std::vector<double> wr = radial_derivative(w, g.dr);
    std::vector<double> f(w.size(), 0.0);
    for (std::size_t j = 1; j < w.size(); ++j) {
        const double grad = wr[j] - w[j] / g.r(j);
        f[j] = grad * grad + wdot[j] * wdot[j];
    }
    f[0] = wdot[0] * wdot[0];
    return std::sqrt(4.0 * M_PI * trapz(f, g.dr));
}

inline double energy_norm(const ReducedState& s, const RadialGrid& g) {
    return energy_norm(s.w, s.wdot, g);
}

} // namespace rwave
