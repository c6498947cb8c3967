#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rwave/functionals.hpp"
#include "rwave/solver.hpp"

namespace rwave {

// Chart between hyperboloidal coordinates (s, tau) and physical (r, t),
// anchored at t0 < -1:
//   r = e^tau sinh(s),   t = t0 + e^tau cosh(s),
// so each tau-slice is the upper hyperboloid sheet (t-t0)^2 - r^2 = e^{2 tau}.
struct HyperboloidalChart {
    double t0 = -2.0;
    double s_max = 3.0;
    std::size_t s_J = 64;
    double tau_min = -1.0;
    double tau_max = 0.0;
    std::size_t tau_J = 16;

    double ds() const { return s_max / static_cast<double>(s_J); }
    double dtau() const { return (tau_max - tau_min) / static_cast<double>(tau_J); }
    double s(std::size_t i) const { return static_cast<double>(i) * ds(); }
    double tau(std::size_t k) const { return tau_min + static_cast<double>(k) * dtau(); }
};

HyperboloidalChart make_chart(double t0, double s_max, std::size_t s_J, double tau_min,
                              double tau_max, std::size_t tau_J);

std::pair<double, double> chart_forward(double s, double tau, double t0);   // -> (r, t)
std::pair<double, double> chart_inverse(double r, double t, double t0);    // -> (s, tau)

// One tau-slice of the transformed field v and its first derivatives on the
// s-grid, plus sv = s*v for stencil work.
struct TransformedSlice {
    double tau = 0.0;
    std::vector<double> v, v_s, v_tau, sv;
};

struct TransformedTrajectory {
    HyperboloidalChart chart;
    std::vector<TransformedSlice> slices;
};

// Samples v = (sinh s / s) e^tau u(T(s,tau)) and its derivatives by bilinear
// interpolation of the stored (r, t) lattice. Requires stride = 1; throws
// CoverageError when chart nodes leave the stored window.
TransformedTrajectory push_forward(const Trajectory& traj, const HyperboloidalChart& chart);

struct TransformedEnergy {
    double total = 0.0;     // full E(tau) including the potential term
    double interior = 0.0;  // kinetic/gradient part over s < s0(tau)
    double exterior = 0.0;  // kinetic/gradient part over s > s0(tau)
    double s0 = 0.0;        // cosh^{-1}(-t0 e^{-tau})
};

// Transformed energy of one slice with the interior/exterior split at
// s0(tau) = acosh(-t0 e^{-tau}), the radius where the slice crosses t = 0.
TransformedEnergy transformed_energy(const TransformedSlice& slice, const HyperboloidalChart& chart,
                                     double p);

struct TransformedBudgets {
    double i_prime = 0.0;      // IntInt e^{-(p-3)tau} (s/sinh s)^{p-1} |v|^{2(p-1)} dy dtau
    double morawetz = 0.0;     // IntInt e^{-(p-3)tau} (p-1) s^{p-1} cosh s / sinh^p s |v|^{p+1} dy dtau
    double dissipation = 0.0;  // IntInt e^{-(p-3)tau} (s/sinh s)^{p-1} |v|^{p+1} dy dtau
    double i2 = 0.0;           // IntInt e^{-2(p-3)tau} (s/sinh s)^{2p-4} |v|^{2(p-1)} dy dtau
    bool i2_le_iprime = true;  // integrand comparison at every tau >= 0 node
    double energy_at_zero = 0.0;
};

// Space-time budgets over the tau >= 0 part of the chart.
TransformedBudgets transformed_budgets(const TransformedTrajectory& vtraj, double p);

// (p+1)/(p-3) * E0; void for p = 3 (kappa = 0), which is rejected.
double transformed_dissipation_bound(double p, double E0);

// Max-norm residual of the transformed field against
//   v_tautau - v_ss - (2/s) v_s + (s/sinh s)^{p-1} e^{-(p-3)tau} |v|^{p-1} v = 0
// in sv form, with 4th-order interior stencils so the measurement resolves
// the O(dr^2) push-forward error rather than its own truncation.
double cp2_residual_max(const TransformedTrajectory& vtraj, double p);

struct Box2 {
    double x0 = 0.0, x1 = 1.0;  // first coordinate range
    double y0 = 0.0, y1 = 1.0;  // second coordinate range
};

// Commutator residuals of the two reductions, both sides by second-order
// finite differences of the closed-form field at spacing h:
//   T3: (d_tt - d_rr)(r u) = r (d_tt - Lap) u           on an (r, t) box
//   T4: (d_tautau - d_ss)(w o T) = e^{2tau} (d_tt - d_rr) w o T   on an (s, tau) box
double commutator_residual_T3(const std::function<double(double, double)>& u_field, const Box2& rt,
                              double h);
double commutator_residual_T4(const std::function<double(double, double)>& w_field, double t0,
                              const Box2& stau, double h);

struct CovCheck {
    double direct = 0.0;       // IntInt g 4 pi r^2 dr dt
    double transformed = 0.0;  // IntInt g(T(s,tau)) 4 pi e^{4 tau} sinh^2 s ds dtau
    double rel_diff = 0.0;
};

// Change-of-variables audit for a non-negative density supported inside the
// forward cone; n x n trapezoid on both sides.
CovCheck change_of_variables_check(const std::function<double(double, double)>& g_density,
                                   double t0, const Box2& rt, const Box2& stau, std::size_t n);

} // namespace rwave
