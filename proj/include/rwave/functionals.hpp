#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwave/params.hpp"
#include "rwave/solver.hpp"

namespace rwave {

// Total energy of a slice,
//   E = Int [ 1/2 |grad u|^2 + 1/2 |u_t|^2 + e^{-kappa t} phi |u|^{p+1}/(p+1) ] dx,
// computed in reduced form: r^2|du/dr|^2 = (w_r - w/r)^2, r^2 u_t^2 = wdot^2,
// r^2 |u|^{p+1} = |w|^{p+1} / r^{p-1}.
double energy(const ReducedState& s, const RadialGrid& g, const CoefficientProfile& profile);

// Morawetz multiplier functional M(t) = Int u_t (du/dr + u/r) dx. In reduced
// form the integrand collapses to wdot * w_r.
double morawetz_functional(const ReducedState& s, const RadialGrid& g);

struct BudgetEntry {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct DissipationCheck {
    double accumulated = 0.0;    // IntInt e^{-kappa t} phi |u|^{p+1} dx dt
    double identity_defect = 0.0;  // |E(first) - E(last) - kappa/(p+1) * accumulated|
    double bound = 0.0;          // (p+1)/kappa * E(first)
    double energy_first = 0.0;
    double energy_last = 0.0;
    bool pass = true;            // accumulated <= bound
};

// Energy-dissipation audit over a kappa > 0 trajectory.
DissipationCheck dissipation_check(const Trajectory& traj);

// Accumulated Morawetz integral with the audit bound 100 * E(t_first).
// Throws if the profile weight is negative at any grid node.
BudgetEntry morawetz_budget(const Trajectory& traj);

// (Int (Int_region weight |u|^{q_x} dmu)^{q_t/q_x} dt)^{1/q_t} over the
// stored snapshots (trapezoid in both directions). weight and region default
// to 1 and everything.
double mixed_norm(const Trajectory& traj, double q_t, double q_x,
                  const std::function<double(double r, double t)>& weight = {},
                  const std::function<bool(double r, double t)>& region = {});

// ||S_L(t2-t1) U(t1) - U(t2)|| in the discrete H^1 x L^2 norm, with the free
// propagation performed exactly on the lattice.
double scattering_defect(const Trajectory& traj, double t1, double t2);

// Free pullback of the latest stored state to t = 0: the discrete scattering
// profile (u_0^+, u_1^+) in reduced form.
ReducedState scattering_profile(const Trajectory& traj);

struct DecayCalibration {
    double B1 = 1.0;   // smallest power of two covering the es1 table on the slab
    double C = 0.0;    // characteristic-flux constant calibrated on the slab
};

// Calibrates (B1, C) on the initial slab t in [0, slab_end] with the
// exterior region r > t + R.
DecayCalibration calibrate_decay(const Trajectory& traj, double R, double delta,
                                 double slab_end = 1.0);

struct DecaySample {
    double t = 0.0;
    double es1 = 0.0;   // max es1 ratio over the exterior slice at t
    double flux = 0.0;  // max characteristic ratio over the exterior slice at t
};

struct DecayReport {
    double B1 = 0.0, R = 0.0, C = 0.0, delta = 0.0;
    double max_es1_ratio = 0.0;
    double max_char_ratio = 0.0;
    std::size_t points = 0;  // exterior sample count
    bool pass = true;
    std::vector<DecaySample> series;
};

// Exterior decay table over all stored (r_j, t_n) with r_j > t_n + R:
//   es1 ratio      |w| (r-t)^delta / B1
//   char ratios    |w_t -+ w_r| / f(r -+ t),  f(s) = s|u1(s)| + s|du0(s)| + C s^{-1-delta}
DecayReport exterior_decay_report(const Trajectory& traj, const Parameters& prm, double tol = 1e-2);

// Energy series (t, E(t)) over the stored snapshots.
std::vector<std::pair<double, double>> energy_series(const Trajectory& traj);
std::vector<std::pair<double, double>> morawetz_series(const Trajectory& traj);

// Region helpers for mixed_norm.
std::function<bool(double, double)> region_exterior(double R);          // r > t + R
std::function<bool(double, double)> region_omega(double t0);            // r^2 < (t-t0)^2 - 1, t > t0
std::function<bool(double, double)> region_K(double t0);                // e^{-2} <= (t-t0)^2-r^2 <= 1, t0 < t <= 0

} // namespace rwave
