#pragma once

#include <cstddef>
#include <vector>

#include "rwave/grid.hpp"
#include "rwave/profile.hpp"
#include "rwave/state.hpp"

namespace rwave {

// Running space-time integrals, updated every solver step with
// trapezoid-in-time increments. All integrands are non-negative, so each
// accumulator is non-decreasing along a trajectory.
struct TrajAccums {
    double dissipation = 0.0;   // IntInt e^{-kappa t} phi |u|^{p+1} dx dt
    double morawetz = 0.0;      // IntInt e^{-kappa t} ((p-1)phi - r phi')/r |u|^{p+1} dx dt
    double lp2p2 = 0.0;         // IntInt |u|^{2(p-1)} dx dt
    double source_l1l2 = 0.0;   // Int ||G(.,t,u)||_{L^2_x} dt
};

struct Snapshot {
    ReducedState state;
    std::vector<double> w_next;  // field one level ahead; lattice restarts stay exact
    TrajAccums accums;           // running integrals from t_first up to state.t
};

// Strided record of an evolution at unit Courant number (dt = dr).
struct Trajectory {
    RadialGrid grid;
    CoefficientProfile profile;
    double dt = 0.0;
    long stride = 1;

    std::vector<Snapshot> snaps;

    double t_first() const { return snaps.front().state.t; }
    double t_last() const { return snaps.back().state.t; }
    double snap_dt() const { return dt * static_cast<double>(stride); }

    std::size_t index_of(double t) const;              // throws if t is not a stored time
    const Snapshot& at_time(double t) const { return snaps[index_of(t)]; }
    // Level pair (w at t, w one dt later) for exact free restarts.
    std::pair<const std::vector<double>*, const std::vector<double>*> level_pair(std::size_t i) const;
};

// Exact free evolution of the reduced 1D wave equation with odd reflection
// at r = 0 and zero extension beyond r_max. Lattice-aligned offsets
// reproduce the d'Alembert formula exactly; off-lattice offsets fall back to
// linear interpolation of the data (second order).
ReducedState dalembert_free(const ReducedState& state0, const RadialGrid& grid, double t);

// Three-level leapfrog at unit Courant number for
//   w_tt - w_rr = -r phi(r) e^{-kappa t} |w/r|^{p-1} (w/r),
// boundary w = 0 at the origin, characteristic outflow at r_max. Evolves
// over [t_begin, ~T] from data at t = 0 (t_begin <= 0 needs kappa = 0).
// The end times are rounded up to whole stride multiples of dt.
Trajectory evolve_leapfrog(const ReducedState& state0, const RadialGrid& grid,
                           const CoefficientProfile& profile, double T, long stride,
                           double t_begin = 0.0);

struct PicardResult {
    Trajectory trajectory;
    std::vector<double> gaps;  // sup-norm gaps between consecutive iterates
    double final_gap() const { return gaps.empty() ? 0.0 : gaps.back(); }
};

// Duhamel fixed-point iteration on the lattice: iterate 0 is identically
// zero, each next iterate is the free evolution of the data plus the
// integrated source of the previous iterate (exact 1D kernel, trapezoid in
// time). Throws NoContraction when the gaps grow three times in a row.
PicardResult picard_solve(const ReducedState& state0, const RadialGrid& grid,
                          const CoefficientProfile& profile, double T, int iters);

struct ResidualSample {
    double t = 0.0;
    double max_abs = 0.0;
    double l2 = 0.0;
};

// Discrete residual (d_tt - d_rr) w + r phi e^{-kappa t}|w/r|^{p-1}(w/r) at
// interior points of the stored snapshots. order = 2 matches the scheme's
// own stencil (identically zero on stride-1 leapfrog output); order = 4
// measures the solution's genuine O(dr^2) error field.
std::vector<ResidualSample> pde_residual(const Trajectory& traj, const CoefficientProfile& profile,
                                         int order = 2);

// Exact lattice free evolution of a level pair by `steps` lattice steps
// (negative steps run backward). Returns the pair at the target level.
std::pair<std::vector<double>, std::vector<double>> free_propagate_pair(
    const std::vector<double>& w_at, const std::vector<double>& w_next, long steps);

// sgn(u)|u|^p with fast paths for integer p.
double signed_power(double u, double p);

} // namespace rwave
