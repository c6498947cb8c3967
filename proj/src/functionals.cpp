#include "rwave/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "rwave/errors.hpp"

namespace rwave {

namespace {

double abs_pow(double x, double q) { return std::pow(std::abs(x), q); }

} // namespace

double energy(const ReducedState& s, const RadialGrid& g, const CoefficientProfile& profile) {
    check_state(s, g);
    const double p = profile.p();
    const double damp = std::exp(-profile.kappa() * s.t);
    const std::vector<double> wr = radial_derivative(s.w, g.dr);
    std::vector<double> f(g.points(), 0.0);
    for (std::size_t j = 1; j <= g.J; ++j) {
        const double r = g.r(j);
        const double grad = wr[j] - s.w[j] / r;
        const double pot = damp * profile.phi(r) * abs_pow(s.w[j], p + 1.0) /
                           ((p + 1.0) * std::pow(r, p - 1.0));
        f[j] = 0.5 * grad * grad + 0.5 * s.wdot[j] * s.wdot[j] + pot;
    }
    return 4.0 * M_PI * trapz(f, g.dr);
}

double morawetz_functional(const ReducedState& s, const RadialGrid& g) {
    check_state(s, g);
    const std::vector<double> wr = radial_derivative(s.w, g.dr);
    std::vector<double> f(g.points(), 0.0);
    for (std::size_t j = 0; j <= g.J; ++j) f[j] = s.wdot[j] * wr[j];
    return 4.0 * M_PI * trapz(f, g.dr);
}

DissipationCheck dissipation_check(const Trajectory& traj) {
    const CoefficientProfile& prof = traj.profile;
    if (!(prof.kappa() > 0.0))
        throw InvalidArgument("dissipation_check: kappa must be positive (use the conservation "
                              "drift check for kappa = 0)");
    DissipationCheck out;
    out.energy_first = energy(traj.snaps.front().state, traj.grid, prof);
    out.energy_last = energy(traj.snaps.back().state, traj.grid, prof);
    out.accumulated = traj.snaps.back().accums.dissipation - traj.snaps.front().accums.dissipation;
    out.identity_defect = std::abs(out.energy_first - out.energy_last -
                                   prof.kappa() / (prof.p() + 1.0) * out.accumulated);
    out.bound = (prof.p() + 1.0) / prof.kappa() * out.energy_first;
    out.pass = out.accumulated <= out.bound * (1.0 + 1e-12);
    return out;
}

BudgetEntry morawetz_budget(const Trajectory& traj) {
    const CoefficientProfile& prof = traj.profile;
    for (std::size_t j = 0; j <= traj.grid.J; ++j) {
        if (prof.morawetz_weight(traj.grid.r(j)) < 0.0)
            throw InvalidArgument("morawetz_budget: invalid profile, weight negative at r = " +
                                  std::to_string(traj.grid.r(j)));
    }
    BudgetEntry e;
    e.name = "morawetz";
    e.value = traj.snaps.back().accums.morawetz - traj.snaps.front().accums.morawetz;
    e.bound = 100.0 * energy(traj.snaps.front().state, traj.grid, prof);
    e.pass = e.value <= e.bound;
    return e;
}

double mixed_norm(const Trajectory& traj, double q_t, double q_x,
                  const std::function<double(double, double)>& weight,
                  const std::function<bool(double, double)>& region) {
    if (!(q_t >= 1.0) || !(q_x >= 1.0))
        throw InvalidArgument("mixed_norm: exponents must be >= 1");
    const RadialGrid& g = traj.grid;
    std::vector<double> slice(traj.snaps.size(), 0.0);
    for (std::size_t i = 0; i < traj.snaps.size(); ++i) {
        const Snapshot& s = traj.snaps[i];
        const std::vector<double> u = recover_u(s.state.w, g);
        std::vector<double> f(g.points(), 0.0);
        for (std::size_t j = 0; j <= g.J; ++j) {
            const double r = g.r(j);
            if (region && !region(r, s.state.t)) continue;
            const double wgt = weight ? weight(r, s.state.t) : 1.0;
            f[j] = wgt * abs_pow(u[j], q_x) * 4.0 * M_PI * r * r;
        }
        slice[i] = std::pow(trapz(f, g.dr), q_t / q_x);
    }
    return std::pow(trapz(slice, traj.snap_dt()), 1.0 / q_t);
}

namespace {

// Free evolution of a stored snapshot by a whole number of snapshot
// intervals, via the exact lattice pair propagator.
ReducedState free_from_snapshot(const Trajectory& traj, std::size_t i, long lattice_steps) {
    auto [w_at, w_next] = traj.level_pair(i);
    auto [a, b] = free_propagate_pair(*w_at, *w_next, lattice_steps);
    const std::size_t n = a.size();
    ReducedState out;
    out.t = traj.snaps[i].state.t + static_cast<double>(lattice_steps) * traj.dt;
    out.w = a;
    out.wdot.resize(n);
    // Centre the time derivative using the level just before `a`.
    std::vector<double> before(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) before[j] = a[j + 1] + a[j - 1] - b[j];
    before[n - 1] = a[n - 2];
    for (std::size_t j = 0; j < n; ++j) out.wdot[j] = (b[j] - before[j]) / (2.0 * traj.dt);
    return out;
}

} // namespace

double scattering_defect(const Trajectory& traj, double t1, double t2) {
    if (!(t1 < t2)) throw InvalidArgument("scattering_defect: need t1 < t2");
    const std::size_t i1 = traj.index_of(t1);
    const std::size_t i2 = traj.index_of(t2);
    const long steps = static_cast<long>(i2 - i1) * traj.stride;
    const ReducedState freely = free_from_snapshot(traj, i1, steps);
    const ReducedState& target = traj.snaps[i2].state;
    std::vector<double> dw(freely.w.size()), dwd(freely.w.size());
    for (std::size_t j = 0; j < dw.size(); ++j) {
        dw[j] = freely.w[j] - target.w[j];
        dwd[j] = freely.wdot[j] - target.wdot[j];
    }
    return energy_norm(dw, dwd, traj.grid);
}

ReducedState scattering_profile(const Trajectory& traj) {
    const std::size_t last = traj.snaps.size() - 1;
    const double t_last = traj.snaps[last].state.t;
    const long steps = -static_cast<long>(std::llround(t_last / traj.dt));
    ReducedState out = free_from_snapshot(traj, last, steps);
    out.t = 0.0;
    return out;
}

namespace {

struct InitialSamples {
    std::vector<double> u1_abs;   // |u1(r_j)|
    std::vector<double> du0_abs;  // |du0/dr (r_j)|
};

InitialSamples initial_samples(const Trajectory& traj) {
    const RadialGrid& g = traj.grid;
    const Snapshot& s0 = traj.snaps[traj.index_of(0.0)];
    const std::vector<double> u0 = recover_u(s0.state.w, g);
    const std::vector<double> du0 = radial_derivative(u0, g.dr);
    const std::vector<double> u1 = recover_u(s0.state.wdot, g);
    InitialSamples out;
    out.u1_abs.resize(g.points());
    out.du0_abs.resize(g.points());
    for (std::size_t j = 0; j <= g.J; ++j) {
        out.u1_abs[j] = std::abs(u1[j]);
        out.du0_abs[j] = std::abs(du0[j]);
    }
    return out;
}

// f(s) at lattice argument index k (k may exceed J: data vanish there).
double flux_envelope(const InitialSamples& init, const RadialGrid& g, long k, double C,
                     double delta) {
    const double s = static_cast<double>(k) * g.dr;
    double f = C * std::pow(s, -1.0 - delta);
    if (k <= static_cast<long>(g.J))
        f += s * (init.u1_abs[static_cast<std::size_t>(k)] + init.du0_abs[static_cast<std::size_t>(k)]);
    return f;
}

} // namespace

DecayCalibration calibrate_decay(const Trajectory& traj, double R, double delta, double slab_end) {
    const RadialGrid& g = traj.grid;
    const InitialSamples init = initial_samples(traj);
    double max_es1 = 0.0;
    double max_char_c = 0.0;
    for (const Snapshot& snap : traj.snaps) {
        const double t = snap.state.t;
        if (t < 0.0 || t > slab_end) continue;
        const long nt = std::llround(t / g.dr);
        const std::vector<double> wr = radial_derivative(snap.state.w, g.dr);
        for (std::size_t j = 0; j <= g.J; ++j) {
            const double r = g.r(j);
            if (!(r > t + R)) continue;
            max_es1 = std::max(max_es1, std::abs(snap.state.w[j]) * std::pow(r - t, delta));
            // Smallest C making both characteristic ratios <= 1 at this node.
            const long km = static_cast<long>(j) - nt;
            const long kp = static_cast<long>(j) + nt;
            const double zm = std::abs(snap.state.wdot[j] - wr[j]);
            const double zp = std::abs(snap.state.wdot[j] + wr[j]);
            const double fm0 = flux_envelope(init, g, km, 0.0, delta);
            const double fp0 = flux_envelope(init, g, kp, 0.0, delta);
            const double sm = static_cast<double>(km) * g.dr;
            const double sp = static_cast<double>(kp) * g.dr;
            if (zm > fm0) max_char_c = std::max(max_char_c, (zm - fm0) * std::pow(sm, 1.0 + delta));
            if (zp > fp0) max_char_c = std::max(max_char_c, (zp - fp0) * std::pow(sp, 1.0 + delta));
        }
    }
    DecayCalibration cal;
    if (max_es1 > 0.0)
        cal.B1 = std::pow(2.0, std::ceil(std::log2(max_es1)));
    else
        cal.B1 = 1.0;
    // The slab only sees the flux accumulated before slab_end; characteristics
    // sampled later carry the source integral of the whole cone. Its envelope
    // under the es1 bound is B1^3 s^{-1-3delta} integrated along the ray,
    // dominated by B1^3 R^{-2 delta} / (2 (1 - 3 delta)) * s^{-1-delta}.
    const double nonlinear_tail =
        cal.B1 * cal.B1 * cal.B1 * std::pow(R, -2.0 * delta) / (2.0 * (1.0 - 3.0 * delta));
    cal.C = 2.0 * max_char_c + nonlinear_tail;
    return cal;
}

DecayReport exterior_decay_report(const Trajectory& traj, const Parameters& prm, double tol) {
    const RadialGrid& g = traj.grid;
    const InitialSamples init = initial_samples(traj);
    DecayReport rep;
    rep.B1 = prm.B1;
    rep.R = prm.R;
    rep.C = prm.C_flux;
    rep.delta = prm.delta;
    for (const Snapshot& snap : traj.snaps) {
        const double t = snap.state.t;
        if (t < 0.0) continue;
        const long nt = std::llround(t / g.dr);
        const std::vector<double> wr = radial_derivative(snap.state.w, g.dr);
        double es1_here = 0.0, char_here = 0.0;
        for (std::size_t j = 0; j <= g.J; ++j) {
            const double r = g.r(j);
            if (!(r > t + prm.R)) continue;
            ++rep.points;
            es1_here = std::max(es1_here,
                                std::abs(snap.state.w[j]) * std::pow(r - t, prm.delta) / prm.B1);
            const long km = static_cast<long>(j) - nt;
            const long kp = static_cast<long>(j) + nt;
            const double fm = flux_envelope(init, g, km, prm.C_flux, prm.delta);
            const double fp = flux_envelope(init, g, kp, prm.C_flux, prm.delta);
            const double zm = std::abs(snap.state.wdot[j] - wr[j]);
            const double zp = std::abs(snap.state.wdot[j] + wr[j]);
            const double tiny = 1e-300;
            char_here = std::max(char_here, zm / std::max(fm, tiny));
            char_here = std::max(char_here, zp / std::max(fp, tiny));
        }
        rep.series.push_back({t, es1_here, char_here});
        rep.max_es1_ratio = std::max(rep.max_es1_ratio, es1_here);
        rep.max_char_ratio = std::max(rep.max_char_ratio, char_here);
    }
    rep.pass = rep.max_es1_ratio <= 1.0 + tol && rep.max_char_ratio <= 1.0 + tol;
    return rep;
}

std::vector<std::pair<double, double>> energy_series(const Trajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.snaps.size());
    for (const Snapshot& s : traj.snaps)
        out.emplace_back(s.state.t, energy(s.state, traj.grid, traj.profile));
    return out;
}

std::vector<std::pair<double, double>> morawetz_series(const Trajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.snaps.size());
    for (const Snapshot& s : traj.snaps)
        out.emplace_back(s.state.t, morawetz_functional(s.state, traj.grid));
    return out;
}

std::function<bool(double, double)> region_exterior(double R) {
    return [R](double r, double t) { return r > t + R; };
}

std::function<bool(double, double)> region_omega(double t0) {
    return [t0](double r, double t) { return t > t0 && r * r < (t - t0) * (t - t0) - 1.0; };
}

std::function<bool(double, double)> region_K(double t0) {
    return [t0](double r, double t) {
        const double q = (t - t0) * (t - t0) - r * r;
        return t > t0 && t <= 0.0 && q >= std::exp(-2.0) && q <= 1.0;
    };
}

} // namespace rwave
