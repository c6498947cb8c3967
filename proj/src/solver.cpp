#include "rwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rwave/errors.hpp"

namespace rwave {

namespace {

constexpr double kBlowupThreshold = 1e12;

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::llround(x)) <= tol; }

double abs_power(double x, double q) {
    const double a = std::abs(x);
    const long qi = std::lround(q);
    if (std::abs(q - static_cast<double>(qi)) < 1e-12) {
        switch (qi) {
            case 2: return a * a;
            case 3: return a * a * a;
            case 4: { const double a2 = a * a; return a2 * a2; }
            case 5: { const double a2 = a * a; return a2 * a2 * a; }
            case 6: { const double a2 = a * a; return a2 * a2 * a2; }
            case 8: { const double a2 = a * a; const double a4 = a2 * a2; return a4 * a4; }
            default: break;
        }
    }
    return std::pow(a, q);
}

// Per-grid tables for the source and the accumulator densities.
struct SourceTables {
    std::vector<double> src;          // phi_j / r_j^{p-1}
    std::vector<double> mw;           // morawetz_weight(r_j) / r_j^p
    std::vector<double> lp;           // r_j^{-(2p-4)}
    std::vector<double> src_sq;       // phi_j^2 / r_j^{2p-2}
    double p = 3.0, kappa = 0.0;

    SourceTables(const RadialGrid& g, const CoefficientProfile& prof)
        : src(g.points(), 0.0), mw(g.points(), 0.0), lp(g.points(), 0.0), src_sq(g.points(), 0.0),
          p(prof.p()), kappa(prof.kappa()) {
        for (std::size_t j = 1; j <= g.J; ++j) {
            const double r = g.r(j);
            const double phi = prof.phi(r);
            const double rp1 = std::pow(r, p - 1.0);
            src[j] = phi / rp1;
            mw[j] = prof.morawetz_weight(r) / std::pow(r, p);
            lp[j] = std::pow(r, -(2.0 * p - 4.0));
            src_sq[j] = phi * phi / (rp1 * rp1);
        }
    }
};

struct Densities {
    double diss = 0.0, mora = 0.0, lp = 0.0, src = 0.0;
};

// Spatial quadratures entering the accumulators, evaluated on one level.
// All integrands vanish at r = 0.
Densities level_densities(const std::vector<double>& w, double t, const SourceTables& tab, double dr) {
    Densities d;
    const std::size_t n = w.size();
    double s_diss = 0.0, s_mora = 0.0, s_lp = 0.0, s_src = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double weight = (j + 1 == n) ? 0.5 : 1.0;
        const double wp1 = abs_power(w[j], tab.p + 1.0);
        s_diss += weight * tab.src[j] * wp1;
        s_mora += weight * tab.mw[j] * wp1;
        s_lp += weight * tab.lp[j] * abs_power(w[j], 2.0 * tab.p - 2.0);
        s_src += weight * tab.src_sq[j] * abs_power(w[j], 2.0 * tab.p);
    }
    const double damp = std::exp(-tab.kappa * t);
    d.diss = damp * 4.0 * M_PI * dr * s_diss;
    d.mora = damp * 4.0 * M_PI * dr * s_mora;
    d.lp = 4.0 * M_PI * dr * s_lp;
    d.src = damp * std::sqrt(4.0 * M_PI * dr * s_src);
    return d;
}

void add_increment(TrajAccums& a, const Densities& d0, const Densities& d1, double dt) {
    a.dissipation += 0.5 * (d0.diss + d1.diss) * dt;
    a.morawetz += 0.5 * (d0.mora + d1.mora) * dt;
    a.lp2p2 += 0.5 * (d0.lp + d1.lp) * dt;
    a.source_l1l2 += 0.5 * (d0.src + d1.src) * dt;
}

void check_finite(const std::vector<double>& w, long step, double time_sign) {
    for (double x : w) {
        if (!(std::abs(x) <= kBlowupThreshold))
            throw NumericalBlowup("numerical blow-up at step " + std::to_string(step) +
                                      (time_sign < 0 ? " (backward sweep)" : ""),
                                  step);
    }
}

struct SweepResult {
    std::vector<Snapshot> snaps;  // internal levels 0, stride, ..., M
    TrajAccums totals;
};

// One leapfrog sweep of M steps in internal time tau >= 0; physical time is
// time_sign * tau. `keep_next` stores the +1 level at each snapshot,
// `next_is_prev` stores the -1 level instead (backward sweeps, where the
// physically later level is the internally earlier one).
SweepResult sweep(const std::vector<double>& w0, const std::vector<double>& g0, const RadialGrid& g,
                  const SourceTables& tab, long M, long stride, double time_sign, bool keep_next,
                  bool next_is_prev) {
    const std::size_t n = g.points();
    const double dt = g.dr;
    const double dt2 = dt * dt;
    SweepResult out;
    out.snaps.reserve(static_cast<std::size_t>(M / stride) + 1);

    auto source = [&](const std::vector<double>& w, std::size_t j, double t_phys) {
        return -tab.src[j] * std::exp(-tab.kappa * t_phys) * signed_power(w[j], tab.p);
    };

    std::vector<double> prev = w0;  // level 0
    std::vector<double> cur(n, 0.0), next(n, 0.0);

    // First step: Taylor start with the velocity integral split over the
    // neighbouring half-cells, which matches the trapezoid d'Alembert
    // formula exactly on the lattice.
    cur[0] = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        cur[j] = 0.5 * (prev[j + 1] + prev[j - 1]) +
                 dt * (0.25 * g0[j - 1] + 0.5 * g0[j] + 0.25 * g0[j + 1]) +
                 0.5 * dt2 * source(prev, j, 0.0);
    }
    cur[n - 1] = prev[n - 2];
    check_finite(cur, 1, time_sign);

    Densities d_cur_level = level_densities(prev, 0.0, tab, g.dr);  // level 0
    Densities d_next_level = level_densities(cur, time_sign * dt, tab, g.dr);
    TrajAccums run_cur;  // accumulators at level 0
    TrajAccums run_next = run_cur;
    add_increment(run_next, d_cur_level, d_next_level, dt);

    // At stride 1 consecutive snapshots are adjacent levels already, so the
    // extra level is only stored for the final snapshot.
    auto keep_level = [&](long level) { return keep_next && (stride > 1 || level == M); };

    // Snapshot of level 0: exact initial velocity.
    {
        Snapshot s;
        s.state = ReducedState{0.0, prev, g0};
        if (keep_level(0) && !next_is_prev) s.w_next = cur;
        s.accums = run_cur;
        out.snaps.push_back(std::move(s));
    }

    d_cur_level = d_next_level;
    run_cur = run_next;  // at level 1

    for (long m = 2; m <= M + 1; ++m) {
        const double t_src = time_sign * static_cast<double>(m - 1) * dt;
        next[0] = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j)
            next[j] = cur[j + 1] + cur[j - 1] - prev[j] + dt2 * source(cur, j, t_src);
        next[n - 1] = cur[n - 2];
        check_finite(next, m, time_sign);

        if (m <= M) {
            d_next_level = level_densities(next, time_sign * static_cast<double>(m) * dt, tab, g.dr);
            run_next = run_cur;
            add_increment(run_next, d_cur_level, d_next_level, dt);
        }

        if ((m - 1) % stride == 0) {
            Snapshot s;
            std::vector<double> wdot(n);
            for (std::size_t j = 0; j < n; ++j) wdot[j] = (next[j] - prev[j]) / (2.0 * dt);
            s.state = ReducedState{time_sign * static_cast<double>(m - 1) * dt, cur, std::move(wdot)};
            if (keep_level(m - 1)) s.w_next = next_is_prev ? prev : next;
            s.accums = run_cur;
            out.snaps.push_back(std::move(s));
        }

        std::swap(prev, cur);
        std::swap(cur, next);
        run_cur = run_next;
        d_cur_level = d_next_level;
    }
    out.totals = out.snaps.back().accums;
    return out;
}

long round_up_steps(double span, double dt, long stride) {
    long steps = static_cast<long>(std::ceil(span / dt - 1e-9));
    steps = std::max<long>(steps, 1);
    const long rem = steps % stride;
    if (rem != 0) steps += stride - rem;
    return steps;
}

} // namespace

double signed_power(double u, double p) {
    const long pi = std::lround(p);
    if (std::abs(p - static_cast<double>(pi)) < 1e-12) {
        if (pi == 3) return u * u * u;
        if (pi == 4) return u * u * u * std::abs(u);
    }
    return std::copysign(std::pow(std::abs(u), p), u);
}

std::size_t Trajectory::index_of(double t) const {
    const double step = snap_dt();
    const double x = (t - t_first()) / step;
    const long i = std::llround(x);
    if (i < 0 || i >= static_cast<long>(snaps.size()) ||
        std::abs(snaps[static_cast<std::size_t>(i)].state.t - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw InvalidArgument("trajectory: time " + std::to_string(t) + " is not a stored snapshot");
    return static_cast<std::size_t>(i);
}

std::pair<const std::vector<double>*, const std::vector<double>*> Trajectory::level_pair(
    std::size_t i) const {
    if (i >= snaps.size()) throw InvalidArgument("trajectory: snapshot index out of range");
    const Snapshot& s = snaps[i];
    if (!s.w_next.empty()) return {&s.state.w, &s.w_next};
    if (stride == 1 && i + 1 < snaps.size()) return {&s.state.w, &snaps[i + 1].state.w};
    throw InvalidArgument("trajectory: snapshot has no adjacent level for an exact restart");
}

ReducedState dalembert_free(const ReducedState& state0, const RadialGrid& grid, double t) {
    check_state(state0, grid);
    const double dt = grid.dr;
    const double shift = (t - state0.t) / dt;
    if (shift < -1e-9) throw InvalidArgument("dalembert_free: t must be >= the state time");
    if (std::abs(shift) <= 1e-9) {
        ReducedState copy = state0;
        copy.t = t;
        return copy;
    }

    const std::vector<double>& f = state0.w;
    const std::vector<double>& gv = state0.wdot;
    const long J = static_cast<long>(grid.J);

    // Trapezoid cumulative of the velocity; even extension of the integral,
    // constant beyond the grid (zero extension of the data).
    std::vector<double> G(grid.points(), 0.0);
    for (long k = 1; k <= J; ++k)
        G[static_cast<std::size_t>(k)] =
            G[static_cast<std::size_t>(k - 1)] +
            0.5 * dt * (gv[static_cast<std::size_t>(k - 1)] + gv[static_cast<std::size_t>(k)]);

    auto odd_f = [&](long k) -> double {
        if (k >= 0) return k <= J ? f[static_cast<std::size_t>(k)] : 0.0;
        return -(-k <= J ? f[static_cast<std::size_t>(-k)] : 0.0);
    };
    auto even_G = [&](long k) -> double {
        const long a = std::min(std::llabs(k), static_cast<long long>(J));
        return G[static_cast<std::size_t>(a)];
    };

    auto value_at = [&](long j, long n) {
        return 0.5 * (odd_f(j - n) + odd_f(j + n)) + 0.5 * (even_G(j + n) - even_G(j - n));
    };

    ReducedState out = zero_state(grid, t);
    if (near_integer(shift)) {
        const long n = std::llround(shift);
        for (long j = 0; j <= J; ++j) {
            out.w[static_cast<std::size_t>(j)] = value_at(j, n);
            out.wdot[static_cast<std::size_t>(j)] =
                (value_at(j, n + 1) - value_at(j, n - 1)) / (2.0 * dt);
        }
    } else {
        // Off-lattice offset: linearly interpolate the two bracketing lattice
        // evolutions (second order, used only by diagnostic callers).
        const long n0 = static_cast<long>(std::floor(shift));
        const double a = shift - static_cast<double>(n0);
        for (long j = 0; j <= J; ++j) {
            const double w0 = value_at(j, n0), w1 = value_at(j, n0 + 1);
            out.w[static_cast<std::size_t>(j)] = (1.0 - a) * w0 + a * w1;
            const double wm = value_at(j, n0 - 1), wp = value_at(j, n0 + 2);
            out.wdot[static_cast<std::size_t>(j)] =
                ((1.0 - a) * (w1 - wm) + a * (wp - w0)) / (2.0 * dt);
        }
    }
    out.w[0] = 0.0;
    return out;
}

Trajectory evolve_leapfrog(const ReducedState& state0, const RadialGrid& grid,
                           const CoefficientProfile& profile, double T, long stride,
                           double t_begin) {
    check_state(state0, grid);
    if (std::abs(state0.t) > 1e-12) throw InvalidArgument("evolve_leapfrog: data must be at t = 0");
    if (!(T > 0.0)) throw InvalidArgument("evolve_leapfrog: T must be positive");
    if (stride < 1) throw InvalidArgument("evolve_leapfrog: stride must be >= 1");
    if (t_begin > 0.0) throw InvalidArgument("evolve_leapfrog: t_begin must be <= 0");
    if (t_begin < 0.0 && profile.kappa() != 0.0)
        throw InvalidArgument("evolve_leapfrog: backward evolution requires kappa = 0");

    const double dt = grid.dr;
    const SourceTables tab(grid, profile);
    const long Mf = round_up_steps(T, dt, stride);

    SweepResult fwd = sweep(state0.w, state0.wdot, grid, tab, Mf, stride, +1.0,
                            /*keep_next=*/true, /*next_is_prev=*/false);

    Trajectory traj{grid, profile, dt, stride, {}};
    if (t_begin < 0.0) {
        const long Mb = round_up_steps(-t_begin, dt, stride);
        std::vector<double> gneg(state0.wdot.size());
        for (std::size_t j = 0; j < gneg.size(); ++j) gneg[j] = -state0.wdot[j];
        SweepResult bwd = sweep(state0.w, gneg, grid, tab, Mb, stride, -1.0,
                                /*keep_next=*/true, /*next_is_prev=*/true);
        // Reverse the backward snapshots into ascending physical time,
        // flipping velocities and re-anchoring the accumulators at t_begin.
        traj.snaps.reserve(bwd.snaps.size() - 1 + fwd.snaps.size());
        for (std::size_t k = bwd.snaps.size(); k-- > 1;) {
            Snapshot s = std::move(bwd.snaps[k]);
            // Timestamps already carry the physical sign; the reflected
            // velocity does not.
            for (double& x : s.state.wdot) x = -x;
            TrajAccums a;
            a.dissipation = bwd.totals.dissipation - s.accums.dissipation;
            a.morawetz = bwd.totals.morawetz - s.accums.morawetz;
            a.lp2p2 = bwd.totals.lp2p2 - s.accums.lp2p2;
            a.source_l1l2 = bwd.totals.source_l1l2 - s.accums.source_l1l2;
            s.accums = a;
            traj.snaps.push_back(std::move(s));
        }
        for (Snapshot& s : fwd.snaps) {
            s.accums.dissipation += bwd.totals.dissipation;
            s.accums.morawetz += bwd.totals.morawetz;
            s.accums.lp2p2 += bwd.totals.lp2p2;
            s.accums.source_l1l2 += bwd.totals.source_l1l2;
            traj.snaps.push_back(std::move(s));
        }
    } else {
        traj.snaps = std::move(fwd.snaps);
    }
    return traj;
}

PicardResult picard_solve(const ReducedState& state0, const RadialGrid& grid,
                          const CoefficientProfile& profile, double T, int iters) {
    check_state(state0, grid);
    if (std::abs(state0.t) > 1e-12) throw InvalidArgument("picard_solve: data must be at t = 0");
    if (!(T > 0.0)) throw InvalidArgument("picard_solve: T must be positive");
    if (iters < 1) throw InvalidArgument("picard_solve: iters must be >= 1");

    const double dt = grid.dr;
    const long J = static_cast<long>(grid.J);
    const long N = std::max<long>(1, static_cast<long>(std::ceil(T / dt - 1e-9)));
    const std::size_t n = grid.points();
    const SourceTables tab(grid, profile);

    // Free part, exact on the lattice.
    std::vector<std::vector<double>> Wfree(static_cast<std::size_t>(N + 1));
    for (long m = 0; m <= N; ++m)
        Wfree[static_cast<std::size_t>(m)] =
            dalembert_free(state0, grid, static_cast<double>(m) * dt).w;

    std::vector<std::vector<double>> W = Wfree;  // iterate 1 = free + Duhamel(0)
    std::vector<double> gaps;
    {
        double g0 = 0.0;
        for (const auto& lvl : Wfree)
            for (double x : lvl) g0 = std::max(g0, std::abs(x));
        gaps.push_back(g0);
    }

    std::vector<std::vector<double>> Scum(static_cast<std::size_t>(N + 1),
                                          std::vector<double>(n, 0.0));
    auto even_cum = [&](const std::vector<double>& c, long k) {
        const long a = std::min(std::llabs(k), static_cast<long long>(J));
        return c[static_cast<std::size_t>(a)];
    };

    int rising = 0;
    for (int it = 2; it <= iters; ++it) {
        // Source of the current iterate, cumulative trapezoid in r per level.
        for (long m = 0; m <= N; ++m) {
            const auto& w = W[static_cast<std::size_t>(m)];
            auto& c = Scum[static_cast<std::size_t>(m)];
            const double damp = std::exp(-tab.kappa * static_cast<double>(m) * dt);
            double prev_s = 0.0;
            c[0] = 0.0;
            for (std::size_t j = 1; j < n; ++j) {
                const double s = -tab.src[j] * damp * signed_power(w[j], tab.p);
                c[j] = c[j - 1] + 0.5 * dt * (prev_s + s);
                prev_s = s;
            }
        }
        double gap = 0.0;
        for (long m = 1; m <= N; ++m) {
            auto& row = W[static_cast<std::size_t>(m)];
            const auto& free_row = Wfree[static_cast<std::size_t>(m)];
            for (long j = 0; j <= J; ++j) {
                double duh = 0.0;
                for (long i = 0; i < m; ++i) {
                    const long d = m - i;
                    const auto& c = Scum[static_cast<std::size_t>(i)];
                    const double inner = even_cum(c, j + d) - even_cum(c, j - d);
                    duh += (i == 0 ? 0.5 : 1.0) * inner;
                }
                const double val = free_row[static_cast<std::size_t>(j)] + 0.5 * dt * duh;
                gap = std::max(gap, std::abs(val - row[static_cast<std::size_t>(j)]));
                row[static_cast<std::size_t>(j)] = val;
            }
        }
        if (!std::isfinite(gap))
            throw NoContraction("picard_solve: iterate diverged (non-finite gap) at iteration " +
                                std::to_string(it) + "; interval too long");
        rising = gap > gaps.back() ? rising + 1 : 0;
        gaps.push_back(gap);
        if (rising >= 3)
            throw NoContraction("picard_solve: iterate gap grew for 3 consecutive iterations "
                                "(last gap " + std::to_string(gap) + "); interval too long");
    }

    PicardResult out{Trajectory{grid, profile, dt, 1, {}}, gaps};
    out.trajectory.snaps.resize(static_cast<std::size_t>(N + 1));
    for (long m = 0; m <= N; ++m) {
        Snapshot& s = out.trajectory.snaps[static_cast<std::size_t>(m)];
        s.state.t = static_cast<double>(m) * dt;
        s.state.w = W[static_cast<std::size_t>(m)];
        s.state.wdot.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (m == 0)
                s.state.wdot[j] = state0.wdot[j];
            else if (m == N)
                s.state.wdot[j] = (3.0 * W[static_cast<std::size_t>(N)][j] -
                                   4.0 * W[static_cast<std::size_t>(N - 1)][j] +
                                   W[static_cast<std::size_t>(N - 2)][j]) /
                                  (2.0 * dt);
            else
                s.state.wdot[j] = (W[static_cast<std::size_t>(m + 1)][j] -
                                   W[static_cast<std::size_t>(m - 1)][j]) /
                                  (2.0 * dt);
        }
    }
    // Accumulators by a prefix pass over the lattice levels.
    Densities d_prev = level_densities(W[0], 0.0, tab, grid.dr);
    for (long m = 1; m <= N; ++m) {
        Densities d = level_densities(W[static_cast<std::size_t>(m)],
                                      static_cast<double>(m) * dt, tab, grid.dr);
        TrajAccums a = out.trajectory.snaps[static_cast<std::size_t>(m - 1)].accums;
        add_increment(a, d_prev, d, dt);
        out.trajectory.snaps[static_cast<std::size_t>(m)].accums = a;
        d_prev = d;
    }
    return out;
}

std::vector<ResidualSample> pde_residual(const Trajectory& traj, const CoefficientProfile& profile,
                                         int order) {
    if (order != 2 && order != 4) throw InvalidArgument("pde_residual: order must be 2 or 4");
    const std::size_t need = order == 2 ? 3 : 5;
    if (traj.snaps.size() < need)
        throw InvalidArgument("pde_residual: need at least " + std::to_string(need) +
                              " stored snapshots");
    const long off = order == 2 ? 1 : 2;
    const RadialGrid& g = traj.grid;
    const double DT = traj.snap_dt();
    const double dr = g.dr;
    const SourceTables tab(g, profile);

    std::vector<ResidualSample> out;
    for (std::size_t c = static_cast<std::size_t>(off); c + static_cast<std::size_t>(off) < traj.snaps.size(); ++c) {
        const double t = traj.snaps[c].state.t;
        const double damp = std::exp(-tab.kappa * t);
        double max_abs = 0.0, sum_sq = 0.0;
        const long lastj = static_cast<long>(g.J) - off;
        for (long j = off; j <= lastj; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            double dtt, drr;
            if (order == 2) {
                dtt = (traj.snaps[c + 1].state.w[ju] - 2.0 * traj.snaps[c].state.w[ju] +
                       traj.snaps[c - 1].state.w[ju]) /
                      (DT * DT);
                drr = (traj.snaps[c].state.w[ju + 1] - 2.0 * traj.snaps[c].state.w[ju] +
                       traj.snaps[c].state.w[ju - 1]) /
                      (dr * dr);
            } else {
                dtt = (-traj.snaps[c + 2].state.w[ju] + 16.0 * traj.snaps[c + 1].state.w[ju] -
                       30.0 * traj.snaps[c].state.w[ju] + 16.0 * traj.snaps[c - 1].state.w[ju] -
                       traj.snaps[c - 2].state.w[ju]) /
                      (12.0 * DT * DT);
                const auto& w = traj.snaps[c].state.w;
                drr = (-w[ju + 2] + 16.0 * w[ju + 1] - 30.0 * w[ju] + 16.0 * w[ju - 1] - w[ju - 2]) /
                      (12.0 * dr * dr);
            }
            const double res =
                dtt - drr + tab.src[ju] * damp * signed_power(traj.snaps[c].state.w[ju], tab.p);
            max_abs = std::max(max_abs, std::abs(res));
            sum_sq += res * res;
        }
        out.push_back({t, max_abs, std::sqrt(sum_sq * dr)});
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> free_propagate_pair(
    const std::vector<double>& w_at, const std::vector<double>& w_next, long steps) {
    if (w_at.size() != w_next.size() || w_at.size() < 3)
        throw InvalidArgument("free_propagate_pair: mismatched or too small level arrays");
    const bool backward = steps < 0;
    std::vector<double> prev = backward ? w_next : w_at;
    std::vector<double> cur = backward ? w_at : w_next;
    const std::size_t n = prev.size();
    std::vector<double> next(n, 0.0);
    for (long m = 0; m < std::labs(steps); ++m) {
        next[0] = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) next[j] = cur[j + 1] + cur[j - 1] - prev[j];
        next[n - 1] = cur[n - 2];
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    if (backward) return {cur, prev};
    return {prev, cur};
}

} // namespace rwave
