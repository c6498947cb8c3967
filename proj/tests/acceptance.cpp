// Acceptance suite: one pass/fail line per criterion, non-zero exit code on
// any failure. Resolutions and tolerances are pinned here, in code.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rwave/data.hpp"
#include "rwave/functionals.hpp"
#include "rwave/solver.hpp"
#include "rwave/transform.hpp"

using namespace rwave;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run_criterion(int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome res;
    try {
        res = fn();
    } catch (const std::exception& e) {
        res.pass = false;
        res.detail = std::string("exception: ") + e.what();
    }
    if (!res.pass) ++g_failures;
    std::printf("[%2d] %-28s %s  %s\n", id, name, res.pass ? "PASS" : "FAIL", res.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

DataSpec gaussian_spec(double a = 1.0) {
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Gaussian, a, 1.0, 0.0};
    return spec;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ---- criterion 1: linear exactness ---------------------------------------

Outcome linear_exactness() {
    RadialGrid g = build_grid(18.0, 2048);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    CoefficientProfile prof(CoefficientProfile::Kind::Free, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(data, g, prof, 10.0, 64);
    const double scale = sup_abs(data.w);
    double worst = 0.0;
    for (const Snapshot& s : traj.snaps) {
        const ReducedState ref = dalembert_free(data, g, s.state.t);
        worst = std::max(worst, sup_diff(s.state.w, ref.w) / scale);
    }
    return {worst <= 1e-12, fmt("sup_rel=%.3e (tol 1e-12, T=10, J=2048)", worst)};
}

// ---- criterion 2: energy conservation ------------------------------------

double drift_at(std::size_t J) {
    RadialGrid g = build_grid(18.0, J);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(data, g, prof, 10.0, static_cast<long>(J / 64));
    const double e0 = energy(traj.snaps.front().state, g, prof);
    double worst = 0.0;
    for (const Snapshot& s : traj.snaps)
        worst = std::max(worst, std::abs(energy(s.state, g, prof) - e0));
    return worst / e0;
}

Outcome energy_conservation() {
    const double d4096 = drift_at(4096);
    const double d2048 = drift_at(2048);
    const double ratio = d2048 / d4096;
    const bool pass = d4096 <= 1e-4 && ratio >= 3.5 && ratio <= 4.5;
    return {pass, fmt("drift(J=4096)=%.3e (tol 1e-4), ratio=%.2f (in [3.5,4.5])", d4096, ratio)};
}

// ---- criterion 3: energy monotonicity and dissipation identity ------------

Outcome dissipation_identity() {
    RadialGrid g = build_grid(28.0, 4096);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
    Trajectory traj = evolve_leapfrog(data, g, prof, 20.0, 64);
    const auto es = energy_series(traj);
    const double e0 = es.front().second;
    double rise = 0.0;
    for (std::size_t i = 1; i < es.size(); ++i)
        rise = std::max(rise, es[i].second - es[i - 1].second);
    const DissipationCheck d = dissipation_check(traj);
    const bool pass = rise <= 1e-6 * e0 && d.identity_defect <= 1e-3 * e0 &&
                      d.accumulated <= 5.0 * e0;
    return {pass, fmt("max_rise=%.2e (tol 1e-6 E0), defect=%.2e (tol 1e-3 E0), acc=%.4f <= %.4f",
                      rise / e0, d.identity_defect / e0, d.accumulated, 5.0 * e0)};
}

// ---- criteria 4 and 9: morawetz budgets and scattering --------------------

struct LongRun {
    RadialGrid grid;
    CoefficientProfile profile;
    Trajectory traj;
};

LongRun long_run(CoefficientProfile::Kind kind, double p) {
    RadialGrid g = build_grid(51.2, 4096);
    const double kappa = kind == CoefficientProfile::Kind::Hyperbolic ? std::max(0.0, p - 3.0) : 0.0;
    CoefficientProfile prof(kind, kappa, p);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    return {g, prof, evolve_leapfrog(data, g, prof, 40.0, 80)};
}

Outcome morawetz_budgets() {
    bool pass = true;
    std::string detail;
    for (const auto& [kind, p] :
         std::vector<std::pair<CoefficientProfile::Kind, double>>{
             {CoefficientProfile::Kind::Unit, 3.0},
             {CoefficientProfile::Kind::Unit, 4.0},
             {CoefficientProfile::Kind::Hyperbolic, 3.0},
             {CoefficientProfile::Kind::Hyperbolic, 4.0}}) {
        const LongRun run = long_run(kind, p);
        const double e0 = energy(run.traj.snaps.front().state, run.grid, run.profile);
        const double b10 = run.traj.at_time(10.0).accums.morawetz;
        const double b20 = run.traj.at_time(20.0).accums.morawetz;
        const double b40 = run.traj.at_time(40.0).accums.morawetz;
        bool monotone = true;
        for (std::size_t i = 1; i < run.traj.snaps.size(); ++i)
            monotone = monotone &&
                       run.traj.snaps[i].accums.morawetz >= run.traj.snaps[i - 1].accums.morawetz;
        const double inc1 = b20 - b10, inc2 = b40 - b20;
        const bool ok = monotone && inc2 <= 0.5 * inc1 && b40 <= 100.0 * e0;
        pass = pass && ok;
        if (!ok)
            detail += fmt("[%s p=%.0f inc1=%.2e inc2=%.2e b40=%.2e E0=%.2e]",
                          kind == CoefficientProfile::Kind::Unit ? "unit" : "hyp", p, inc1, inc2,
                          b40, e0);
    }
    // Closed-form weight vs finite differences at second order.
    CoefficientProfile hyp(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
    auto weight_err = [&](double h) {
        double worst = 0.0;
        for (double s = 0.3; s < 12.0; s += 0.37) {
            const double fd = 3.0 * phi_weight(s, 4.0) -
                              s * (phi_weight(s + h, 4.0) - phi_weight(s - h, 4.0)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - hyp.morawetz_weight(s)));
        }
        return worst;
    };
    const double wratio = weight_err(1e-2) / weight_err(5e-3);
    const bool wok = wratio >= 3.5 && wratio <= 4.5;
    pass = pass && wok;
    if (detail.empty()) detail = fmt("4 profile/p combos ok, weight_fd_ratio=%.2f", wratio);
    return {pass, detail};
}

Outcome scattering_signature() {
    const LongRun run = long_run(CoefficientProfile::Kind::Unit, 3.0);
    const double e0 = energy(run.traj.snaps.front().state, run.grid, run.profile);
    const double d1 = scattering_defect(run.traj, 10.0, 20.0);
    const double d2 = scattering_defect(run.traj, 20.0, 40.0);
    const double i20 = run.traj.at_time(20.0).accums.lp2p2;
    const double i40 = run.traj.at_time(40.0).accums.lp2p2;
    const bool pass = d1 > d2 && d2 <= 1e-2 * std::sqrt(e0) && (i40 - i20) <= 0.1 * i20;
    return {pass, fmt("defect(10,20)=%.3e > defect(20,40)=%.3e <= %.3e, dI/I(20)=%.3f (tol 0.1)",
                      d1, d2, 1e-2 * std::sqrt(e0), (i40 - i20) / i20)};
}

// ---- criterion 5: transform fidelity --------------------------------------

Outcome transform_fidelity() {
    auto bump = [](double r, double t) {
        const double dr = r - 5.0, dt = t + 5.0;
        return std::exp(-dr * dr - dt * dt);
    };
    const Box2 rt{3.0, 7.0, -7.0, -3.0};
    const double t3 = commutator_residual_T3(bump, rt, 0.02) /
                      commutator_residual_T3(bump, rt, 0.01);
    const Box2 stau{0.4, 1.4, 1.1, 2.1};
    const double t4 = commutator_residual_T4(bump, -12.0, stau, 0.02) /
                      commutator_residual_T4(bump, -12.0, stau, 0.01);

    auto residual = [&](std::size_t J) {
        RadialGrid g = build_grid(12.0, J);
        ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        Trajectory traj = evolve_leapfrog(data, g, prof, 4.0, 1, -2.0);
        HyperboloidalChart chart = make_chart(-std::sqrt(2.0) - 1.0, 2.0, 50, -0.5, 0.5, 25);
        return cp2_residual_max(push_forward(traj, chart), 3.0);
    };
    const double cp2_ratio = residual(1024) / residual(2048);

    const bool pass = t3 >= 3.5 && t3 <= 4.5 && t4 >= 3.5 && t4 <= 4.5 && cp2_ratio >= 3.5;
    return {pass, fmt("T3 ratio=%.2f, T4 ratio=%.2f (in [3.5,4.5]), CP2 ratio=%.2f (>= 3.5)", t3,
                      t4, cp2_ratio)};
}

// ---- criterion 6: change of variables --------------------------------------

Outcome change_of_variables() {
    auto g_density = [](double r, double t) {
        const double a = r - 1.0, b = t - 2.5;
        return std::exp(-(a * a + b * b) / (0.25 * 0.25));
    };
    const CovCheck res = change_of_variables_check(g_density, -2.0, Box2{0.0, 2.6, 1.0, 4.0},
                                                   Box2{0.0, 1.1, 0.7, 1.9}, 2048);
    return {res.rel_diff <= 1e-3,
            fmt("rel_diff=%.3e (tol 1e-3, n=2048)", res.rel_diff)};
}

// ---- criterion 7: transformed energy finiteness -----------------------------

double transformed_energy_min(std::size_t J) {
    RadialGrid g = build_grid(16.0, J);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(data, g, prof, 7.7, 1, -2.1);
    HyperboloidalChart chart = make_chart(-std::sqrt(2.0) - 1.0, 3.0, 240, -1.0, 0.0, 40);
    const TransformedTrajectory vt = push_forward(traj, chart);
    double m = 0.0;
    bool first = true;
    for (const TransformedSlice& sl : vt.slices) {
        const double e = transformed_energy(sl, chart, 3.0).total;
        if (first || e < m) m = e;
        first = false;
    }
    return m;
}

Outcome transformed_energy_uniform() {
    const double m2048 = transformed_energy_min(2048);
    const double m4096 = transformed_energy_min(4096);
    const double rel = std::abs(m2048 - m4096) / m4096;
    return {rel <= 0.05,
            fmt("min E(tau) J=2048: %.6f, J=4096: %.6f, rel change %.3f%% (tol 5%%)", m2048,
                m4096, 100.0 * rel)};
}

// ---- criterion 8: backend equivalence ---------------------------------------

Outcome backend_equivalence() {
    bool pass = true;
    std::string detail;
    for (const std::size_t J : {static_cast<std::size_t>(512), static_cast<std::size_t>(1024)}) {
        RadialGrid g = build_grid(12.0, J);
        ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        const PicardResult pr = picard_solve(data, g, prof, 0.5, 8);
        const Trajectory lf = evolve_leapfrog(data, g, prof, 0.5, 1);
        double gap = 0.0;
        for (std::size_t i = 0; i < pr.trajectory.snaps.size(); ++i)
            gap = std::max(gap, sup_diff(pr.trajectory.snaps[i].state.w, lf.snaps[i].state.w));
        const double bound = 10.0 * g.dr * g.dr;
        pass = pass && gap <= bound;
        detail += fmt("J=%zu gap=%.3e<=%.3e ", J, gap, bound);
    }
    return {pass, detail};
}

// ---- criterion 10: exterior decay --------------------------------------------

Outcome exterior_decay() {
    RadialGrid g = build_grid(56.0, 8192);
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, 0.5, 4.0};
    Parameters prm;
    prm.p = 3.0;
    prm.epsilon = 0.5;
    prm.delta = 0.1;
    prm.R = 8.0;  // twice the data cutoff
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(synthesize_data(spec, g, prm.epsilon), g, prof, 40.0, 64);
    const DecayCalibration cal = calibrate_decay(traj, prm.R, prm.delta);
    prm.B1 = cal.B1;
    prm.C_flux = cal.C;
    const DecayReport rep = exterior_decay_report(traj, prm);
    const bool pass = rep.pass && rep.points > 0;
    return {pass, fmt("es1=%.4f, flux=%.4f (tol 1.01), B1=%.4g C=%.3g over %zu samples",
                      rep.max_es1_ratio, rep.max_char_ratio, rep.B1, rep.C, rep.points)};
}

// ---- criterion 11: continuous dependence --------------------------------------

Outcome continuous_dependence() {
    RadialGrid g = build_grid(13.0, 2048);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory base = evolve_leapfrog(synthesize_data(gaussian_spec(), g, 0.5), g, prof, 5.0, 64);
    const ReducedState& end0 = base.snaps.back().state;
    std::vector<double> ratios;
    for (const double eta : {1e-2, 1e-3, 1e-4}) {
        Trajectory pert =
            evolve_leapfrog(synthesize_data(gaussian_spec(1.0 + eta), g, 0.5), g, prof, 5.0, 64);
        const ReducedState& end = pert.snaps.back().state;
        std::vector<double> dw(end.w.size()), dwd(end.w.size());
        for (std::size_t j = 0; j < dw.size(); ++j) {
            dw[j] = end.w[j] - end0.w[j];
            dwd[j] = end.wdot[j] - end0.wdot[j];
        }
        ratios.push_back(energy_norm(dw, dwd, g) / eta);
    }
    const double lo = std::min({ratios[0], ratios[1], ratios[2]});
    const double hi = std::max({ratios[0], ratios[1], ratios[2]});
    return {hi / lo <= 2.0,
            fmt("diff/eta = {%.4f, %.4f, %.4f}, spread %.3f (tol 2)", ratios[0], ratios[1],
                ratios[2], hi / lo)};
}

} // namespace

int main() {
    std::printf("radialwave acceptance suite\n");
    run_criterion(1, "linear-exactness", linear_exactness);
    run_criterion(2, "energy-conservation", energy_conservation);
    run_criterion(3, "dissipation-identity", dissipation_identity);
    run_criterion(4, "morawetz-budget", morawetz_budgets);
    run_criterion(5, "transform-fidelity", transform_fidelity);
    run_criterion(6, "change-of-variables", change_of_variables);
    run_criterion(7, "transformed-energy", transformed_energy_uniform);
    run_criterion(8, "backend-equivalence", backend_equivalence);
    run_criterion(9, "scattering-signature", scattering_signature);
    run_criterion(10, "exterior-decay", exterior_decay);
    run_criterion(11, "continuous-dependence", continuous_dependence);
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria PASS\n");
    return 0;
}
