#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rwave/data.hpp"
#include "rwave/functionals.hpp"
#include "rwave/solver.hpp"
#include "oracles.hpp"

using namespace rwave;

namespace {

DataSpec gaussian_spec(double a = 1.0) {
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Gaussian, a, 1.0, 0.0};
    return spec;
}

ReducedState gaussian_with_radial_velocity(const RadialGrid& g) {
    // u0 = e^{-r^2}, u1 = du0/dr.
    ReducedState s = zero_state(g);
    for (std::size_t j = 0; j <= g.J; ++j) {
        const double r = g.r(j);
        s.w[j] = r * std::exp(-r * r);
        s.wdot[j] = r * (-2.0 * r * std::exp(-r * r));
    }
    return s;
}

} // namespace

TEST_CASE("energy: zero state and gaussian oracle") {
    RadialGrid g = build_grid(18.0, 2048);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    CHECK(energy(zero_state(g), g, prof) == 0.0);

    ReducedState s = synthesize_data(gaussian_spec(), g, 0.5);
    const double impl = energy(s, g, prof);
    const double ref = 4.0 * M_PI * oracle::integrate(
        [](double r) {
            const double du = -2.0 * r * std::exp(-r * r);
            const double u = std::exp(-r * r);
            return (0.5 * du * du + 0.25 * u * u * u * u) * r * r;
        },
        0.0, 18.0);
    CHECK(ref == doctest::Approx(3.127062).epsilon(1e-5));
    CHECK(impl == doctest::Approx(ref).epsilon(2e-4));
}

TEST_CASE("energy with the hyperbolic profile matches its own quadrature") {
    RadialGrid g = build_grid(18.0, 2048);
    const double p = 3.0;
    CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 0.0, p);
    ReducedState s = synthesize_data(gaussian_spec(), g, 0.5);
    const double impl = energy(s, g, prof);
    const double ref = 4.0 * M_PI * oracle::integrate(
        [&](double r) {
            const double du = -2.0 * r * std::exp(-r * r);
            const double u = std::exp(-r * r);
            const double phi = phi_weight(r, p);
            return (0.5 * du * du + 0.25 * phi * u * u * u * u) * r * r;
        },
        0.0, 18.0);
    CHECK(impl == doctest::Approx(ref).epsilon(2e-4));
}

TEST_CASE("morawetz functional: trivial zeros and quadrature oracle") {
    RadialGrid g = build_grid(18.0, 2048);
    CHECK(morawetz_functional(zero_state(g), g) == 0.0);

    ReducedState rest = synthesize_data(gaussian_spec(), g, 0.5);
    CHECK(morawetz_functional(rest, g) == 0.0);  // u_t == 0

    ReducedState s = gaussian_with_radial_velocity(g);
    const double impl = morawetz_functional(s, g);
    const double ref = 4.0 * M_PI * oracle::integrate(
        [](double r) {
            const double wdot = -2.0 * r * r * std::exp(-r * r);
            const double wr = (1.0 - 2.0 * r * r) * std::exp(-r * r);
            return wdot * wr;
        },
        0.0, 18.0);
    CHECK(ref == doctest::Approx(1.968701).epsilon(1e-4));
    CHECK(impl == doctest::Approx(ref).epsilon(2e-4));

    // Hardy-type audit envelope.
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    CHECK(std::abs(impl) <= 4.0 * energy(s, g, prof));
}

TEST_CASE("morawetz envelope |M| <= 4E holds along an evolution") {
    RadialGrid g = build_grid(18.0, 512);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(synthesize_data(gaussian_spec(), g, 0.5), g, prof, 8.0, 32);
    for (const Snapshot& s : traj.snaps)
        CHECK(std::abs(morawetz_functional(s.state, g)) <= 4.0 * energy(s.state, g, prof));
}

TEST_CASE("dissipation check: bound, identity defect, convergence") {
    auto run = [&](std::size_t J) {
        RadialGrid g = build_grid(28.0, J);
        CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
        ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
        Trajectory traj = evolve_leapfrog(data, g, prof, 20.0, static_cast<long>(J / 64));
        return dissipation_check(traj);
    };
    DissipationCheck c1 = run(512);
    DissipationCheck c2 = run(1024);
    CHECK(c2.pass);
    CHECK(c2.accumulated <= 5.0 * c2.energy_first);
    CHECK(c2.identity_defect <= 1e-3 * c2.energy_first);
    CHECK(c1.identity_defect / c2.identity_defect > 2.5);
    CHECK(c1.identity_defect / c2.identity_defect < 6.0);

    // kappa = 0 has no dissipation identity.
    RadialGrid g = build_grid(18.0, 256);
    CoefficientProfile cons(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(synthesize_data(gaussian_spec(), g, 0.5), g, cons, 1.0, 8);
    CHECK_THROWS_AS(dissipation_check(traj), InvalidArgument);
}

TEST_CASE("energy is non-increasing for kappa > 0") {
    RadialGrid g = build_grid(28.0, 1024);
    CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
    Trajectory traj = evolve_leapfrog(synthesize_data(gaussian_spec(), g, 0.5), g, prof, 20.0, 64);
    std::vector<std::pair<double, double>> es = energy_series(traj);
    for (std::size_t i = 1; i < es.size(); ++i)
        CHECK(es[i].second <= es[i - 1].second + 1e-6 * es[0].second);
}

TEST_CASE("morawetz budget: bound and closed-form weight") {
    RadialGrid g = build_grid(28.0, 512);
    CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
    Trajectory traj = evolve_leapfrog(synthesize_data(gaussian_spec(), g, 0.5), g, prof, 12.0, 32);
    BudgetEntry b = morawetz_budget(traj);
    CHECK(b.pass);
    CHECK(b.value > 0.0);
    CHECK(b.value <= b.bound);

    // Closed form of (p-1)phi - s phi' vs a finite-difference derivative of
    // phi_weight: second-order agreement.
    auto weight_err = [&](double h) {
        double worst = 0.0;
        for (double s = 0.3; s < 12.0; s += 0.37) {
            const double fd = 3.0 * phi_weight(s, 4.0) -
                              s * (phi_weight(s + h, 4.0) - phi_weight(s - h, 4.0)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - prof.morawetz_weight(s)));
        }
        return worst;
    };
    const double e1 = weight_err(1e-2);
    const double e2 = weight_err(5e-3);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);

    // Unit profile weight density is (p-1)/r.
    CoefficientProfile unit(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    CHECK(unit.morawetz_weight(2.7) == doctest::Approx(2.0));
}

TEST_CASE("mixed norm: separability, monotonicity, errors") {
    RadialGrid g = build_grid(18.0, 512);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);

    // Constant-in-time trajectory: (T)^{1/2} * spatial L2 norm.
    Trajectory flat{g, prof, g.dr, 4, {}};
    ReducedState s = synthesize_data(gaussian_spec(), g, 0.5);
    for (int m = 0; m <= 8; ++m) {
        Snapshot snap;
        snap.state = s;
        snap.state.t = m * 4 * g.dr;
        flat.snaps.push_back(std::move(snap));
    }
    const double T = flat.t_last();
    const double got = mixed_norm(flat, 2.0, 2.0);
    const std::vector<double> u = recover_u(s.w, g);
    std::vector<double> f(g.points(), 0.0);
    for (std::size_t j = 0; j <= g.J; ++j) f[j] = u[j] * u[j] * 4.0 * M_PI * g.r(j) * g.r(j);
    const double spatial = std::sqrt(trapz(f, g.dr));
    CHECK(got == doctest::Approx(std::sqrt(T) * spatial).epsilon(1e-12));

    // Zero trajectory.
    Trajectory ztraj = evolve_leapfrog(zero_state(g), g, prof, 1.0, 8);
    CHECK(mixed_norm(ztraj, 4.0, 4.0) == 0.0);

    // Monotone in region inclusion and in horizon.
    Trajectory traj = evolve_leapfrog(s, g, prof, 6.0, 16);
    const double full = mixed_norm(traj, 4.0, 4.0);
    const double ext = mixed_norm(traj, 4.0, 4.0, {}, region_exterior(2.0));
    CHECK(ext <= full * (1.0 + 1e-12));
    Trajectory shorter = evolve_leapfrog(s, g, prof, 3.0, 16);
    CHECK(mixed_norm(shorter, 4.0, 4.0) <= full * (1.0 + 1e-12));

    CHECK_THROWS_AS(mixed_norm(traj, 0.5, 4.0), InvalidArgument);
}

TEST_CASE("scattering defect: semigroup exactness and source bound") {
    RadialGrid g = build_grid(18.0, 512);

    // Source off: free evolution is exact on the lattice.
    CoefficientProfile free_prof(CoefficientProfile::Kind::Free, 0.0, 3.0);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    Trajectory lin = evolve_leapfrog(data, g, free_prof, 6.0, 16);
    const double e0 = energy_norm(data, g);
    CHECK(scattering_defect(lin, lin.snaps[4].state.t, lin.snaps.back().state.t) <= 1e-12 * e0);

    // Zero trajectory: defect 0.
    Trajectory z = evolve_leapfrog(zero_state(g), g, free_prof, 2.0, 8);
    CHECK(scattering_defect(z, z.snaps[0].state.t, z.snaps[2].state.t) == 0.0);

    // Nonlinear: defect bounded by the L1L2 source accumulator difference.
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    Trajectory traj = evolve_leapfrog(data, g, prof, 8.0, 16);
    const double t1 = traj.snaps[8].state.t;
    const double t2 = traj.snaps.back().state.t;
    const double defect = scattering_defect(traj, t1, t2);
    const double src = traj.at_time(t2).accums.source_l1l2 - traj.at_time(t1).accums.source_l1l2;
    CHECK(defect <= src * 1.05 + 1e-8);

    CHECK_THROWS_AS(scattering_defect(traj, t2, t1), InvalidArgument);
    CHECK_THROWS_AS(scattering_defect(traj, 0.1234, t2), InvalidArgument);
}

TEST_CASE("scattering profile pullback is consistent on a linear run") {
    RadialGrid g = build_grid(18.0, 512);
    CoefficientProfile free_prof(CoefficientProfile::Kind::Free, 0.0, 3.0);
    ReducedState data = synthesize_data(gaussian_spec(), g, 0.5);
    Trajectory lin = evolve_leapfrog(data, g, free_prof, 5.0, 8);
    ReducedState back = scattering_profile(lin);
    CHECK(back.t == 0.0);
    double dw = 0.0;
    for (std::size_t j = 0; j <= g.J; ++j) dw = std::max(dw, std::abs(back.w[j] - data.w[j]));
    CHECK(dw <= 1e-12);
    // The velocity is reconstructed by centred differencing: O(dr^2).
    double dwd = 0.0;
    for (std::size_t j = 0; j <= g.J; ++j) dwd = std::max(dwd, std::abs(back.wdot[j] - data.wdot[j]));
    CHECK(dwd <= 10.0 * g.dr * g.dr);
}

TEST_CASE("exterior decay: trivial zero and calibrated tail run") {
    Parameters prm;
    prm.epsilon = 0.5;
    prm.delta = 0.1;
    prm.R = 4.0;
    prm.B1 = 1.0;

    RadialGrid g = build_grid(18.0, 1024);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);

    Trajectory z = evolve_leapfrog(zero_state(g), g, prof, 2.0, 16);
    DecayReport zr = exterior_decay_report(z, prm);
    CHECK(zr.max_es1_ratio == 0.0);
    CHECK(zr.max_char_ratio == 0.0);
    CHECK(zr.pass);

    // Tail data: calibrate (B1, C) on t in [0,1], then audit a longer horizon.
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, 0.5, /*cutoff=*/2.0};
    ReducedState data = synthesize_data(spec, g, prm.epsilon);
    Trajectory traj = evolve_leapfrog(data, g, prof, 8.0, 16);
    DecayCalibration cal = calibrate_decay(traj, prm.R, prm.delta);
    CHECK(cal.B1 > 0.0);
    prm.B1 = cal.B1;
    prm.C_flux = cal.C;
    DecayReport rep = exterior_decay_report(traj, prm);
    CHECK(rep.points > 0);
    CHECK(rep.max_es1_ratio <= 1.01);
    CHECK(rep.max_char_ratio <= 1.01);
    CHECK(rep.pass);

    // Compact data far inside R: the exterior region is beyond the light
    // cone of the support, everything vanishes there.
    Parameters far = prm;
    far.R = 9.0;
    DecayReport quiet = exterior_decay_report(traj, far);
    CHECK(quiet.max_es1_ratio <= 1e-12);

    // R beyond the grid: empty table, still a pass, never an error.
    Parameters outside = prm;
    outside.R = 100.0;
    DecayReport empty = exterior_decay_report(traj, outside);
    CHECK(empty.points == 0);
    CHECK(empty.max_es1_ratio == 0.0);
    CHECK(empty.pass);
}

TEST_CASE("region omega is the interior of the unit-shifted cone") {
    auto in = region_omega(-2.0);
    CHECK(in(0.0, 0.0));        // (t-t0)^2 - 1 = 3 > 0
    CHECK(in(1.5, 1.0));        // 9 - 1 = 8 > 2.25
    CHECK_FALSE(in(3.0, 1.0));  // 8 < 9
    CHECK_FALSE(in(0.0, -2.5)); // t <= t0
    CHECK_FALSE(in(0.0, -1.5)); // (t-t0)^2 - 1 = -0.75 < 0
}

TEST_CASE("region K selects the band between the two hyperboloids") {
    const double t0 = -2.0;
    auto in_K = region_K(t0);
    // q = (t-t0)^2 - r^2 must be in [e^{-2}, 1] with t0 < t <= 0.
    CHECK(in_K(0.0, t0 + 1.0));                    // q = 1, t = -1
    CHECK_FALSE(in_K(0.0, t0 + 1.1));              // q > 1
    CHECK(in_K(0.0, t0 + std::exp(-1.0)));         // q = e^{-2}
    CHECK_FALSE(in_K(0.0, t0 + 0.3));              // q < e^{-2}
    CHECK_FALSE(in_K(0.0, 0.5));                   // t > 0
    CHECK(in_K(0.5, -0.9));                        // q = 1.21 - 0.25 = 0.96
}
