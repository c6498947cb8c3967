#include <doctest.h>

#include <cmath>
#include <random>

#include "rwave/data.hpp"
#include "rwave/grid.hpp"
#include "rwave/params.hpp"
#include "rwave/state.hpp"
#include "oracles.hpp"

using namespace rwave;

TEST_CASE("build_grid basics") {
    RadialGrid g = build_grid(1.0, 8);
    CHECK(g.dr == doctest::Approx(0.125));
    CHECK(g.r(3) == doctest::Approx(0.375));
    CHECK(g.r_max() == doctest::Approx(1.0));

    RadialGrid g2 = build_grid(40.0, 4096);
    CHECK(g2.dr == doctest::Approx(40.0 / 4096.0));

    CHECK_THROWS_AS(build_grid(0.0, 8), InvalidArgument);
    CHECK_THROWS_AS(build_grid(-1.0, 64), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1.0, 7), InvalidArgument);
}

TEST_CASE("parameter derivation and validation") {
    Parameters prm;
    prm.epsilon = 0.5;
    prm.R = 1.0;
    prm = derive(prm);
    CHECK(prm.delta == doctest::Approx(0.1));
    CHECK(prm.t0 == doctest::Approx(-std::sqrt(2.0) - 1.0));

    Parameters small = prm;
    small.epsilon = 0.05;
    small = derive(small);
    CHECK(small.delta == doctest::Approx(0.025));

    Parameters bad = prm;
    bad.p = 5.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = prm;
    bad.t0 = -0.5;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = prm;
    bad.delta = 0.2;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("synthesize_data: zero and gaussian") {
    RadialGrid g = build_grid(40.0, 4096);

    DataSpec zero;
    ReducedState zs = synthesize_data(zero, g, 0.5);
    for (double x : zs.w) CHECK(x == 0.0);
    for (double x : zs.wdot) CHECK(x == 0.0);

    // On a grid where r = 1 is a node, w(1) = 1 * exp(-1).
    RadialGrid g1 = build_grid(32.0, 4096);
    DataSpec gauss;
    gauss.u0 = {DataComponent::Family::Gaussian, 1.0, 1.0, 0.0};
    ReducedState s = synthesize_data(gauss, g1, 0.5);
    CHECK(s.w[0] == 0.0);
    const std::size_t j1 = static_cast<std::size_t>(std::llround(1.0 / g1.dr));
    CHECK(g1.r(j1) == doctest::Approx(1.0));
    CHECK(s.w[j1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("synthesize_data rejects bad tails and oversized supports") {
    RadialGrid g = build_grid(40.0, 1024);
    DataSpec bad;
    bad.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, /*eta=*/0.0, /*cutoff=*/4.0};
    CHECK_THROWS_AS(synthesize_data(bad, g, 0.5), InvalidArgument);

    DataSpec wide;
    wide.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, 0.5, /*cutoff=*/8.0};
    // support 3*cutoff = 24 > r_max/2 = 20
    CHECK_THROWS_AS(synthesize_data(wide, g, 0.5), InvalidArgument);
}

namespace {

double gauss_du0(double r) { return -2.0 * r * std::exp(-r * r); }

} // namespace

TEST_CASE("weighted_data_norm against quadrature oracle") {
    const double eps = 0.5;
    RadialGrid g = build_grid(18.0, 2048);
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Gaussian, 1.0, 1.0, 0.0};
    ReducedState s = synthesize_data(spec, g, eps);

    WeightedNorms n = weighted_data_norm(s, g, eps);

    const double mu2 = 4.0 * M_PI * oracle::integrate(
        [&](double r) {
            const double d = gauss_du0(r);
            return d * d * r * r * std::pow(1.0 + r, 1.0 + 2.0 * eps);
        },
        0.0, 18.0);
    const double r2 = oracle::integrate(
        [&](double r) {
            const double d = gauss_du0(r);
            return d * d * std::pow(r, 3.0 + 2.0 * eps);
        },
        0.0, 18.0);

    // Frozen oracle values.
    CHECK(mu2 == doctest::Approx(25.85530).epsilon(1e-4));
    CHECK(r2 == doctest::Approx(0.5874961).epsilon(1e-4));

    CHECK(n.norm_mu * n.norm_mu == doctest::Approx(mu2).epsilon(2e-3));
    CHECK(n.norm_r * n.norm_r == doctest::Approx(r2).epsilon(2e-3));

    // Measure comparison holds discretely.
    CHECK(n.norm_r * n.norm_r <= n.norm_mu * n.norm_mu / (4.0 * M_PI) * (1.0 + 1e-12));

    // Zero data.
    WeightedNorms z = weighted_data_norm(synthesize_data(DataSpec{}, g, eps), g, eps);
    CHECK(z.norm_mu == 0.0);
    CHECK(z.norm_r == 0.0);

    // Wrong time slice is rejected.
    ReducedState late = s;
    late.t = 1.0;
    CHECK_THROWS_AS(weighted_data_norm(late, g, eps), InvalidArgument);
}

TEST_CASE("weighted_data_norm properties: scaling, tail finiteness, refinement order") {
    const double eps = 0.5;
    RadialGrid g = build_grid(40.0, 1024);

    DataSpec tail;
    tail.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, 0.5, 4.0};
    ReducedState s = synthesize_data(tail, g, eps);
    WeightedNorms n = weighted_data_norm(s, g, eps);
    CHECK(std::isfinite(n.norm_mu));
    CHECK(std::isfinite(n.norm_r));
    CHECK(n.norm_mu > 0.0);

    // Independent oracle for the tail norm: closed-form u0 differentiated at
    // a step much finer than any grid.
    auto tail_u0 = [&](double r) {
        double taper = 1.0;
        if (r > 4.0) {
            const double x = (r - 4.0) / 8.0;
            taper = x >= 1.0 ? 0.0 : 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
        }
        return std::pow(1.0 + r, -1.0 - eps - 0.5) * taper;
    };
    const double mu2_oracle = 4.0 * M_PI * oracle::integrate(
        [&](double r) {
            const double h = 1e-6;
            const double d = (tail_u0(r + h) - tail_u0(r - h)) / (2.0 * h);
            return d * d * r * r * std::pow(1.0 + r, 1.0 + 2.0 * eps);
        },
        1e-6, 40.0);
    CHECK(n.norm_mu * n.norm_mu == doctest::Approx(mu2_oracle).epsilon(5e-3));

    // Quadratic scaling in the data amplitude.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> amp(0.1, 3.0);
    for (int k = 0; k < 5; ++k) {
        const double lam = amp(rng);
        ReducedState scaled = s;
        for (double& x : scaled.w) x *= lam;
        for (double& x : scaled.wdot) x *= lam;
        WeightedNorms m = weighted_data_norm(scaled, g, eps);
        CHECK(m.norm_mu == doctest::Approx(lam * n.norm_mu).epsilon(1e-12));
        CHECK(m.norm_r == doctest::Approx(lam * n.norm_r).epsilon(1e-12));
    }

    // Refinement: value settles at second order.
    DataSpec gauss;
    gauss.u0 = {DataComponent::Family::Gaussian, 1.0, 1.0, 0.0};
    auto mu2_at = [&](std::size_t J) {
        RadialGrid gg = build_grid(18.0, J);
        WeightedNorms w = weighted_data_norm(synthesize_data(gauss, gg, eps), gg, eps);
        return w.norm_mu * w.norm_mu;
    };
    const double ref = mu2_at(8192);
    const double e1 = std::abs(mu2_at(512) - ref);
    const double e2 = std::abs(mu2_at(1024) - ref);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("pointwise_tail_check") {
    const double eps = 0.5;
    RadialGrid g = build_grid(18.0, 1024);

    TailCheck z = pointwise_tail_check(synthesize_data(DataSpec{}, g, eps), g, 1.0, eps);
    CHECK(z.max_ratio == 0.0);
    CHECK(z.pass);

    DataSpec gauss;
    gauss.u0 = {DataComponent::Family::Gaussian, 1.0, 1.0, 0.0};
    ReducedState s = synthesize_data(gauss, g, eps);
    WeightedNorms n = weighted_data_norm(s, g, eps);
    TailCheck c = pointwise_tail_check(s, g, n.norm_r, eps);
    CHECK(c.pass);

    // u0 = (1+r)^{-1} decays too slowly for the r^{-1-eps} envelope.
    ReducedState slow = zero_state(g);
    for (std::size_t j = 0; j <= g.J; ++j) slow.w[j] = g.r(j) / (1.0 + g.r(j));
    TailCheck f = pointwise_tail_check(slow, g, 1.0, eps);
    CHECK_FALSE(f.pass);
    CHECK(f.max_ratio > 2.0);

    CHECK_THROWS_AS(pointwise_tail_check(s, g, 0.0, eps), InvalidArgument);
}

TEST_CASE("recover_u handles the origin") {
    RadialGrid g = build_grid(2.0, 64);
    // u(r) = 3 - r^2 is even and quadratic: extrapolation is exact.
    ReducedState s = zero_state(g);
    for (std::size_t j = 0; j <= g.J; ++j) s.w[j] = g.r(j) * (3.0 - g.r(j) * g.r(j));
    std::vector<double> u = recover_u(s.w, g);
    CHECK(u[0] == doctest::Approx(3.0).epsilon(1e-12));
}
