#include "rwave/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rwave/errors.hpp"

namespace rwave {

namespace {

// d/ds ( sinh s / s ) = (s cosh s - sinh s) / s^2, series near zero.
double sinh_ratio_inv_deriv(double s) {
    if (s < 1e-4) return s / 3.0 + s * s * s / 30.0;
    return (s * std::cosh(s) - std::sinh(s)) / (s * s);
}

// sinh s / s (inverse of sinh_ratio, well-conditioned for moderate s).
double sinhc(double s) {
    if (s < 1e-4) {
        const double s2 = s * s;
        return 1.0 + s2 / 6.0 + 7.0 * s2 * s2 / 360.0;
    }
    return std::sinh(s) / s;
}

double abs_pow(double x, double q) { return std::pow(std::abs(x), q); }

} // namespace

HyperboloidalChart make_chart(double t0, double s_max, std::size_t s_J, double tau_min,
                              double tau_max, std::size_t tau_J) {
    if (!(t0 < -1.0)) throw InvalidArgument("chart: t0 must be < -1");
    if (!(s_max > 0.0) || s_J < 4) throw InvalidArgument("chart: need s_max > 0 and s_J >= 4");
    if (!(tau_max > tau_min) || tau_J < 1)
        throw InvalidArgument("chart: need tau_max > tau_min and tau_J >= 1");
    return HyperboloidalChart{t0, s_max, s_J, tau_min, tau_max, tau_J};
}

std::pair<double, double> chart_forward(double s, double tau, double t0) {
    if (!(s >= 0.0)) throw InvalidArgument("chart_forward: s must be non-negative");
    const double e = std::exp(tau);
    return {e * std::sinh(s), t0 + e * std::cosh(s)};
}

std::pair<double, double> chart_inverse(double r, double t, double t0) {
    if (!(r >= 0.0)) throw InvalidArgument("chart_inverse: r must be non-negative");
    const double dtv = t - t0;
    const double q = dtv * dtv - r * r;
    if (!(dtv > r) || !(q > 0.0))
        throw InvalidArgument("chart_inverse: point outside the forward cone t - t0 > r");
    const double tau = 0.5 * std::log(q);
    const double s = std::asinh(r * std::exp(-tau));
    return {s, tau};
}

namespace {

// On-the-fly bilinear interpolation of u = w/r, u_r and u_t = wdot/r on the
// stored stride-1 lattice, with the origin values extrapolated from the
// first interior nodes.
class LatticeSampler {
public:
    explicit LatticeSampler(const Trajectory& traj) : traj_(traj), g_(traj.grid) {}

    bool covers(double r, double t) const {
        return r >= 0.0 && r <= g_.r_max() - g_.dr && t >= traj_.t_first() &&
               t <= traj_.t_last() - traj_.dt;
    }

    // u, u_r, u_t at (r, t).
    void sample(double r, double t, double& u, double& ur, double& ut) const {
        const double x = r / g_.dr;
        const double y = (t - traj_.t_first()) / traj_.dt;
        std::size_t j = static_cast<std::size_t>(std::min<long>(
            std::max<long>(0, static_cast<long>(std::floor(x))), static_cast<long>(g_.J) - 1));
        std::size_t k = static_cast<std::size_t>(std::min<long>(
            std::max<long>(0, static_cast<long>(std::floor(y))),
            static_cast<long>(traj_.snaps.size()) - 2));
        const double a = x - static_cast<double>(j);
        const double b = y - static_cast<double>(k);
        u = blend(j, k, a, b, &LatticeSampler::u_node);
        ur = blend(j, k, a, b, &LatticeSampler::ur_node);
        ut = blend(j, k, a, b, &LatticeSampler::ut_node);
    }

private:
    using NodeFn = double (LatticeSampler::*)(std::size_t, std::size_t) const;

    double blend(std::size_t j, std::size_t k, double a, double b, NodeFn f) const {
        return (1.0 - a) * ((1.0 - b) * (this->*f)(k, j) + b * (this->*f)(k + 1, j)) +
               a * ((1.0 - b) * (this->*f)(k, j + 1) + b * (this->*f)(k + 1, j + 1));
    }

    double field_over_r(const std::vector<double>& w, std::size_t j) const {
        if (j > 0) return w[j] / g_.r(j);
        return (4.0 * w[1] / g_.r(1) - w[2] / g_.r(2)) / 3.0;
    }

    double u_node(std::size_t k, std::size_t j) const {
        return field_over_r(traj_.snaps[k].state.w, j);
    }

    double ut_node(std::size_t k, std::size_t j) const {
        return field_over_r(traj_.snaps[k].state.wdot, j);
    }

    double ur_node(std::size_t k, std::size_t j) const {
        const std::vector<double>& w = traj_.snaps[k].state.w;
        if (j == 0) return 0.0;  // u is even in r
        if (j == g_.J)
            return (3.0 * field_over_r(w, j) - 4.0 * field_over_r(w, j - 1) +
                    field_over_r(w, j - 2)) /
                   (2.0 * g_.dr);
        return (field_over_r(w, j + 1) - field_over_r(w, j - 1)) / (2.0 * g_.dr);
    }

    const Trajectory& traj_;
    const RadialGrid& g_;
};

} // namespace

TransformedTrajectory push_forward(const Trajectory& traj, const HyperboloidalChart& chart) {
    if (traj.stride != 1)
        throw InvalidArgument("push_forward: trajectory must be stored at stride 1");
    if (traj.snaps.size() < 2) throw InvalidArgument("push_forward: too few snapshots");

    const LatticeSampler sampler(traj);

    // Coverage audit first, so failures are loud and complete.
    std::ostringstream bad;
    std::size_t bad_count = 0;
    for (std::size_t k = 0; k <= chart.tau_J; ++k) {
        for (std::size_t i = 0; i <= chart.s_J; ++i) {
            const auto [r, t] = chart_forward(chart.s(i), chart.tau(k), chart.t0);
            if (!sampler.covers(r, t)) {
                if (bad_count < 8) {
                    bad << (bad_count ? ", " : "") << "(s=" << chart.s(i) << ", tau=" << chart.tau(k)
                        << " -> r=" << r << ", t=" << t << ")";
                }
                ++bad_count;
            }
        }
    }
    if (bad_count > 0) {
        std::ostringstream msg;
        msg << "push_forward: " << bad_count
            << " chart nodes fall outside the stored window [0, " << traj.grid.r_max() << "] x ["
            << traj.t_first() << ", " << traj.t_last() << "]: " << bad.str();
        throw CoverageError(msg.str());
    }

    TransformedTrajectory out;
    out.chart = chart;
    out.slices.resize(chart.tau_J + 1);
    for (std::size_t k = 0; k <= chart.tau_J; ++k) {
        TransformedSlice& sl = out.slices[k];
        const double tau = chart.tau(k);
        sl.tau = tau;
        const double etau = std::exp(tau);
        sl.v.resize(chart.s_J + 1);
        sl.v_s.resize(chart.s_J + 1);
        sl.v_tau.resize(chart.s_J + 1);
        sl.sv.resize(chart.s_J + 1);
        for (std::size_t i = 0; i <= chart.s_J; ++i) {
            const double s = chart.s(i);
            const auto [r, t] = chart_forward(s, tau, chart.t0);
            double u, ur, ut;
            sampler.sample(r, t, u, ur, ut);
            const double ratio = sinhc(s);           // sinh s / s
            const double ch = std::cosh(s);
            const double sh = std::sinh(s);
            const double v = etau * ratio * u;
            sl.v[i] = v;
            sl.v_tau[i] = v + etau * etau * ratio * (ur * sh + ut * ch);
            sl.v_s[i] = etau * sinh_ratio_inv_deriv(s) * u + etau * etau * ratio * (ur * ch + ut * sh);
            sl.sv[i] = s * v;
        }
    }
    return out;
}

TransformedEnergy transformed_energy(const TransformedSlice& slice, const HyperboloidalChart& chart,
                                     double p) {
    const double arg = -chart.t0 * std::exp(-slice.tau);
    if (!(arg >= 1.0))
        throw InvalidArgument("transformed_energy: -t0 e^{-tau} < 1, split radius undefined "
                              "(tau too large for this anchor)");
    TransformedEnergy out;
    out.s0 = std::acosh(arg);

    const double ds = chart.ds();
    const double damp = std::exp(-(p - 3.0) * slice.tau);
    std::vector<double> kin(slice.v.size(), 0.0), full(slice.v.size(), 0.0);
    for (std::size_t i = 0; i < slice.v.size(); ++i) {
        const double s = chart.s(i);
        const double s2 = s * s;
        kin[i] = (slice.v_s[i] * slice.v_s[i] + slice.v_tau[i] * slice.v_tau[i]) * s2;
        const double pot = damp * phi_weight(s, p) * abs_pow(slice.v[i], p + 1.0) / (p + 1.0);
        full[i] = 0.5 * kin[i] + pot * s2;
    }
    out.total = 4.0 * M_PI * trapz(full, ds);

    // Kinetic/gradient split at s0 with a fractional last cell.
    const double x = out.s0 / ds;
    const std::size_t i0 = static_cast<std::size_t>(
        std::min<double>(std::floor(x), static_cast<double>(slice.v.size()) - 2.0));
    double interior = 0.0;
    for (std::size_t i = 0; i < i0; ++i) interior += 0.5 * (kin[i] + kin[i + 1]) * ds;
    const double frac = std::min(std::max(x - static_cast<double>(i0), 0.0), 1.0);
    const double kin_at_s0 = kin[i0] + frac * (kin[i0 + 1] - kin[i0]);
    interior += 0.5 * (kin[i0] + kin_at_s0) * frac * ds;
    const double total_kin = trapz(kin, ds);
    out.interior = 2.0 * M_PI * interior;
    out.exterior = 2.0 * M_PI * (total_kin - interior);
    return out;
}

TransformedBudgets transformed_budgets(const TransformedTrajectory& vtraj, double p) {
    const HyperboloidalChart& chart = vtraj.chart;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < vtraj.slices.size(); ++k)
        if (vtraj.slices[k].tau >= -1e-12) idx.push_back(k);
    if (idx.size() < 2)
        throw InvalidArgument("transformed_budgets: chart needs at least two tau >= 0 slices");

    TransformedBudgets out;
    const double ds = chart.ds();
    std::vector<double> ip(idx.size()), mw(idx.size()), dis(idx.size()), i2(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const TransformedSlice& sl = vtraj.slices[idx[a]];
        const double d1 = std::exp(-(p - 3.0) * sl.tau);
        const double d2 = d1 * d1;
        std::vector<double> f_ip(sl.v.size(), 0.0), f_mw(sl.v.size(), 0.0), f_dis(sl.v.size(), 0.0),
            f_i2(sl.v.size(), 0.0);
        for (std::size_t i = 1; i < sl.v.size(); ++i) {
            const double s = chart.s(i);
            const double s2 = s * s;
            const double phi = phi_weight(s, p);
            const double v2p2 = abs_pow(sl.v[i], 2.0 * p - 2.0);
            const double vp1 = abs_pow(sl.v[i], p + 1.0);
            f_ip[i] = d1 * phi * v2p2 * s2;
            f_dis[i] = d1 * phi * vp1 * s2;
            f_i2[i] = d2 * std::pow(sinh_ratio(s), 2.0 * p - 4.0) * v2p2 * s2;
            const double sh = std::sinh(s);
            f_mw[i] = d1 * (p - 1.0) * std::pow(s, p + 1.0) * std::cosh(s) / std::pow(sh, p) * vp1;
            if (f_i2[i] > f_ip[i] * (1.0 + 1e-12)) out.i2_le_iprime = false;
        }
        ip[a] = 4.0 * M_PI * trapz(f_ip, ds);
        mw[a] = 4.0 * M_PI * trapz(f_mw, ds);
        dis[a] = 4.0 * M_PI * trapz(f_dis, ds);
        i2[a] = 4.0 * M_PI * trapz(f_i2, ds);
    }
    const double dtau = chart.dtau();
    out.i_prime = trapz(ip, dtau);
    out.morawetz = trapz(mw, dtau);
    out.dissipation = trapz(dis, dtau);
    out.i2 = trapz(i2, dtau);

    for (const TransformedSlice& sl : vtraj.slices) {
        if (std::abs(sl.tau) <= 1e-9) {
            out.energy_at_zero = transformed_energy(sl, chart, p).total;
            break;
        }
    }
    return out;
}

double transformed_dissipation_bound(double p, double E0) {
    if (!(p > 3.0))
        throw InvalidArgument("transformed_dissipation_bound: void for p = 3 (kappa = 0)");
    return (p + 1.0) / (p - 3.0) * E0;
}

double cp2_residual_max(const TransformedTrajectory& vtraj, double p) {
    const HyperboloidalChart& chart = vtraj.chart;
    if (vtraj.slices.size() < 5 || chart.s_J < 5)
        throw InvalidArgument("cp2_residual_max: need at least 5 nodes per direction");
    const double ds = chart.ds();
    const double dtau = chart.dtau();
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < vtraj.slices.size(); ++k) {
        const TransformedSlice& sl = vtraj.slices[k];
        const double damp = std::exp(-(p - 3.0) * sl.tau);
        for (std::size_t i = 2; i + 2 <= chart.s_J; ++i) {
            const double s = chart.s(i);
            const double dtt = (-vtraj.slices[k + 2].sv[i] + 16.0 * vtraj.slices[k + 1].sv[i] -
                                30.0 * sl.sv[i] + 16.0 * vtraj.slices[k - 1].sv[i] -
                                vtraj.slices[k - 2].sv[i]) /
                               (12.0 * dtau * dtau);
            const double dss = (-sl.sv[i + 2] + 16.0 * sl.sv[i + 1] - 30.0 * sl.sv[i] +
                                16.0 * sl.sv[i - 1] - sl.sv[i - 2]) /
                               (12.0 * ds * ds);
            const double src =
                phi_weight(s, p) * damp * signed_power(sl.sv[i], p) / std::pow(s, p - 1.0);
            worst = std::max(worst, std::abs(dtt - dss + src));
        }
    }
    return worst;
}

namespace {

double d2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

} // namespace

double commutator_residual_T3(const std::function<double(double, double)>& u_field, const Box2& rt,
                              double h) {
    // The Laplacian is discretized in conservative form (1/r^2) d_r(r^2 d_r u);
    // with the naive stencil both sides coincide algebraically and the
    // residual would only measure rounding.
    double worst = 0.0;
    const std::size_t nx = static_cast<std::size_t>(std::ceil((rt.x1 - rt.x0) / h));
    const std::size_t ny = static_cast<std::size_t>(std::ceil((rt.y1 - rt.y0) / h));
    for (std::size_t a = 0; a <= nx; ++a) {
        const double r = rt.x0 + static_cast<double>(a) * h;
        for (std::size_t b = 0; b <= ny; ++b) {
            const double t = rt.y0 + static_cast<double>(b) * h;
            auto w_of_t = [&](double tt) { return r * u_field(r, tt); };
            auto w_of_r = [&](double rr) { return rr * u_field(rr, t); };
            const double lhs = d2(w_of_t, t, h) - d2(w_of_r, r, h);
            auto u_of_t = [&](double tt) { return u_field(r, tt); };
            const double rp = r + 0.5 * h, rm = r - 0.5 * h;
            const double lap = (rp * rp * (u_field(r + h, t) - u_field(r, t)) -
                                rm * rm * (u_field(r, t) - u_field(r - h, t))) /
                               (r * r * h * h);
            const double rhs = r * (d2(u_of_t, t, h) - lap);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

double commutator_residual_T4(const std::function<double(double, double)>& w_field, double t0,
                              const Box2& stau, double h) {
    auto mapped = [&](double s, double tau) {
        const auto [r, t] = chart_forward(s, tau, t0);
        return w_field(r, t);
    };
    double worst = 0.0;
    const std::size_t nx = static_cast<std::size_t>(std::ceil((stau.x1 - stau.x0) / h));
    const std::size_t ny = static_cast<std::size_t>(std::ceil((stau.y1 - stau.y0) / h));
    for (std::size_t a = 0; a <= nx; ++a) {
        const double s = stau.x0 + static_cast<double>(a) * h;
        for (std::size_t b = 0; b <= ny; ++b) {
            const double tau = stau.y0 + static_cast<double>(b) * h;
            auto along_tau = [&](double x) { return mapped(s, x); };
            auto along_s = [&](double x) { return mapped(x, tau); };
            const double lhs = d2(along_tau, tau, h) - d2(along_s, s, h);
            const auto [r, t] = chart_forward(s, tau, t0);
            auto w_of_t = [&](double tt) { return w_field(r, tt); };
            auto w_of_r = [&](double rr) { return w_field(rr, t); };
            const double rhs = std::exp(2.0 * tau) * (d2(w_of_t, t, h) - d2(w_of_r, r, h));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

CovCheck change_of_variables_check(const std::function<double(double, double)>& g_density,
                                   double t0, const Box2& rt, const Box2& stau, std::size_t n) {
    if (n < 8) throw InvalidArgument("change_of_variables_check: n too small");
    CovCheck out;
    {
        const double hr = (rt.x1 - rt.x0) / static_cast<double>(n);
        const double ht = (rt.y1 - rt.y0) / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t a = 0; a <= n; ++a) {
            const double r = rt.x0 + static_cast<double>(a) * hr;
            const double wa = (a == 0 || a == n) ? 0.5 : 1.0;
            for (std::size_t b = 0; b <= n; ++b) {
                const double t = rt.y0 + static_cast<double>(b) * ht;
                const double wb = (b == 0 || b == n) ? 0.5 : 1.0;
                sum += wa * wb * g_density(r, t) * 4.0 * M_PI * r * r;
            }
        }
        out.direct = sum * hr * ht;
    }
    {
        const double hs = (stau.x1 - stau.x0) / static_cast<double>(n);
        const double htau = (stau.y1 - stau.y0) / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t a = 0; a <= n; ++a) {
            const double s = stau.x0 + static_cast<double>(a) * hs;
            const double wa = (a == 0 || a == n) ? 0.5 : 1.0;
            for (std::size_t b = 0; b <= n; ++b) {
                const double tau = stau.y0 + static_cast<double>(b) * htau;
                const double wb = (b == 0 || b == n) ? 0.5 : 1.0;
                const auto [r, t] = chart_forward(s, tau, t0);
                const double sh = std::sinh(s);
                sum += wa * wb * g_density(r, t) * 4.0 * M_PI * std::exp(4.0 * tau) * sh * sh;
            }
        }
        out.transformed = sum * hs * htau;
    }
    const double scale = std::max(std::abs(out.direct), std::abs(out.transformed));
    out.rel_diff = scale > 0.0 ? std::abs(out.direct - out.transformed) / scale : 0.0;
    return out;
}

} // namespace rwave
