#include "radialwave.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "rwave/data.hpp"
#include "rwave/errors.hpp"
#include "rwave/functionals.hpp"
#include "rwave/runner.hpp"
#include "rwave/solver.hpp"
#include "rwave/sweep.hpp"
#include "rwave/transform.hpp"

using namespace rwave;

namespace {

thread_local std::string g_last_error;

rw_status fail(rw_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
rw_status guarded(Fn&& fn) {
    try {
        fn();
        return RW_OK;
    } catch (const NumericalBlowup& e) {
        return fail(RW_ERR_NUMERICAL, e.what());
    } catch (const NoContraction& e) {
        return fail(RW_ERR_NO_CONTRACTION, e.what());
    } catch (const CoverageError& e) {
        return fail(RW_ERR_COVERAGE, e.what());
    } catch (const ConfigError& e) {
        return fail(RW_ERR_CONFIG, e.what());
    } catch (const InvalidArgument& e) {
        return fail(RW_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(RW_ERR_UNKNOWN, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

DataSpec parse_data_spec_json(const char* text) {
    using json = nlohmann::ordered_json;
    const json doc = json::parse(text);
    const std::string wrapped = json{{"parameters", {{"p", 3.0}, {"epsilon", 0.5}}},
                                     {"grid", {{"r_max", 1e6}, {"J", 8}}},
                                     {"time", {{"T", 1.0}}},
                                     {"data", doc}}
                                    .dump();
    return parse_config(wrapped).data;
}

} // namespace

struct rw_grid { RadialGrid g; };
struct rw_state { ReducedState s; };
struct rw_profile { CoefficientProfile p; };
struct rw_traj { Trajectory t; };
struct rw_chart { HyperboloidalChart c; };
struct rw_vtraj { TransformedTrajectory v; };

extern "C" {

const char* rw_version(void) { return "1.0.0"; }

const char* rw_last_error(void) { return g_last_error.c_str(); }

void rw_string_free(char* s) { std::free(s); }

/* ---- grids and states --------------------------------------------------- */

rw_status rw_grid_create(double r_max, size_t J, rw_grid** out) {
    if (!out) return fail(RW_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] { *out = new rw_grid{build_grid(r_max, J)}; });
}

void rw_grid_free(rw_grid* g) { delete g; }

double rw_grid_dr(const rw_grid* g) { return g ? g->g.dr : 0.0; }

size_t rw_grid_points(const rw_grid* g) { return g ? g->g.points() : 0; }

rw_status rw_state_synthesize(const rw_grid* g, const char* data_json, double epsilon,
                              rw_state** out) {
    if (!g || !data_json || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const DataSpec spec = parse_data_spec_json(data_json);
        *out = new rw_state{synthesize_data(spec, g->g, epsilon)};
    });
}

rw_status rw_state_create(const rw_grid* g, double t, const double* w, const double* wdot,
                          rw_state** out) {
    if (!g || !w || !wdot || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        ReducedState s;
        s.t = t;
        s.w.assign(w, w + g->g.points());
        s.wdot.assign(wdot, wdot + g->g.points());
        check_state(s, g->g);
        *out = new rw_state{std::move(s)};
    });
}

void rw_state_free(rw_state* s) { delete s; }

size_t rw_state_size(const rw_state* s) { return s ? s->s.size() : 0; }

double rw_state_time(const rw_state* s) { return s ? s->s.t : 0.0; }

rw_status rw_state_fields(const rw_state* s, double* w_out, double* wdot_out) {
    if (!s) return fail(RW_ERR_INVALID_ARGUMENT, "null state");
    if (w_out) std::memcpy(w_out, s->s.w.data(), s->s.w.size() * sizeof(double));
    if (wdot_out) std::memcpy(wdot_out, s->s.wdot.data(), s->s.wdot.size() * sizeof(double));
    return RW_OK;
}

rw_status rw_weighted_data_norm(const rw_state* s, const rw_grid* g, double epsilon,
                                double* norm_mu, double* norm_r) {
    if (!s || !g) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const WeightedNorms n = weighted_data_norm(s->s, g->g, epsilon);
        if (norm_mu) *norm_mu = n.norm_mu;
        if (norm_r) *norm_r = n.norm_r;
    });
}

rw_status rw_pointwise_tail_check(const rw_state* s, const rw_grid* g, double A, double epsilon,
                                  double* max_ratio, int* pass) {
    if (!s || !g) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const TailCheck c = pointwise_tail_check(s->s, g->g, A, epsilon);
        if (max_ratio) *max_ratio = c.max_ratio;
        if (pass) *pass = c.pass ? 1 : 0;
    });
}

/* ---- profiles and evolution ---------------------------------------------- */

rw_status rw_profile_create(rw_profile_kind kind, double kappa, double p, rw_profile** out) {
    if (!out) return fail(RW_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        CoefficientProfile::Kind k = kind == RW_PROFILE_FREE ? CoefficientProfile::Kind::Free
                                     : kind == RW_PROFILE_UNIT
                                         ? CoefficientProfile::Kind::Unit
                                         : CoefficientProfile::Kind::Hyperbolic;
        *out = new rw_profile{CoefficientProfile(k, kappa, p)};
    });
}

void rw_profile_free(rw_profile* p) { delete p; }

double rw_profile_phi(const rw_profile* p, double r) { return p ? p->p.phi(r) : 0.0; }

double rw_profile_morawetz_weight(const rw_profile* p, double r) {
    return p ? p->p.morawetz_weight(r) : 0.0;
}

rw_status rw_dalembert_free(const rw_state* s, const rw_grid* g, double t, rw_state** out) {
    if (!s || !g || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new rw_state{dalembert_free(s->s, g->g, t)}; });
}

rw_status rw_evolve_leapfrog(const rw_state* s, const rw_grid* g, const rw_profile* prof,
                             double T, long stride, double t_begin, rw_traj** out) {
    if (!s || !g || !prof || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new rw_traj{evolve_leapfrog(s->s, g->g, prof->p, T, stride, t_begin)};
    });
}

rw_status rw_picard_solve(const rw_state* s, const rw_grid* g, const rw_profile* prof, double T,
                          int iters, double* final_gap, rw_traj** out) {
    if (!s || !g || !prof || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        PicardResult res = picard_solve(s->s, g->g, prof->p, T, iters);
        if (final_gap) *final_gap = res.final_gap();
        *out = new rw_traj{std::move(res.trajectory)};
    });
}

void rw_traj_free(rw_traj* t) { delete t; }

size_t rw_traj_snapshot_count(const rw_traj* t) { return t ? t->t.snaps.size() : 0; }

rw_status rw_traj_snapshot(const rw_traj* t, size_t index, rw_state** out) {
    if (!t || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= t->t.snaps.size()) return fail(RW_ERR_INVALID_ARGUMENT, "snapshot index");
    *out = new rw_state{t->t.snaps[index].state};
    return RW_OK;
}

rw_status rw_traj_time(const rw_traj* t, size_t index, double* out) {
    if (!t || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= t->t.snaps.size()) return fail(RW_ERR_INVALID_ARGUMENT, "snapshot index");
    *out = t->t.snaps[index].state.t;
    return RW_OK;
}

rw_status rw_traj_accumulator(const rw_traj* t, size_t index, const char* name, double* out) {
    if (!t || !name || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= t->t.snaps.size()) return fail(RW_ERR_INVALID_ARGUMENT, "snapshot index");
    const TrajAccums& a = t->t.snaps[index].accums;
    const std::string key = name;
    if (key == "dissipation") *out = a.dissipation;
    else if (key == "morawetz") *out = a.morawetz;
    else if (key == "lp2p2") *out = a.lp2p2;
    else if (key == "source_l1l2") *out = a.source_l1l2;
    else return fail(RW_ERR_INVALID_ARGUMENT, "unknown accumulator name");
    return RW_OK;
}

rw_status rw_pde_residual_max(const rw_traj* t, const rw_profile* prof, int order, double* out) {
    if (!t || !prof || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        double worst = 0.0;
        for (const ResidualSample& r : pde_residual(t->t, prof->p, order))
            worst = std::max(worst, r.max_abs);
        *out = worst;
    });
}

/* ---- functionals ---------------------------------------------------------- */

rw_status rw_energy(const rw_state* s, const rw_grid* g, const rw_profile* prof, double* out) {
    if (!s || !g || !prof || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = energy(s->s, g->g, prof->p); });
}

rw_status rw_morawetz_functional(const rw_state* s, const rw_grid* g, double* out) {
    if (!s || !g || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = morawetz_functional(s->s, g->g); });
}

rw_status rw_dissipation_check(const rw_traj* t, double* accumulated, double* identity_defect,
                               double* bound, int* pass) {
    if (!t) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    return guarded([&] {
        const DissipationCheck d = dissipation_check(t->t);
        if (accumulated) *accumulated = d.accumulated;
        if (identity_defect) *identity_defect = d.identity_defect;
        if (bound) *bound = d.bound;
        if (pass) *pass = d.pass ? 1 : 0;
    });
}

rw_status rw_morawetz_budget(const rw_traj* t, double* value, double* bound, int* pass) {
    if (!t) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    return guarded([&] {
        const BudgetEntry b = morawetz_budget(t->t);
        if (value) *value = b.value;
        if (bound) *bound = b.bound;
        if (pass) *pass = b.pass ? 1 : 0;
    });
}

rw_status rw_mixed_norm(const rw_traj* t, double q_t, double q_x, rw_region region,
                        double region_param, double* out) {
    if (!t || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::function<bool(double, double)> pred;
        switch (region) {
            case RW_REGION_ALL: break;
            case RW_REGION_EXTERIOR: pred = region_exterior(region_param); break;
            case RW_REGION_OMEGA: pred = region_omega(region_param); break;
            case RW_REGION_K: pred = region_K(region_param); break;
        }
        *out = mixed_norm(t->t, q_t, q_x, {}, pred);
    });
}

rw_status rw_scattering_defect(const rw_traj* t, double t1, double t2, double* out) {
    if (!t || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = scattering_defect(t->t, t1, t2); });
}

rw_status rw_scattering_profile(const rw_traj* t, rw_state** out) {
    if (!t || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new rw_state{scattering_profile(t->t)}; });
}

rw_status rw_calibrate_decay(const rw_traj* t, double R, double delta, double slab_end,
                             double* B1, double* C) {
    if (!t) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    return guarded([&] {
        const DecayCalibration cal = calibrate_decay(t->t, R, delta, slab_end);
        if (B1) *B1 = cal.B1;
        if (C) *C = cal.C;
    });
}

rw_status rw_exterior_decay_report(const rw_traj* t, double R, double delta, double B1, double C,
                                   double tol, double* max_es1, double* max_char, int* pass) {
    if (!t) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    return guarded([&] {
        Parameters prm;
        prm.R = R;
        prm.delta = delta;
        prm.B1 = B1;
        prm.C_flux = C;
        const DecayReport rep = exterior_decay_report(t->t, prm, tol);
        if (max_es1) *max_es1 = rep.max_es1_ratio;
        if (max_char) *max_char = rep.max_char_ratio;
        if (pass) *pass = rep.pass ? 1 : 0;
    });
}

/* ---- hyperboloidal transform ----------------------------------------------- */

rw_status rw_chart_create(double t0, double s_max, size_t s_J, double tau_min, double tau_max,
                          size_t tau_J, rw_chart** out) {
    if (!out) return fail(RW_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        *out = new rw_chart{make_chart(t0, s_max, s_J, tau_min, tau_max, tau_J)};
    });
}

void rw_chart_free(rw_chart* c) { delete c; }

rw_status rw_chart_forward(double s, double tau, double t0, double* r, double* t) {
    return guarded([&] {
        auto [rr, tt] = chart_forward(s, tau, t0);
        if (r) *r = rr;
        if (t) *t = tt;
    });
}

rw_status rw_chart_inverse(double r, double t, double t0, double* s, double* tau) {
    return guarded([&] {
        auto [ss, tt] = chart_inverse(r, t, t0);
        if (s) *s = ss;
        if (tau) *tau = tt;
    });
}

double rw_phi_weight(double s, double p) { return phi_weight(s, p); }

rw_status rw_push_forward(const rw_traj* t, const rw_chart* c, rw_vtraj** out) {
    if (!t || !c || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new rw_vtraj{push_forward(t->t, c->c)}; });
}

void rw_vtraj_free(rw_vtraj* v) { delete v; }

size_t rw_vtraj_slice_count(const rw_vtraj* v) { return v ? v->v.slices.size() : 0; }

rw_status rw_transformed_energy(const rw_vtraj* v, size_t slice, double p, double* total,
                                double* interior, double* exterior) {
    if (!v) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    if (slice >= v->v.slices.size()) return fail(RW_ERR_INVALID_ARGUMENT, "slice index");
    return guarded([&] {
        const TransformedEnergy e = transformed_energy(v->v.slices[slice], v->v.chart, p);
        if (total) *total = e.total;
        if (interior) *interior = e.interior;
        if (exterior) *exterior = e.exterior;
    });
}

rw_status rw_transformed_budgets(const rw_vtraj* v, double p, double* i_prime, double* morawetz,
                                 double* dissipation, double* i2, int* i2_le_iprime) {
    if (!v) return fail(RW_ERR_INVALID_ARGUMENT, "null trajectory");
    return guarded([&] {
        const TransformedBudgets b = transformed_budgets(v->v, p);
        if (i_prime) *i_prime = b.i_prime;
        if (morawetz) *morawetz = b.morawetz;
        if (dissipation) *dissipation = b.dissipation;
        if (i2) *i2 = b.i2;
        if (i2_le_iprime) *i2_le_iprime = b.i2_le_iprime ? 1 : 0;
    });
}

rw_status rw_cp2_residual_max(const rw_vtraj* v, double p, double* out) {
    if (!v || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = cp2_residual_max(v->v, p); });
}

rw_status rw_commutator_residual_t3(rw_field_fn u_field, void* user, double r0, double r1,
                                    double t0, double t1, double h, double* out) {
    if (!u_field || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto field = [&](double r, double t) { return u_field(r, t, user); };
        *out = commutator_residual_T3(field, Box2{r0, r1, t0, t1}, h);
    });
}

rw_status rw_commutator_residual_t4(rw_field_fn w_field, void* user, double anchor_t0, double s0,
                                    double s1, double tau0, double tau1, double h, double* out) {
    if (!w_field || !out) return fail(RW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto field = [&](double r, double t) { return w_field(r, t, user); };
        *out = commutator_residual_T4(field, anchor_t0, Box2{s0, s1, tau0, tau1}, h);
    });
}

rw_status rw_change_of_variables_check(rw_field_fn g_density, void* user, double t0, double r0,
                                       double r1, double ta, double tb, double s0, double s1,
                                       double tau0, double tau1, size_t n, double* direct,
                                       double* transformed, double* rel_diff) {
    if (!g_density) return fail(RW_ERR_INVALID_ARGUMENT, "null density");
    return guarded([&] {
        auto field = [&](double r, double t) { return g_density(r, t, user); };
        const CovCheck c = change_of_variables_check(field, t0, Box2{r0, r1, ta, tb},
                                                     Box2{s0, s1, tau0, tau1}, n);
        if (direct) *direct = c.direct;
        if (transformed) *transformed = c.transformed;
        if (rel_diff) *rel_diff = c.rel_diff;
    });
}

/* ---- orchestration ----------------------------------------------------------- */

rw_status rw_run_simulate_json(const char* config_json, const char* out_dir, int* pass,
                               char** summary_json) {
    if (!config_json) return fail(RW_ERR_INVALID_ARGUMENT, "null config");
    return guarded([&] {
        const RunConfig cfg = parse_config(config_json);
        const SimulationOutcome res = run_simulate(cfg, out_dir ? out_dir : "");
        if (pass) *pass = res.pass ? 1 : 0;
        if (summary_json) *summary_json = dup_string(res.summary.dump(2));
    });
}

rw_status rw_run_simulate_file(const char* config_path, const char* out_dir, int* pass,
                               char** summary_json) {
    if (!config_path) return fail(RW_ERR_INVALID_ARGUMENT, "null config path");
    return guarded([&] {
        const RunConfig cfg = load_config_file(config_path);
        const SimulationOutcome res = run_simulate(cfg, out_dir ? out_dir : "");
        if (pass) *pass = res.pass ? 1 : 0;
        if (summary_json) *summary_json = dup_string(res.summary.dump(2));
    });
}

rw_status rw_run_verify(const char* suite, const char* out_dir, int* pass, char** verdict_json) {
    if (!suite) return fail(RW_ERR_INVALID_ARGUMENT, "null suite name");
    return guarded([&] {
        const VerifyOutcome res = run_verify(suite, out_dir ? out_dir : "");
        if (pass) *pass = res.pass ? 1 : 0;
        if (verdict_json) *verdict_json = dup_string(res.verdict.dump(2));
    });
}

rw_status rw_run_sweep_file(const char* config_path, const char* axes_spec, const char* out_dir,
                            int* pass, char** table_csv) {
    if (!config_path) return fail(RW_ERR_INVALID_ARGUMENT, "null config path");
    return guarded([&] {
        const RunConfig base = load_config_file(config_path);
        SweepAxes axes;
        if (axes_spec && *axes_spec) {
            std::stringstream ss(axes_spec);
            std::string item;
            while (std::getline(ss, item, ';'))
                if (!item.empty()) parse_axis(axes, item);
        }
        const SweepResultTable table = run_sweep(base, axes, out_dir ? out_dir : "");
        if (pass) *pass = table.pass ? 1 : 0;
        if (table_csv) {
            const std::string dir =
                (out_dir && *out_dir) ? out_dir : base.output.directory;
            std::ifstream in(dir + "/sweep.csv");
            std::ostringstream buf;
            buf << in.rdbuf();
            *table_csv = dup_string(buf.str());
        }
    });
}

} /* extern "C" */
