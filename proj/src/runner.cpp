#include "rwave/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rwave/errors.hpp"
#include "rwave/solver.hpp"

namespace rwave {

using json = nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_series_csv(const std::string& path, const char* abscissa,
                      const std::vector<std::pair<double, double>>& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << abscissa << ",value\n";
    for (const auto& [x, v] : series) out << format_double(x) << ',' << format_double(v) << '\n';
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw ConfigError("config field '" + path + "': " + why);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& item : obj.items()) {
        if (!known.count(item.key()))
            throw ConfigError("unknown config key '" + path + (path.empty() ? "" : ".") +
                              item.key() + "'");
    }
}

double need_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) bad_field(path + "." + key, "missing");
    if (!obj[key].is_number()) bad_field(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) bad_field(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

DataComponent parse_component(const json& obj, const std::string& path) {
    if (!obj.is_object()) bad_field(path, "must be an object");
    expect_keys(obj, path, {"family", "amplitude", "width", "center", "eta", "cutoff"});
    if (!obj.contains("family")) bad_field(path + ".family", "missing");
    const std::string fam = obj["family"].get<std::string>();
    DataComponent c;
    if (fam == "zero") {
        c.family = DataComponent::Family::Zero;
    } else if (fam == "gaussian") {
        c.family = DataComponent::Family::Gaussian;
        c.amplitude = need_number(obj, path, "amplitude");
        c.width = opt_number(obj, path, "width", 1.0);
        c.center = opt_number(obj, path, "center", 0.0);
    } else if (fam == "tail") {
        c.family = DataComponent::Family::Tail;
        c.amplitude = need_number(obj, path, "amplitude");
        c.eta = opt_number(obj, path, "eta", 0.5);
        c.cutoff = need_number(obj, path, "cutoff");
    } else {
        bad_field(path + ".family", "unknown family '" + fam + "'");
    }
    return c;
}

const std::set<std::string> kKnownAnalyses = {
    "energy", "morawetz", "dissipation", "conservation", "i_norm",
    "scattering", "decay", "tail_check"};

} // namespace

double effective_kappa(const RunConfig& cfg) {
    if (cfg.kappa_auto) return std::max(0.0, cfg.parameters.p - 3.0);
    return cfg.parameters.kappa;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    expect_keys(doc, "", {"parameters", "grid", "time", "data", "profile", "backend", "analyses",
                          "transform", "output", "seed"});

    RunConfig cfg;

    if (!doc.contains("parameters")) bad_field("parameters", "missing");
    {
        const json& p = doc["parameters"];
        expect_keys(p, "parameters", {"p", "epsilon", "kappa", "A", "delta", "B1", "R", "t0", "C"});
        cfg.parameters.p = need_number(p, "parameters", "p");
        cfg.parameters.epsilon = need_number(p, "parameters", "epsilon");
        if (p.contains("kappa")) {
            if (p["kappa"].is_string()) {
                if (p["kappa"].get<std::string>() != "p-3")
                    bad_field("parameters.kappa", "must be a number or the string \"p-3\"");
                cfg.kappa_auto = true;
            } else {
                cfg.parameters.kappa = need_number(p, "parameters", "kappa");
            }
        }
        cfg.parameters.R = opt_number(p, "parameters", "R", 1.0);
        cfg.parameters.delta =
            opt_number(p, "parameters", "delta", derive_delta(cfg.parameters.epsilon));
        cfg.parameters.t0 = opt_number(p, "parameters", "t0", derive_t0(cfg.parameters.R));
        cfg.A_given = p.contains("A");
        cfg.parameters.A = opt_number(p, "parameters", "A", 1.0);
        cfg.B1_given = p.contains("B1");
        cfg.parameters.B1 = opt_number(p, "parameters", "B1", 1.0);
        cfg.C_given = p.contains("C");
        cfg.parameters.C_flux = opt_number(p, "parameters", "C", 0.0);
    }

    if (!doc.contains("grid")) bad_field("grid", "missing");
    {
        const json& g = doc["grid"];
        expect_keys(g, "grid", {"r_max", "J"});
        cfg.grid.r_max = need_number(g, "grid", "r_max");
        cfg.grid.J = static_cast<std::size_t>(need_number(g, "grid", "J"));
    }

    if (!doc.contains("time")) bad_field("time", "missing");
    {
        const json& t = doc["time"];
        expect_keys(t, "time", {"T", "stride", "t_begin"});
        cfg.time.T = need_number(t, "time", "T");
        cfg.time.stride = static_cast<long>(opt_number(t, "time", "stride", 1.0));
        cfg.time.t_begin = opt_number(t, "time", "t_begin", 0.0);
    }

    if (!doc.contains("data")) bad_field("data", "missing");
    {
        const json& d = doc["data"];
        expect_keys(d, "data", {"u0", "u1"});
        if (!d.contains("u0")) bad_field("data.u0", "missing");
        cfg.data.u0 = parse_component(d["u0"], "data.u0");
        if (d.contains("u1")) cfg.data.u1 = parse_component(d["u1"], "data.u1");
    }

    if (doc.contains("profile")) {
        const std::string kind = doc["profile"].get<std::string>();
        if (kind == "unit")
            cfg.profile_kind = CoefficientProfile::Kind::Unit;
        else if (kind == "hyperbolic")
            cfg.profile_kind = CoefficientProfile::Kind::Hyperbolic;
        else if (kind == "free")
            cfg.profile_kind = CoefficientProfile::Kind::Free;
        else
            bad_field("profile", "must be one of unit|hyperbolic|free");
    }

    if (doc.contains("backend")) {
        const json& b = doc["backend"];
        expect_keys(b, "backend", {"type", "iters"});
        const std::string type = b.contains("type") ? b["type"].get<std::string>() : "leapfrog";
        if (type == "leapfrog") {
            cfg.backend = RunConfig::Backend::Leapfrog;
        } else if (type == "picard") {
            cfg.backend = RunConfig::Backend::Picard;
            cfg.picard_iters = static_cast<int>(opt_number(b, "backend", "iters", 8.0));
        } else {
            bad_field("backend.type", "must be leapfrog or picard");
        }
    }

    if (doc.contains("analyses")) {
        if (!doc["analyses"].is_array()) bad_field("analyses", "must be an array of names");
        cfg.analyses.clear();
        for (const auto& a : doc["analyses"]) {
            const std::string name = a.get<std::string>();
            if (!kKnownAnalyses.count(name)) bad_field("analyses", "unknown analysis '" + name + "'");
            cfg.analyses.push_back(name);
        }
    }

    if (doc.contains("transform")) {
        const json& tr = doc["transform"];
        expect_keys(tr, "transform", {"s_max", "s_J", "tau_min", "tau_max", "tau_J"});
        ChartConfig ch;
        ch.s_max = need_number(tr, "transform", "s_max");
        ch.s_J = static_cast<std::size_t>(need_number(tr, "transform", "s_J"));
        ch.tau_min = need_number(tr, "transform", "tau_min");
        ch.tau_max = need_number(tr, "transform", "tau_max");
        ch.tau_J = static_cast<std::size_t>(need_number(tr, "transform", "tau_J"));
        cfg.transform = ch;
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        expect_keys(o, "output", {"directory", "formats"});
        if (o.contains("directory")) cfg.output.directory = o["directory"].get<std::string>();
        if (o.contains("formats")) {
            cfg.output.formats.clear();
            for (const auto& f : o["formats"]) {
                const std::string fmt = f.get<std::string>();
                if (fmt != "csv" && fmt != "json") bad_field("output.formats", "must be csv|json");
                cfg.output.formats.push_back(fmt);
            }
        }
    }

    if (doc.contains("seed")) cfg.seed = static_cast<long>(need_number(doc, "", "seed"));

    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate_config(const RunConfig& cfg) {
    Parameters prm = cfg.parameters;
    prm.kappa = effective_kappa(cfg);
    try {
        validate(prm);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    for (const std::string& name : cfg.analyses)
        if (!kKnownAnalyses.count(name))
            throw ConfigError("config field 'analyses': unknown analysis '" + name + "'");
    if (!(cfg.grid.r_max > 0.0) || cfg.grid.J < 8)
        throw ConfigError("config field 'grid': need r_max > 0 and J >= 8");
    if (!(cfg.time.T > 0.0)) throw ConfigError("config field 'time.T': must be positive");
    if (cfg.time.stride < 1) throw ConfigError("config field 'time.stride': must be >= 1");
    if (cfg.time.t_begin > 0.0) throw ConfigError("config field 'time.t_begin': must be <= 0");

    const double support = data_support_radius(cfg.data);
    const double horizon = std::max(cfg.time.T, -cfg.time.t_begin);
    if (cfg.grid.r_max < support + horizon + 2.0) {
        std::ostringstream msg;
        msg << "config field 'grid.r_max': reflection-free window rule requires r_max >= "
               "data support (" << support << ") + horizon (" << horizon << ") + 2 = "
            << support + horizon + 2.0;
        throw ConfigError(msg.str());
    }
    if (cfg.transform && cfg.time.stride != 1)
        throw ConfigError("config field 'transform': chart requests require time.stride = 1");
    if (cfg.backend == RunConfig::Backend::Picard) {
        if (cfg.picard_iters < 1)
            throw ConfigError("config field 'backend.iters': must be >= 1");
        if (cfg.time.t_begin < 0.0)
            throw ConfigError("config field 'time.t_begin': picard backend starts at t = 0");
    }
    if (cfg.time.t_begin < 0.0 && effective_kappa(cfg) != 0.0)
        throw ConfigError("config field 'time.t_begin': backward evolution requires kappa = 0");
}

namespace {

bool wants(const RunConfig& cfg, const char* name) {
    return std::find(cfg.analyses.begin(), cfg.analyses.end(), name) != cfg.analyses.end();
}

json budget_json(const BudgetEntry& b) {
    return json{{"name", b.name}, {"value", b.value}, {"bound", b.bound}, {"pass", b.pass}};
}

} // namespace

SimulationOutcome run_simulate(const RunConfig& cfg, const std::string& out_dir_arg) {
    validate_config(cfg);
    const std::string out_dir = out_dir_arg.empty() ? cfg.output.directory : out_dir_arg;
    std::filesystem::create_directories(out_dir);
    const bool csv = std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "csv") !=
                     cfg.output.formats.end();
    const bool json_out = std::find(cfg.output.formats.begin(), cfg.output.formats.end(),
                                    "json") != cfg.output.formats.end();
    auto artifact = [&](const std::string& name) { return out_dir + "/" + name; };

    const RadialGrid grid = build_grid(cfg.grid.r_max, cfg.grid.J);
    const double kappa = effective_kappa(cfg);
    const CoefficientProfile profile(cfg.profile_kind, kappa, cfg.parameters.p);
    const ReducedState data = synthesize_data(cfg.data, grid, cfg.parameters.epsilon);

    Trajectory traj =
        cfg.backend == RunConfig::Backend::Leapfrog
            ? evolve_leapfrog(data, grid, profile, cfg.time.T, cfg.time.stride, cfg.time.t_begin)
            : picard_solve(data, grid, profile, cfg.time.T, cfg.picard_iters).trajectory;

    SimulationOutcome out;
    json& summary = out.summary;
    summary["config_echo"] = json{{"p", cfg.parameters.p},
                                  {"epsilon", cfg.parameters.epsilon},
                                  {"kappa", kappa},
                                  {"J", cfg.grid.J},
                                  {"r_max", cfg.grid.r_max},
                                  {"T", cfg.time.T},
                                  {"seed", cfg.seed}};
    summary["budgets"] = json::array();

    // Energy diagnostics are always computed.
    const std::vector<std::pair<double, double>> es = energy_series(traj);
    out.E0 = es.front().second;
    out.E_last = es.back().second;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (out.E0 > 0.0) out.drift = std::max(out.drift, std::abs(es[i].second - out.E0) / out.E0);
        if (i > 0) out.max_energy_rise = std::max(out.max_energy_rise, es[i].second - es[i - 1].second);
    }
    summary["energy"] = {{"E0", out.E0}, {"E_last", out.E_last}, {"drift", out.drift},
                         {"max_rise", out.max_energy_rise}};
    if (csv && wants(cfg, "energy")) write_series_csv(artifact("energy.csv"), "time", es);

    if (kappa == 0.0 && (wants(cfg, "conservation") || wants(cfg, "energy"))) {
        BudgetEntry b{"energy_conservation", out.drift, 20.0 * grid.dr * grid.dr, true};
        b.pass = b.value <= b.bound;
        out.budgets.push_back(b);
    }
    if (kappa > 0.0) {
        BudgetEntry b{"energy_monotonicity", out.max_energy_rise, 1e-6 * out.E0, true};
        b.pass = b.value <= b.bound;
        out.budgets.push_back(b);
        if (wants(cfg, "dissipation")) {
            const DissipationCheck d = dissipation_check(traj);
            out.dissipation_defect = d.identity_defect;
            BudgetEntry acc{"dissipation", d.accumulated, d.bound, d.pass};
            out.budgets.push_back(acc);
            BudgetEntry defect{"dissipation_identity", d.identity_defect, 1e-3 * out.E0, true};
            defect.pass = defect.value <= defect.bound;
            out.budgets.push_back(defect);
            summary["dissipation"] = {{"accumulated", d.accumulated},
                                      {"identity_defect", d.identity_defect},
                                      {"bound", d.bound}};
        }
    }
    if (csv && wants(cfg, "dissipation")) {
        std::vector<std::pair<double, double>> series;
        for (const Snapshot& s : traj.snaps) series.emplace_back(s.state.t, s.accums.dissipation);
        write_series_csv(artifact("dissipation.csv"), "time", series);
    }

    if (wants(cfg, "morawetz")) {
        const BudgetEntry b = morawetz_budget(traj);
        out.morawetz_budget_value = b.value;
        out.budgets.push_back(b);
        if (csv) {
            write_series_csv(artifact("morawetz.csv"), "time", morawetz_series(traj));
            std::vector<std::pair<double, double>> series;
            for (const Snapshot& s : traj.snaps) series.emplace_back(s.state.t, s.accums.morawetz);
            write_series_csv(artifact("morawetz_budget.csv"), "time", series);
        }
        // |M| <= 4E audit at each snapshot.
        double worst = 0.0;
        for (const Snapshot& s : traj.snaps) {
            const double e = energy(s.state, grid, profile);
            if (e > 0.0) worst = std::max(worst, std::abs(morawetz_functional(s.state, grid)) / e);
        }
        BudgetEntry env{"morawetz_envelope", worst, 4.0, worst <= 4.0};
        out.budgets.push_back(env);
    }

    out.i_norm = traj.snaps.back().accums.lp2p2;
    if (wants(cfg, "i_norm")) {
        summary["i_norm"] = out.i_norm;
        if (csv) {
            std::vector<std::pair<double, double>> series;
            for (const Snapshot& s : traj.snaps) series.emplace_back(s.state.t, s.accums.lp2p2);
            write_series_csv(artifact("i_norm.csv"), "time", series);
        }
    }

    if (wants(cfg, "scattering") && traj.snaps.size() >= 5) {
        const double t_end = traj.t_last();
        const double half = traj.snaps[traj.snaps.size() / 2].state.t;
        const double quarter = traj.snaps[traj.snaps.size() / 4].state.t;
        const double d_q = scattering_defect(traj, quarter, half);
        const double d_h = scattering_defect(traj, half, t_end);
        out.scattering_defect_half = d_h;
        BudgetEntry b{"scattering_defect", d_h, 1e-2 * std::sqrt(std::max(out.E0, 0.0)), true};
        b.pass = b.value <= b.bound;
        out.budgets.push_back(b);
        summary["scattering"] = {{"defect_quarter_half", d_q},
                                 {"defect_half_end", d_h},
                                 {"decreasing", d_h <= d_q}};
        const ReducedState prof0 = scattering_profile(traj);
        if (csv) {
            std::vector<std::pair<double, double>> pu0(grid.points()), pu1(grid.points());
            const std::vector<double> u0 = recover_u(prof0.w, grid);
            const std::vector<double> u1 = recover_u(prof0.wdot, grid);
            for (std::size_t j = 0; j <= grid.J; ++j) {
                pu0[j] = {grid.r(j), u0[j]};
                pu1[j] = {grid.r(j), u1[j]};
            }
            write_series_csv(artifact("scattering_profile_u0.csv"), "r", pu0);
            write_series_csv(artifact("scattering_profile_u1.csv"), "r", pu1);
        }
    }

    if (wants(cfg, "decay")) {
        Parameters prm = cfg.parameters;
        prm.kappa = kappa;
        if (!cfg.B1_given || !cfg.C_given) {
            const DecayCalibration cal = calibrate_decay(traj, prm.R, prm.delta);
            if (!cfg.B1_given) prm.B1 = cal.B1;
            if (!cfg.C_given) prm.C_flux = cal.C;
        }
        const DecayReport rep = exterior_decay_report(traj, prm);
        out.decay_max_ratio = std::max(rep.max_es1_ratio, rep.max_char_ratio);
        BudgetEntry b{"decay_ratios", out.decay_max_ratio, 1.01, rep.pass};
        out.budgets.push_back(b);
        summary["decay"] = {{"B1", rep.B1}, {"R", rep.R}, {"C", rep.C}, {"delta", rep.delta},
                            {"max_es1_ratio", rep.max_es1_ratio},
                            {"max_char_ratio", rep.max_char_ratio},
                            {"points", rep.points}, {"pass", rep.pass}};
        if (csv) {
            std::vector<std::pair<double, double>> es1s, fls;
            for (const DecaySample& smp : rep.series) {
                es1s.emplace_back(smp.t, smp.es1);
                fls.emplace_back(smp.t, smp.flux);
            }
            write_series_csv(artifact("decay_es1.csv"), "time", es1s);
            write_series_csv(artifact("decay_flux.csv"), "time", fls);
        }
    }

    if (wants(cfg, "tail_check")) {
        double A = cfg.parameters.A;
        if (!cfg.A_given) {
            const WeightedNorms n = weighted_data_norm(data, grid, cfg.parameters.epsilon);
            A = std::max({n.norm_mu / std::sqrt(4.0 * M_PI), n.norm_r, 1e-30});
        }
        const TailCheck tc = pointwise_tail_check(data, grid, A, cfg.parameters.epsilon);
        BudgetEntry b{"pointwise_tail", tc.max_ratio, 1.0 + 1e-9, tc.pass};
        out.budgets.push_back(b);
    }

    if (cfg.transform) {
        const ChartConfig& cc = *cfg.transform;
        const HyperboloidalChart chart = make_chart(cfg.parameters.t0, cc.s_max, cc.s_J,
                                                    cc.tau_min, cc.tau_max, cc.tau_J);
        const TransformedTrajectory vtraj = push_forward(traj, chart);
        std::vector<std::pair<double, double>> etau;
        double e_min = 0.0, tau_min_witness = 0.0;
        bool have_min = false;
        for (const TransformedSlice& sl : vtraj.slices) {
            const TransformedEnergy te = transformed_energy(sl, chart, cfg.parameters.p);
            etau.emplace_back(sl.tau, te.total);
            if (sl.tau >= -1.0 - 1e-12 && sl.tau <= 1e-12) {
                if (!have_min || te.total < e_min) {
                    e_min = te.total;
                    tau_min_witness = sl.tau;
                    have_min = true;
                }
            }
        }
        summary["transformed"] = {{"E_tau_min", e_min}, {"tau_witness", tau_min_witness}};
        if (csv) write_series_csv(artifact("transformed_energy.csv"), "tau", etau);
        if (chart.tau_max > 1e-12) {
            const TransformedBudgets tb = transformed_budgets(vtraj, cfg.parameters.p);
            summary["transformed"]["i_prime"] = tb.i_prime;
            summary["transformed"]["morawetz"] = tb.morawetz;
            summary["transformed"]["i2"] = tb.i2;
            summary["transformed"]["dissipation"] = tb.dissipation;
            BudgetEntry comp{"transformed_i2_le_iprime", tb.i2, tb.i_prime, tb.i2_le_iprime};
            out.budgets.push_back(comp);
            // The (p+1)/(p-3) bound is anchored at the tau = 0 slice; it is
            // only meaningful when the chart contains that slice.
            if (cfg.parameters.p > 3.0 && tb.energy_at_zero > 0.0) {
                BudgetEntry db{"transformed_dissipation", tb.dissipation,
                               transformed_dissipation_bound(cfg.parameters.p, tb.energy_at_zero),
                               true};
                db.pass = db.value <= db.bound;
                out.budgets.push_back(db);
            }
        }
    }

    for (const BudgetEntry& b : out.budgets) {
        summary["budgets"].push_back(budget_json(b));
        out.pass = out.pass && b.pass;
    }
    summary["pass"] = out.pass;

    if (json_out) {
        std::ofstream sj(artifact("summary.json"), std::ios::trunc);
        sj << summary.dump(2) << '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification suites at pinned desk-scale resolutions.

namespace {

struct SuiteBuilder {
    VerifyOutcome out;

    void add(const std::string& name, double value, double bound, bool pass_if_le = true) {
        VerifyCheck c{name, value, bound, pass_if_le ? value <= bound : value >= bound};
        out.pass = out.pass && c.pass;
        out.checks.push_back(std::move(c));
    }

    void add_range(const std::string& name, double value, double lo, double hi) {
        VerifyCheck c{name, value, hi, value >= lo && value <= hi};
        out.pass = out.pass && c.pass;
        out.checks.push_back(std::move(c));
    }
};

DataSpec verify_gaussian() {
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Gaussian, 1.0, 1.0, 0.0};
    return spec;
}

void suite_identities(SuiteBuilder& b) {
    auto bump = [](double r, double t) {
        const double dr = r - 5.0, dt = t + 5.0;
        return std::exp(-dr * dr - dt * dt);
    };
    const Box2 rt{3.0, 7.0, -7.0, -3.0};
    const double t3 = commutator_residual_T3(bump, rt, 0.02) /
                      commutator_residual_T3(bump, rt, 0.01);
    b.add_range("commutator_T3_order2_ratio", t3, 3.5, 4.5);
    const Box2 stau{0.4, 1.4, 1.1, 2.1};
    const double t4 = commutator_residual_T4(bump, -12.0, stau, 0.02) /
                      commutator_residual_T4(bump, -12.0, stau, 0.01);
    b.add_range("commutator_T4_order2_ratio", t4, 3.5, 4.5);

    double rt_err = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double s = 4.5 * k / 63.0, tau = -2.0 + 4.0 * ((k * 29) % 64) / 63.0;
        auto [r, t] = chart_forward(s, tau, -3.0);
        auto [s2, tau2] = chart_inverse(r, t, -3.0);
        rt_err = std::max(rt_err, std::abs(s2 - s) + std::abs(tau2 - tau));
    }
    b.add("chart_roundtrip_error", rt_err, 1e-12);

    auto g_density = [](double r, double t) {
        const double a = r - 1.0, c = t - 2.5;
        return std::exp(-(a * a + c * c) / (0.25 * 0.25));
    };
    const CovCheck cov = change_of_variables_check(g_density, -2.0, Box2{0.0, 2.6, 1.0, 4.0},
                                                   Box2{0.0, 1.1, 0.7, 1.9}, 1024);
    b.add("change_of_variables_rel_diff", cov.rel_diff, 1e-3);

    double phi_bad = 0.0;
    double prev = 1.0 + 1e-15;
    for (double s = 0.0; s < 25.0; s += 0.01) {
        const double v = phi_weight(s, 3.7);
        if (v > prev || v <= 0.0 || v > 1.0) phi_bad += 1.0;
        prev = v;
    }
    b.add("phi_weight_monotone_range_violations", phi_bad, 0.0);
}

void suite_monotonicity(SuiteBuilder& b) {
    {
        RadialGrid g = build_grid(18.0, 1024);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 10.0, 32);
        const auto es = energy_series(traj);
        double drift = 0.0;
        for (const auto& [t, e] : es) drift = std::max(drift, std::abs(e - es.front().second));
        b.add("cp1_energy_drift_rel", drift / es.front().second, 20.0 * g.dr * g.dr);
    }
    {
        RadialGrid g = build_grid(28.0, 1024);
        CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 20.0, 64);
        const auto es = energy_series(traj);
        double rise = 0.0;
        for (std::size_t i = 1; i < es.size(); ++i)
            rise = std::max(rise, es[i].second - es[i - 1].second);
        b.add("damped_energy_max_rise_rel", rise / es.front().second, 1e-6);
        const DissipationCheck d = dissipation_check(traj);
        b.add("dissipation_identity_defect_rel", d.identity_defect / d.energy_first, 1e-3);
        b.add("dissipation_vs_bound", d.accumulated, d.bound);
    }
}

void suite_morawetz(SuiteBuilder& b) {
    for (const bool hyper : {false, true}) {
        RadialGrid g = build_grid(28.0, 1024);
        const double p = hyper ? 4.0 : 3.0;
        CoefficientProfile prof(hyper ? CoefficientProfile::Kind::Hyperbolic
                                      : CoefficientProfile::Kind::Unit,
                                hyper ? 1.0 : 0.0, p);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 20.0, 64);
        const BudgetEntry budget = morawetz_budget(traj);
        b.add(hyper ? "morawetz_budget_hyperbolic" : "morawetz_budget_unit", budget.value,
              budget.bound);
        double env = 0.0;
        for (const Snapshot& s : traj.snaps) {
            const double e = energy(s.state, g, prof);
            if (e > 0.0) env = std::max(env, std::abs(morawetz_functional(s.state, g)) / e);
        }
        b.add(hyper ? "morawetz_envelope_hyperbolic" : "morawetz_envelope_unit", env, 4.0);
    }
    auto weight_err = [&](double h) {
        CoefficientProfile prof(CoefficientProfile::Kind::Hyperbolic, 1.0, 4.0);
        double worst = 0.0;
        for (double s = 0.3; s < 12.0; s += 0.37) {
            const double fd = 3.0 * phi_weight(s, 4.0) -
                              s * (phi_weight(s + h, 4.0) - phi_weight(s - h, 4.0)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - prof.morawetz_weight(s)));
        }
        return worst;
    };
    b.add_range("morawetz_weight_fd_ratio", weight_err(1e-2) / weight_err(5e-3), 3.5, 4.5);
}

void suite_transform(SuiteBuilder& b) {
    const double t0 = -std::sqrt(2.0) - 1.0;
    auto residual = [&](std::size_t J) {
        RadialGrid g = build_grid(12.0, J);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 4.0, 1, -2.0);
        HyperboloidalChart chart = make_chart(t0, 2.0, 50, -0.5, 0.5, 25);
        return cp2_residual_max(push_forward(traj, chart), 3.0);
    };
    b.add_range("cp2_residual_order2_ratio", residual(512) / residual(1024), 3.0, 5.5);

    auto emin = [&](std::size_t J) {
        RadialGrid g = build_grid(16.0, J);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 7.7, 1, -2.1);
        HyperboloidalChart chart = make_chart(t0, 3.0, 120, -1.0, 0.0, 20);
        TransformedTrajectory vt = push_forward(traj, chart);
        double m = 0.0;
        bool first = true;
        for (const TransformedSlice& sl : vt.slices) {
            const double e = transformed_energy(sl, chart, 3.0).total;
            if (first || e < m) m = e;
            first = false;
        }
        return m;
    };
    const double m1 = emin(1024), m2 = emin(2048);
    b.add("transformed_energy_min_rel_change", std::abs(m1 - m2) / m2, 0.10);
}

void suite_scattering(SuiteBuilder& b) {
    {
        RadialGrid g = build_grid(51.2, 1024);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        Trajectory traj =
            evolve_leapfrog(synthesize_data(verify_gaussian(), g, 0.5), g, prof, 40.0, 20);
        const double d1 = scattering_defect(traj, 10.0, 20.0);
        const double d2 = scattering_defect(traj, 20.0, 40.0);
        b.add("scattering_defect_decreasing", d2, d1);
        const double e0 = energy(traj.snaps.front().state, g, prof);
        b.add("scattering_defect_small", d2, 1e-2 * std::sqrt(e0));
        const double i20 = traj.at_time(20.0).accums.lp2p2;
        const double i40 = traj.at_time(40.0).accums.lp2p2;
        b.add("i_norm_increment_rel", (i40 - i20) / i20, 0.10);
    }
    {
        RadialGrid g = build_grid(12.0, 512);
        CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
        ReducedState data = synthesize_data(verify_gaussian(), g, 0.5);
        PicardResult pr = picard_solve(data, g, prof, 0.5, 8);
        Trajectory lf = evolve_leapfrog(data, g, prof, 0.5, 1);
        double gap = 0.0;
        for (std::size_t i = 0; i < pr.trajectory.snaps.size(); ++i) {
            const auto& a = pr.trajectory.snaps[i].state.w;
            const auto& c = lf.snaps[i].state.w;
            for (std::size_t j = 0; j < a.size(); ++j)
                gap = std::max(gap, std::abs(a[j] - c[j]));
        }
        b.add("backend_gap", gap, 10.0 * g.dr * g.dr);
    }
}

void suite_decay(SuiteBuilder& b) {
    RadialGrid g = build_grid(28.0, 2048);
    CoefficientProfile prof(CoefficientProfile::Kind::Unit, 0.0, 3.0);
    DataSpec spec;
    spec.u0 = {DataComponent::Family::Tail, 1.0, 1.0, 0.0, 0.5, 2.0};
    Parameters prm;
    prm.epsilon = 0.5;
    prm.delta = 0.1;
    prm.R = 4.0;
    Trajectory traj = evolve_leapfrog(synthesize_data(spec, g, prm.epsilon), g, prof, 12.0, 32);
    const DecayCalibration cal = calibrate_decay(traj, prm.R, prm.delta);
    prm.B1 = cal.B1;
    prm.C_flux = cal.C;
    const DecayReport rep = exterior_decay_report(traj, prm);
    b.add("decay_es1_max_ratio", rep.max_es1_ratio, 1.01);
    b.add("decay_flux_max_ratio", rep.max_char_ratio, 1.01);
    b.add("decay_sampled_points", rep.points > 0 ? 0.0 : 1.0, 0.0);
}

} // namespace

VerifyOutcome run_verify(const std::string& suite, const std::string& out_dir) {
    SuiteBuilder builder;
    builder.out.suite = suite;
    if (suite == "identities")
        suite_identities(builder);
    else if (suite == "monotonicity")
        suite_monotonicity(builder);
    else if (suite == "morawetz")
        suite_morawetz(builder);
    else if (suite == "transform")
        suite_transform(builder);
    else if (suite == "scattering")
        suite_scattering(builder);
    else if (suite == "decay")
        suite_decay(builder);
    else if (suite == "all") {
        suite_identities(builder);
        suite_monotonicity(builder);
        suite_morawetz(builder);
        suite_transform(builder);
        suite_scattering(builder);
        suite_decay(builder);
    } else {
        throw ConfigError("unknown verify suite '" + suite + "'");
    }

    VerifyOutcome& out = builder.out;
    out.verdict = json{{"suite", out.suite}, {"checks", json::array()}, {"pass", out.pass}};
    for (const VerifyCheck& c : out.checks)
        out.verdict["checks"].push_back(
            json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir + "/verify_" + suite + ".json", std::ios::trunc);
        f << out.verdict.dump(2) << '\n';
    }
    return out;
}

} // namespace rwave
