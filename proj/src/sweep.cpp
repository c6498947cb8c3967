#include "rwave/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "rwave/errors.hpp"

namespace rwave {

namespace {

std::size_t thread_cap() {
    if (const char* env = std::getenv("RADIALWAVE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

RunConfig specialize(const RunConfig& base, double p, double eps, const std::string& family,
                     std::size_t index) {
    RunConfig cfg = base;
    cfg.parameters.p = p;
    cfg.parameters.epsilon = eps;
    cfg.parameters.delta = derive_delta(eps);
    if (!family.empty()) {
        DataComponent& c = cfg.data.u0;
        const double amplitude = c.amplitude != 0.0 ? c.amplitude : 1.0;
        if (family == "gaussian") {
            c = DataComponent{DataComponent::Family::Gaussian, amplitude, 1.0, 0.0};
        } else if (family == "tail") {
            DataComponent t{DataComponent::Family::Tail, amplitude, 1.0, 0.0, 0.5, 0.0};
            t.cutoff = std::min(4.0, cfg.grid.r_max / 6.0);
            c = t;
        } else {
            throw ConfigError("sweep axis 'family': unknown family '" + family + "'");
        }
    }
    cfg.output.directory = base.output.directory + "/run_" + std::to_string(index);
    return cfg;
}

} // namespace

void parse_axis(SweepAxes& axes, const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
        throw ConfigError("sweep axis '" + text + "': expected name=v1,v2,...");
    const std::string name = text.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
    }
    if (values.empty()) throw ConfigError("sweep axis '" + name + "': no values");
    if (name == "p" || name == "epsilon") {
        for (const std::string& v : values) {
            char* end = nullptr;
            const double x = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0')
                throw ConfigError("sweep axis '" + name + "': bad number '" + v + "'");
            (name == "p" ? axes.p : axes.epsilon).push_back(x);
        }
    } else if (name == "family") {
        axes.family = values;
    } else {
        throw ConfigError("sweep axis '" + name + "': unknown axis (use p, epsilon, family)");
    }
}

SweepResultTable run_sweep(const RunConfig& base, const SweepAxes& axes,
                           const std::string& out_dir, std::size_t cap) {
    const std::vector<double> ps = axes.p.empty() ? std::vector<double>{base.parameters.p} : axes.p;
    const std::vector<double> es =
        axes.epsilon.empty() ? std::vector<double>{base.parameters.epsilon} : axes.epsilon;
    const std::vector<std::string> fams =
        axes.family.empty() ? std::vector<std::string>{""} : axes.family;

    const std::size_t total = ps.size() * es.size() * fams.size();
    if (total > cap)
        throw ConfigError("sweep size " + std::to_string(total) + " exceeds the cap of " +
                          std::to_string(cap));

    // Expand and validate every combination up front so config errors arrive
    // before any work starts.
    std::vector<RunConfig> runs;
    std::vector<SweepRow> rows;
    std::size_t index = 0;
    RunConfig root = base;
    root.output.directory = out_dir.empty() ? base.output.directory : out_dir;
    for (const double p : ps) {
        for (const double eps : es) {
            for (const std::string& fam : fams) {
                RunConfig cfg = specialize(root, p, eps, fam, index);
                validate_config(cfg);
                runs.push_back(cfg);
                SweepRow row;
                row.p = p;
                row.epsilon = eps;
                row.family = fam.empty()
                                 ? (base.data.u0.family == DataComponent::Family::Tail ? "tail"
                                                                                       : "gaussian")
                                 : fam;
                rows.push_back(row);
                ++index;
            }
        }
    }

    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min(thread_cap(), runs.size());
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= runs.size()) return;
            SweepRow& row = rows[i];
            try {
                const SimulationOutcome res = run_simulate(runs[i]);
                row.E0 = res.E0;
                row.drift = res.drift;
                row.dissipation_defect = res.dissipation_defect;
                row.morawetz = res.morawetz_budget_value;
                row.i_norm = res.i_norm;
                row.scattering_defect = res.scattering_defect_half;
                row.decay_max_ratio = res.decay_max_ratio;
                row.pass = res.pass;
            } catch (const NumericalBlowup& e) {
                row.status = std::string("numerical: ") + e.what();
            } catch (const NoContraction& e) {
                row.status = std::string("numerical: ") + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& th : pool) th.join();

    SweepResultTable table;
    table.rows = std::move(rows);
    for (const SweepRow& row : table.rows)
        table.pass = table.pass && row.pass && row.status == "ok";

    // Single-threaded aggregation.
    const std::string dir = root.output.directory;
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir + "/sweep.csv", std::ios::trunc);
    csv << "p,epsilon,family,E0,drift,dissipation_defect,morawetz,i_norm,scattering_defect,"
           "decay_max_ratio,pass,status\n";
    for (const SweepRow& row : table.rows) {
        csv << format_double(row.p) << ',' << format_double(row.epsilon) << ',' << row.family
            << ',' << format_double(row.E0) << ',' << format_double(row.drift) << ','
            << format_double(row.dissipation_defect) << ',' << format_double(row.morawetz) << ','
            << format_double(row.i_norm) << ',' << format_double(row.scattering_defect) << ','
            << format_double(row.decay_max_ratio) << ',' << (row.pass ? "true" : "false") << ','
            << row.status << '\n';
    }
    return table;
}

} // namespace rwave
