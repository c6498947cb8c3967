#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwave/data.hpp"
#include "rwave/functionals.hpp"
#include "rwave/params.hpp"
#include "rwave/profile.hpp"
#include "rwave/transform.hpp"

namespace rwave {

struct GridConfig {
    double r_max = 18.0;
    std::size_t J = 1024;
};

struct TimeConfig {
    double T = 10.0;
    long stride = 1;
    double t_begin = 0.0;
};

struct ChartConfig {
    double s_max = 3.0;
    std::size_t s_J = 128;
    double tau_min = -1.0;
    double tau_max = 0.0;
    std::size_t tau_J = 32;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};
};

struct RunConfig {
    Parameters parameters;
    bool kappa_auto = false;  // "kappa": "p-3"
    bool A_given = false;
    bool B1_given = false;
    bool C_given = false;
    GridConfig grid;
    TimeConfig time;
    DataSpec data;
    CoefficientProfile::Kind profile_kind = CoefficientProfile::Kind::Unit;
    enum class Backend { Leapfrog, Picard };
    Backend backend = Backend::Leapfrog;
    int picard_iters = 8;
    std::vector<std::string> analyses = {"energy"};
    std::optional<ChartConfig> transform;
    OutputConfig output;
    long seed = 0;  // reserved; all generators are deterministic
};

// Parses and validates a run-config JSON document. Unknown keys and
// violated invariants raise ConfigError naming the field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);
void validate_config(const RunConfig& cfg);

// Effective damping exponent of a config (resolves "p-3").
double effective_kappa(const RunConfig& cfg);

// Scalar summary of one simulation, also serialized into summary.json.
struct SimulationOutcome {
    double E0 = 0.0;
    double E_last = 0.0;
    double drift = 0.0;           // max |E - E0| / E0 over snapshots
    double max_energy_rise = 0.0; // max positive jump between snapshots
    double i_norm = 0.0;          // IntInt |u|^{2(p-1)}
    double morawetz_budget_value = 0.0;
    double dissipation_defect = 0.0;
    double scattering_defect_half = 0.0;  // defect(T/2, T)
    double decay_max_ratio = 0.0;
    std::vector<BudgetEntry> budgets;
    bool pass = true;
    nlohmann::ordered_json summary;
};

// Runs a config and writes deterministic artifacts (CSV series + summary
// JSON) into out_dir (falls back to cfg.output.directory when empty).
SimulationOutcome run_simulate(const RunConfig& cfg, const std::string& out_dir = "");

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct VerifyOutcome {
    std::string suite;
    std::vector<VerifyCheck> checks;
    bool pass = true;
    nlohmann::ordered_json verdict;
};

// Runs a named property suite at pinned desk-scale resolutions.
// Suites: identities | monotonicity | morawetz | transform | scattering |
// decay | all. Unknown names raise ConfigError.
VerifyOutcome run_verify(const std::string& suite, const std::string& out_dir = "");

// Serialization helpers shared by the writers (17 significant digits).
std::string format_double(double x);
void write_series_csv(const std::string& path, const char* abscissa,
                      const std::vector<std::pair<double, double>>& series);

} // namespace rwave
