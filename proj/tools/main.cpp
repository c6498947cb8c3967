// radialwave - command-line front end, talking to the core through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radialwave.h"

namespace {

int map_exit(rw_status st, int pass) {
    switch (st) {
        case RW_OK:
            return pass ? 0 : 1;
        case RW_ERR_CONFIG:
        case RW_ERR_INVALID_ARGUMENT:
        case RW_ERR_COVERAGE:
        case RW_ERR_IO:
            return 2;
        case RW_ERR_NUMERICAL:
        case RW_ERR_NO_CONTRACTION:
        case RW_ERR_UNKNOWN:
            return 3;
    }
    return 3;
}

void report_error(rw_status st) {
    if (st != RW_OK) std::fprintf(stderr, "error: %s\n", rw_last_error());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radialwave - defocusing radial wave equation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string suite;
    std::vector<std::string> axes;
    long seed = 0;  // reserved; all generators are deterministic

    CLI::App* simulate = app.add_subcommand("simulate", "run one configuration");
    simulate->add_option("--config", config_path, "run-config JSON file")->required();
    simulate->add_option("--out", out_dir, "output directory (defaults to config output.directory)");
    simulate->add_option("--seed", seed, "reserved");

    CLI::App* verify = app.add_subcommand("verify", "run a named property suite");
    verify->add_option("--suite", suite,
                       "identities|monotonicity|morawetz|transform|scattering|decay|all")
        ->required();
    verify->add_option("--out", out_dir, "directory for the JSON verdict");
    verify->add_option("--seed", seed, "reserved");

    CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
    sweep->add_option("--config", config_path, "base run-config JSON file")->required();
    sweep->add_option("--axis", axes, "axis spec, e.g. p=3,3.5,4 (repeatable)");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "reserved");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        int pass = 0;
        char* summary = nullptr;
        const rw_status st = rw_run_simulate_file(config_path.c_str(),
                                                  out_dir.empty() ? nullptr : out_dir.c_str(),
                                                  &pass, &summary);
        if (summary) {
            std::printf("%s\n", summary);
            rw_string_free(summary);
        }
        report_error(st);
        return map_exit(st, pass);
    }

    if (verify->parsed()) {
        int pass = 0;
        char* verdict = nullptr;
        const rw_status st = rw_run_verify(suite.c_str(),
                                           out_dir.empty() ? nullptr : out_dir.c_str(), &pass,
                                           &verdict);
        if (verdict) {
            std::printf("%s\n", verdict);
            rw_string_free(verdict);
        }
        report_error(st);
        return map_exit(st, pass);
    }

    // sweep
    std::string spec;
    for (const std::string& a : axes) {
        if (!spec.empty()) spec += ';';
        spec += a;
    }
    int pass = 0;
    char* table = nullptr;
    const rw_status st = rw_run_sweep_file(config_path.c_str(), spec.c_str(),
                                           out_dir.empty() ? nullptr : out_dir.c_str(), &pass,
                                           &table);
    if (table) {
        std::printf("%s", table);
        rw_string_free(table);
    }
    report_error(st);
    return map_exit(st, pass);
}
