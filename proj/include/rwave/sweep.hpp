#pragma once

#include <string>
#include <vector>

#include "rwave/runner.hpp"

namespace rwave {

struct SweepAxes {
    std::vector<double> p;
    std::vector<double> epsilon;
    std::vector<std::string> family;
};

struct SweepRow {
    double p = 0.0;
    double epsilon = 0.0;
    std::string family;
    double E0 = 0.0;
    double drift = 0.0;
    double dissipation_defect = 0.0;
    double morawetz = 0.0;
    double i_norm = 0.0;
    double scattering_defect = 0.0;
    double decay_max_ratio = 0.0;
    bool pass = false;
    std::string status = "ok";
};

struct SweepResultTable {
    std::vector<SweepRow> rows;
    bool pass = true;
};

// Cartesian sweep over the requested axes (size cap 64). Runs are
// independent; parallelism is capped by the RADIALWAVE_THREADS environment
// variable. Per-run artifacts land in out_dir/run_NNN, the aggregate table
// in out_dir/sweep.csv.
SweepResultTable run_sweep(const RunConfig& base, const SweepAxes& axes,
                           const std::string& out_dir, std::size_t cap = 64);

// Parses an axis option of the form "p=3,3.5,4" | "epsilon=0.3,0.5" |
// "family=gaussian,tail" into the axes struct.
void parse_axis(SweepAxes& axes, const std::string& text);

} // namespace rwave
