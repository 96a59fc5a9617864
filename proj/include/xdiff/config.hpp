#pragma once
#include <cstdint>
#include <string>

#include "xdiff/dynamics.hpp"

namespace xdiff {

// Flat `[section] key = value` run configuration. Unknown keys, type
// mismatches and constraint violations are reported with their line number.
struct RunConfig {
    // [domain]
    int dim = 1;
    double lx = 1.0;
    int nx = 128;
    int ny = 0;  // required iff dim == 2; ly = ny * lx/nx

    // [model]
    double epsilon = 1.0;
    std::string motility = "prototype";  // prototype | power | exponential
    double k = 1.0;
    double mollify_eta = 0.0;  // 0 disables mollification
    std::string growth = "none";  // none | logistic
    double h0 = 1.0;
    double l = 1.0;
    double source_eta = 0.0;
    double cfl_safety = 0.4;
    double dt_min = 1e-13;
    double fixed_dt = 0.0;  // 0 = adaptive CFL policy

    // [initial]
    std::string initial = "perturbed_constant";  // perturbed_constant | file | steady_pattern
    double mean_u = 1.0;
    double mean_v = 1.0;
    double amplitude = 0.1;
    std::string file_u;
    std::string file_v;
    double pattern_d = 0.05;
    double pattern_k = 2.0;
    std::uint64_t seed = 1;

    // [time]
    double t_end = 1.0;
    int observer_stride = 100;
    int snapshot_count = 0;

    // [output]
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_snapshots = false;
    bool write_heatmaps = false;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string render_config(const RunConfig& c);

// Materialized run inputs built from a validated config.
struct RunSetup {
    Grid grid;
    ModelParams params;
    State initial;
    RunOptions opts;
};

RunSetup build_setup(const RunConfig& c);

}  // namespace xdiff
