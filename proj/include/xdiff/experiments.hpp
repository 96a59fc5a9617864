#pragma once
#include <string>
#include <vector>

#include "xdiff/config.hpp"

namespace xdiff {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ExperimentReport {
    std::string preset;
    std::vector<CheckResult> checks;
    bool all_pass() const;
    std::string to_text() const;
};

// Preset experiments: lyapunov, mass-mean, pattern, logistic. Artifacts
// (CSV, snapshots, heatmaps, summary.txt) land under cfg.out_dir/<preset>.
ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg);

// Plain run of a config: CSV + final snapshots, returns completion status.
ExperimentReport run_plain(const RunConfig& cfg);

struct RefinementLevel {
    int nx = 0;
    double dt = 0.0;
};

struct RefinementRow {
    int nx = 0;
    double h = 0.0;
    double dt = 0.0;
    double lyap = 0.0;
    double k_res = 0.0;
    double weak_u = 0.0;
    double weak_v = 0.0;
};

struct RefinementTable {
    std::vector<RefinementRow> rows;
    double order_lyap = 0.0;
    double order_k = 0.0;
    double order_weak_u = 0.0;
    double order_weak_v = 0.0;
    bool at_floor = false;
    std::string to_text() const;
};

// Runs the config at each refinement level (fixed dt) and fits the log-log
// slope of every residual against dt. Needs >= 3 geometric levels.
RefinementTable refinement_study(const RunConfig& base,
                                 const std::vector<RefinementLevel>& levels);

// Least-squares slope of log(y) vs log(x); the shared fit helper.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

// Cap on concurrent sweep runs (XDIFF_THREADS, default hardware).
int sweep_thread_cap();

}  // namespace xdiff
