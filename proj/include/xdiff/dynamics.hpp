#pragma once
#include <optional>
#include <string>
#include <vector>

#include "xdiff/diagnostics.hpp"
#include "xdiff/elliptic.hpp"
#include "xdiff/motility.hpp"
#include "xdiff/state.hpp"

namespace xdiff {

struct ModelParams {
    double epsilon = 1.0;
    Motility motility = MotilitySpec::prototype(1.0);
    GrowthSpec growth = GrowthSpec::none();
    double source_eta = 0.0;  // 0 = plain source u; > 0 = saturated u/(1+eta u)
    double cfl_safety = 0.4;
    double dt_min = 1e-13;
    std::optional<double> fixed_dt;  // bypasses the CFL policy when set
};

// Largest stable explicit step: cfl_safety * h^2 / (2 dim max gamma(v)).
double stable_dt(const State& s, const ModelParams& p);

// One IMEX step: conservative explicit update of u (Laplacian of the product
// u gamma(v), plus the explicit growth term), then the unconditionally stable
// implicit solve for v. Throws PositivityViolation when u turns negative.
State step(const State& s, const ModelParams& p, double dt, const EllipticSolver& solver);

struct RunOptions {
    double t_end = 1.0;
    int observer_stride = 1;
    int snapshot_count = 0;  // uniformly spaced (t,u,v) samples kept in memory
    EllipticSolver::Method method = EllipticSolver::Method::SpectralCosine;
};

struct RunResult {
    State final_state;
    std::vector<DiagnosticsRecord> records;
    Trajectory snapshots;
    bool completed = true;
    std::string abort_reason;
    long accepted_steps = 0;
    long rejected_steps = 0;
    double m = 0.0;  // mean of the initial density, the diagnostics anchor
};

// Advance to t_end with adaptive (or fixed) dt, recording diagnostics every
// observer_stride accepted steps and at both endpoints. Positivity failures
// retry with halved dt up to 20 times; a run that still fails returns the
// partial trajectory flagged incomplete. Deterministic for identical inputs.
RunResult run(const ModelParams& p, const State& initial, const RunOptions& opts);

}  // namespace xdiff
