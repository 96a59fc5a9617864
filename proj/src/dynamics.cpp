#include "xdiff/dynamics.hpp"

#include <cmath>

namespace xdiff {

namespace {

double max_gamma_on(const Motility& m, const Field& v) {
    double mx = 0.0;
    std::visit(
        [&](const auto& g) {
            for (double z : v.v) mx = std::max(mx, g.value(z));
        },
        m);
    return mx;
}

void validate_initial(const State& s) {
    if (!(s.u.grid == s.v.grid)) throw StructuralError("u and v live on different grids");
    if (!all_finite(s.u) || !all_finite(s.v)) throw StructuralError("initial data not finite");
    if (min_of(s.u) < 0.0) throw DomainError("initial density must be nonnegative");
    if (!(min_of(s.v) > 0.0)) throw DomainError("initial concentration must be positive");
}

}  // namespace

double stable_dt(const State& s, const ModelParams& p) {
    const double h = s.u.grid.h;
    const double gmax = max_gamma_on(p.motility, s.v);
    const double dt = p.cfl_safety * h * h / (2.0 * s.u.grid.dim * gmax);
    if (dt < p.dt_min)
        throw StiffnessError("stable dt " + std::to_string(dt) + " fell below dt_min");
    return dt;
}

State step(const State& s, const ModelParams& p, double dt, const EllipticSolver& solver) {
    if (!(dt > 0)) throw DomainError("dt must be positive");
    const int n = s.u.size();

    Field prod = gamma_field(p.motility, s.v);
    for (int i = 0; i < n; ++i) prod.v[i] *= s.u.v[i];
    const Field lap = laplacian_neumann(prod);

    State next;
    next.t = s.t + dt;
    next.u = Field(s.u.grid);
    const bool grows = p.growth.kind != GrowthSpec::Kind::None;
    for (int i = 0; i < n; ++i) {
        double un = s.u.v[i] + dt * lap.v[i];
        if (grows) {
            const double reaction = 1.0 + dt * p.growth.value(s.u.v[i]);
            if (reaction < 0.0)
                throw PositivityViolation("growth term overshot", s.u.v[i] * reaction);
            un += dt * s.u.v[i] * p.growth.value(s.u.v[i]);
        }
        next.u.v[i] = un;
    }
    const double umin = min_of(next.u);
    if (umin < 0.0) throw PositivityViolation("explicit update produced negative density", umin);

    const double lambda = p.epsilon / dt;
    Field rhs(s.v.grid);
    for (int i = 0; i < n; ++i) {
        const double src =
            p.source_eta > 0.0 ? s.u.v[i] / (1.0 + p.source_eta * s.u.v[i]) : s.u.v[i];
        rhs.v[i] = src + lambda * s.v.v[i];
    }
    next.v = solver.solve_helmholtz(rhs, lambda);
    return next;
}

RunResult run(const ModelParams& p, const State& initial, const RunOptions& opts) {
    validate_initial(initial);
    if (!(opts.t_end >= initial.t)) throw DomainError("t_end must not precede the initial time");

    RunResult res;
    res.m = mean(initial.u);

    const EllipticSolver solver(initial.u.grid, opts.method);
    const G0Evaluator g0(p.motility, res.m);
    DiagnosticsContext ctx{p.motility, p.growth, p.epsilon, res.m};

    State state = initial;
    res.records.push_back(compute_record(state, ctx, g0, solver));

    // Uniform snapshot schedule; each sample stores its true time.
    std::vector<double> snap_times;
    if (opts.snapshot_count >= 2) {
        for (int k = 0; k < opts.snapshot_count; ++k)
            snap_times.push_back(initial.t +
                                 (opts.t_end - initial.t) * k / (opts.snapshot_count - 1));
        res.snapshots.push_back({state.t, state.u, state.v});
    }
    std::size_t next_snap = 1;

    const double t_tol = 1e-12 * std::max(1.0, std::abs(opts.t_end));
    State prev = state;
    double last_dt = 0.0;
    long steps_since_record = 0;

    while (state.t < opts.t_end - t_tol) {
        double dt;
        try {
            dt = p.fixed_dt ? *p.fixed_dt : stable_dt(state, p);
        } catch (const StiffnessError& e) {
            res.completed = false;
            res.abort_reason = e.what();
            break;
        }
        // Clamp the last step to land on t_end, but leave dt untouched when
        // the remainder equals dt up to rounding so that a run split at a
        // step boundary reproduces the unsplit run bitwise.
        const double remaining = opts.t_end - state.t;
        if (remaining < dt * (1.0 - 1e-9)) dt = remaining;

        bool accepted = false;
        State candidate;
        for (int attempt = 0; attempt <= 20; ++attempt) {
            try {
                candidate = step(state, p, dt, solver);
                accepted = true;
                break;
            } catch (const PositivityViolation&) {
                ++res.rejected_steps;
                dt *= 0.5;
                if (dt < p.dt_min) break;
            }
        }
        if (!accepted) {
            res.completed = false;
            res.abort_reason = "positivity violation persisted after 20 dt halvings";
            break;
        }

        prev = state;
        state = std::move(candidate);
        last_dt = dt;
        ++res.accepted_steps;
        ++steps_since_record;

        const bool at_end = state.t >= opts.t_end - t_tol;
        if (steps_since_record >= opts.observer_stride || at_end) {
            std::optional<double> hint;
            if (res.records.back().t == prev.t) hint = res.records.back().L0;
            res.records.push_back(compute_record(prev, state, ctx, g0, solver, hint));
            steps_since_record = 0;
        }
        while (next_snap < snap_times.size() && state.t >= snap_times[next_snap] - t_tol) {
            res.snapshots.push_back({state.t, state.u, state.v});
            ++next_snap;
        }
    }

    (void)last_dt;
    res.final_state = std::move(state);
    return res;
}

}  // namespace xdiff
