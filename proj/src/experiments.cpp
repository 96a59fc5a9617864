#include "xdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "xdiff/io.hpp"
#include "xdiff/steady.hpp"

namespace xdiff {

namespace fs = std::filesystem;

bool ExperimentReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string ExperimentReport::to_text() const {
    std::ostringstream o;
    o << "experiment: " << preset << "\n";
    for (const auto& c : checks) {
        o << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": value=" << format_double(c.value)
          << " threshold=" << format_double(c.threshold);
        if (!c.detail.empty()) o << " (" << c.detail << ")";
        o << "\n";
    }
    o << (all_pass() ? "result: PASS\n" : "result: FAIL\n");
    return o.str();
}

int sweep_thread_cap() {
    if (const char* env = std::getenv("XDIFF_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

SpaceTimeTest standard_test(double T, double lx) {
    const double wx = M_PI / lx;
    SpaceTimeTest t;
    t.phi = [T, wx](double tt, double x, double) {
        return std::sin(M_PI * tt / T) * std::cos(wx * x);
    };
    t.dphi_dt = [T, wx](double tt, double x, double) {
        return M_PI / T * std::cos(M_PI * tt / T) * std::cos(wx * x);
    };
    t.lap_phi = [T, wx](double tt, double x, double) {
        return -wx * wx * std::sin(M_PI * tt / T) * std::cos(wx * x);
    };
    return t;
}

void write_run_artifacts(const RunConfig& cfg, const std::string& sub, const RunResult& res,
                         std::size_t max_csv_rows = 4000) {
    const fs::path dir = fs::path(cfg.out_dir) / sub;
    fs::create_directories(dir);
    if (cfg.write_csv) {
        std::vector<DiagnosticsRecord> thin;
        const std::size_t stride = std::max<std::size_t>(1, res.records.size() / max_csv_rows);
        for (std::size_t i = 0; i < res.records.size(); i += stride) thin.push_back(res.records[i]);
        if (!res.records.empty() && (res.records.size() - 1) % stride != 0)
            thin.push_back(res.records.back());
        write_diagnostics_csv(thin, (dir / "diagnostics.csv").string());
    }
    if (cfg.write_snapshots) {
        write_snapshot(res.final_state.u, res.final_state.t, (dir / "u_final.snap").string());
        write_snapshot(res.final_state.v, res.final_state.t, (dir / "v_final.snap").string());
    }
    if (cfg.write_heatmaps) {
        write_pgm(res.final_state.u, (dir / "u_final.pgm").string());
        write_pgm(res.final_state.v, (dir / "v_final.pgm").string());
    }
}

ExperimentReport preset_mass_mean(RunConfig cfg) {
    ExperimentReport rep;
    rep.preset = "mass-mean";
    cfg.growth = "none";
    cfg.source_eta = 0.0;
    RunSetup setup = build_setup(cfg);
    const EllipticSolver solver(setup.grid);

    // Long adaptive run, stepping by hand to watch every step.
    State s = setup.initial;
    const double mass0 = integrate(s.u);
    const double m = mean(s.u);
    const long n_steps = 100000;
    double worst_drift = 0.0, worst_recursion = 0.0;
    for (long n = 0; n < n_steps; ++n) {
        const double dt = stable_dt(s, setup.params);
        const double mv_prev = mean(s.v);
        s = step(s, setup.params, dt, solver);
        worst_drift = std::max(worst_drift, std::abs(integrate(s.u) - mass0) / mass0);
        const double predicted = (setup.params.epsilon * mv_prev + dt * m) /
                                 (setup.params.epsilon + dt);
        worst_recursion = std::max(worst_recursion, std::abs(mean(s.v) - predicted));
    }
    rep.checks.push_back({"mass_drift_1e5_steps", worst_drift <= 1e-11, worst_drift, 1e-11,
                          "relative drift of total mass"});
    rep.checks.push_back({"mean_v_recursion", worst_recursion <= 1e-12, worst_recursion, 1e-12,
                          "per-step implicit mean identity"});

    // dt refinement against the exponential relaxation of <v>.
    std::vector<double> dts = {1e-5, 5e-6, 2.5e-6};
    std::vector<double> devs;
    const double T = 0.5;
    for (double dt : dts) {
        State st = setup.initial;
        const double v0 = mean(st.v);
        double dev = 0.0;
        while (st.t < T - 1e-12) {
            const double step_dt = std::min(dt, T - st.t);
            st = step(st, setup.params, step_dt, solver);
            const double exact = v0 * std::exp(-st.t / setup.params.epsilon) +
                                 m * (1.0 - std::exp(-st.t / setup.params.epsilon));
            dev = std::max(dev, std::abs(mean(st.v) - exact));
        }
        devs.push_back(dev);
    }
    const double order = fitted_order(dts, devs);
    rep.checks.push_back({"mean_relaxation_order", order >= 0.9, order, 0.9,
                          "fitted dt-order of deviation from the exponential formula"});

    const fs::path dir = fs::path(cfg.out_dir) / "mass-mean";
    fs::create_directories(dir);
    return rep;
}

struct LyapunovRun {
    int nx = 0;
    double avg_dt = 0.0;
    double median_residual = 0.0;
    bool monotone = true;
    double worst_uphill = 0.0;
    double balance = 0.0;  // (L0_final + int D0) / L0_initial
    RunResult result;
};

LyapunovRun lyapunov_single(const RunConfig& cfg) {
    RunSetup setup = build_setup(cfg);
    setup.opts.observer_stride = 1;  // the decay check is per step
    LyapunovRun out;
    out.nx = cfg.nx;
    out.result = run(setup.params, setup.initial, setup.opts);
    const auto& rec = out.result.records;
    if (rec.size() < 3) throw Error("lyapunov run produced too few records");
    out.avg_dt = (rec.back().t - rec.front().t) / (double)(rec.size() - 1);

    std::vector<double> residuals;
    double int_d0 = 0.0;
    for (std::size_t i = 1; i < rec.size(); ++i) {
        const double dt = rec[i].t - rec[i - 1].t;
        const double slack = 10.0 * rec[i].lyap_residual * dt + 1e-14 * rec.front().L0;
        const double uphill = rec[i].L0 - rec[i - 1].L0;
        if (uphill > slack) {
            out.monotone = false;
            out.worst_uphill = std::max(out.worst_uphill, uphill - slack);
        }
        residuals.push_back(rec[i].lyap_residual);
        const double d0a = rec[i - 1].D0_grad + rec[i - 1].D0_relax + rec[i - 1].D0_mono;
        const double d0b = rec[i].D0_grad + rec[i].D0_relax + rec[i].D0_mono;
        int_d0 += 0.5 * (d0a + d0b) * dt;
    }
    out.median_residual = median(residuals);
    out.balance = (rec.back().L0 + int_d0) / rec.front().L0;
    return out;
}

ExperimentReport preset_lyapunov(RunConfig cfg) {
    ExperimentReport rep;
    rep.preset = "lyapunov";
    cfg.growth = "none";

    const std::vector<int> resolutions = {64, 128, 256};
    std::vector<LyapunovRun> runs(resolutions.size());
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::string first_error;
    std::size_t next = 0;
    const int cap = std::min<int>(sweep_thread_cap(), (int)resolutions.size());
    std::mutex next_mutex;
    for (int t = 0; t < cap; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t idx;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= resolutions.size()) return;
                    idx = next++;
                }
                try {
                    RunConfig c = cfg;
                    c.nx = resolutions[idx];
                    runs[idx] = lyapunov_single(c);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (!first_error.empty()) throw Error("lyapunov sweep failed: " + first_error);

    bool monotone = true;
    double worst = 0.0, worst_balance = 0.0;
    std::vector<double> dts, residuals;
    for (const auto& r : runs) {
        monotone = monotone && r.monotone;
        worst = std::max(worst, r.worst_uphill);
        worst_balance = std::max(worst_balance, r.balance);
        dts.push_back(r.avg_dt);
        residuals.push_back(r.median_residual);
    }
    rep.checks.push_back({"L0_nonincreasing", monotone, worst, 0.0,
                          "largest increase beyond the 10x residual slack"});
    const double order = fitted_order(dts, residuals);
    rep.checks.push_back({"lyap_residual_order", order >= 0.9, order, 0.9,
                          "fitted dt-order of the identity residual"});
    rep.checks.push_back({"energy_balance", worst_balance <= 1.01, worst_balance, 1.01,
                          "(L0_final + int D0 dt) / L0_initial"});

    for (std::size_t i = 0; i < runs.size(); ++i) {
        RunConfig c = cfg;
        c.nx = resolutions[i];
        write_run_artifacts(c, "lyapunov/nx" + std::to_string(resolutions[i]), runs[i].result);
    }
    return rep;
}

ExperimentReport preset_pattern(RunConfig cfg) {
    ExperimentReport rep;
    rep.preset = "pattern";
    cfg.initial = "steady_pattern";
    cfg.motility = "power";
    cfg.growth = "none";
    if (cfg.amplitude <= 0) cfg.amplitude = 1e-3;

    // Residuals of the unperturbed construction, for the report.
    {
        const Grid ref = Grid::line(cfg.lx, cfg.nx);
        SteadyOptions opts;
        Field w = solve_scalar_steady(ref, cfg.pattern_d, cfg.pattern_k, SteadyInit::SpikeAnsatz,
                                      nullptr, opts);
        const SteadyProfile prof = scale_to_pattern(w, cfg.pattern_d, cfg.pattern_k);
        const auto [r1, r2] = verify_steady(prof, MotilitySpec::power(cfg.pattern_k));
        const double u2 = lp_norm(prof.u, 2.0);
        rep.checks.push_back({"profile_nonconstant", oscillation(w) > 1e-2, oscillation(w), 1e-2,
                              "oscillation of the scalar profile"});
        rep.checks.push_back({"steady_r1", r1 <= 1e-12 * u2, r1 / u2, 1e-12,
                              "lap(u gamma(v)) relative to ||u||_2"});
        rep.checks.push_back({"steady_r2", r2 <= 1e-9 * u2, r2 / u2, 1e-9,
                              "lap v - v + u relative to ||u||_2"});
    }

    RunSetup setup = build_setup(cfg);
    const double osc0 = oscillation(setup.initial.v);
    const double steps_est = cfg.t_end / stable_dt(setup.initial, setup.params);
    setup.opts.observer_stride = std::max(1, (int)(steps_est / 200));
    const RunResult res = run(setup.params, setup.initial, setup.opts);
    if (!res.completed) {
        rep.checks.push_back({"run_completed", false, 0.0, 1.0, res.abort_reason});
        return rep;
    }
    const double osc_final = oscillation(res.final_state.v);
    const double ratio = osc_final / osc0;
    if (cfg.k > 1.0) {
        rep.checks.push_back({"pattern_persists", ratio >= 0.5, ratio, 0.5,
                              "oscillation of v at t_end over initial"});
    } else {
        rep.checks.push_back({"no_pattern_expected_k_le_1", ratio <= 0.01, ratio, 0.01,
                              "k <= 1: oscillation must collapse"});
    }
    write_run_artifacts(cfg, "pattern/k" + format_double(cfg.k), res);
    return rep;
}

ExperimentReport preset_logistic(RunConfig cfg) {
    ExperimentReport rep;
    rep.preset = "logistic";
    cfg.growth = "logistic";
    RunSetup setup = build_setup(cfg);
    const double steps_est = cfg.t_end / stable_dt(setup.initial, setup.params);
    setup.opts.observer_stride = std::max(1, (int)(steps_est / 800));
    const RunResult res = run(setup.params, setup.initial, setup.opts);
    rep.checks.push_back({"run_completed", res.completed, res.completed ? 1.0 : 0.0, 1.0,
                          res.abort_reason});
    if (!res.completed) return rep;

    const double min_v0 = min_of(setup.initial.v);
    const double eps = setup.params.epsilon;
    double worst_lower = 0.0;
    bool entropy_finite = true;
    double entropy0 = res.records.front().entropy_y, cT = 0.0;
    double mass_late = 0.0;
    for (const auto& r : res.records) {
        worst_lower = std::max(worst_lower, min_v0 * std::exp(-r.t / eps) - 1e-3 - r.min_v);
        entropy_finite = entropy_finite && std::isfinite(r.entropy_y);
        cT = std::max(cT, r.entropy_y - entropy0);
        if (r.t >= 0.5 * cfg.t_end) mass_late = std::max(mass_late, r.mass_u);
    }
    rep.checks.push_back({"v_lower_bound", worst_lower <= 0.0, worst_lower, 0.0,
                          "min_v vs (min v_in) e^{-t/eps} - 1e-3"});
    rep.checks.push_back({"entropy_bounded", entropy_finite, cT, 0.0,
                          "reported C(T) = max entropy increase; must stay finite"});

    const GrowthSpec growth = setup.params.growth;
    const double s1 = growth.s1();
    double sup_h = 0.0;
    for (int i = 0; i <= 10000; ++i)
        sup_h = std::max(sup_h, std::abs(growth.value(s1 * i / 10000.0)));
    const double bound = std::max(integrate(setup.initial.u),
                                  s1 * setup.grid.measure() * (1.0 + sup_h));
    rep.checks.push_back({"mass_limsup", mass_late <= 1.05 * bound, mass_late, 1.05 * bound,
                          "late-time mass vs the damping bound"});
    write_run_artifacts(cfg, "logistic", res);
    return rep;
}

}  // namespace

ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg) {
    ExperimentReport rep;
    if (name == "lyapunov")
        rep = preset_lyapunov(cfg);
    else if (name == "mass-mean")
        rep = preset_mass_mean(cfg);
    else if (name == "pattern")
        rep = preset_pattern(cfg);
    else if (name == "logistic")
        rep = preset_logistic(cfg);
    else
        throw DomainError("unknown preset '" + name +
                          "' (expected lyapunov, mass-mean, pattern, logistic)");
    const fs::path dir = fs::path(cfg.out_dir) / rep.preset;
    fs::create_directories(dir);
    std::ofstream(dir / "summary.txt") << rep.to_text();
    return rep;
}

ExperimentReport run_plain(const RunConfig& cfg) {
    ExperimentReport rep;
    rep.preset = "run";
    RunSetup setup = build_setup(cfg);
    const RunResult res = run(setup.params, setup.initial, setup.opts);
    rep.checks.push_back({"run_completed", res.completed, res.completed ? 1.0 : 0.0, 1.0,
                          res.abort_reason});
    RunConfig art = cfg;
    art.write_snapshots = true;
    write_run_artifacts(art, "run", res, res.records.size());
    const fs::path dir = fs::path(cfg.out_dir) / "run";
    std::ofstream(dir / "summary.txt") << rep.to_text();
    return rep;
}

std::string RefinementTable::to_text() const {
    std::ostringstream o;
    o << "nx h dt lyap_residual K_residual weak_r_u weak_r_v\n";
    for (const auto& r : rows)
        o << r.nx << " " << format_double(r.h) << " " << format_double(r.dt) << " "
          << format_double(r.lyap) << " " << format_double(r.k_res) << " "
          << format_double(r.weak_u) << " " << format_double(r.weak_v) << "\n";
    if (at_floor) {
        o << "orders: floor (residuals at solver floor)\n";
    } else {
        o << "orders: lyap=" << format_double(order_lyap) << " K=" << format_double(order_k)
          << " weak_u=" << format_double(order_weak_u)
          << " weak_v=" << format_double(order_weak_v) << "\n";
    }
    return o.str();
}

RefinementTable refinement_study(const RunConfig& base,
                                 const std::vector<RefinementLevel>& levels) {
    if (levels.size() < 3) throw DomainError("refinement study needs >= 3 levels");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (!(levels[i + 1].dt < levels[i].dt))
            throw DomainError("refinement levels must decrease in dt");

    RefinementTable table;
    for (const auto& lvl : levels) {
        RunConfig cfg = base;
        cfg.nx = lvl.nx;
        cfg.fixed_dt = lvl.dt;
        if (cfg.snapshot_count < 33) cfg.snapshot_count = 33;
        RunSetup setup = build_setup(cfg);
        const double steps_est = (setup.opts.t_end - setup.initial.t) / lvl.dt;
        setup.opts.observer_stride = std::max(1, (int)(steps_est / 400));
        const RunResult res = run(setup.params, setup.initial, setup.opts);
        if (!res.completed) throw Error("refinement run aborted: " + res.abort_reason);

        std::vector<double> lyap, kres;
        for (std::size_t i = 1; i < res.records.size(); ++i) {
            lyap.push_back(res.records[i].lyap_residual);
            kres.push_back(res.records[i].K_residual);
        }
        const SpaceTimeTest test = standard_test(setup.opts.t_end - setup.initial.t,
                                                 setup.grid.lx);
        const WeakformResiduals weak =
            weakform_residual(res.snapshots, test, setup.params.motility, setup.params.epsilon);
        table.rows.push_back({lvl.nx, setup.grid.h, lvl.dt, median(lyap), median(kres),
                              weak.r_u, weak.r_v});
    }

    std::vector<double> dts, l, k, wu, wv;
    for (const auto& r : table.rows) {
        dts.push_back(r.dt);
        l.push_back(r.lyap);
        k.push_back(r.k_res);
        wu.push_back(r.weak_u);
        wv.push_back(r.weak_v);
    }
    const auto& fine = table.rows.back();
    table.at_floor = fine.lyap < 1e-12 && fine.k_res < 1e-12 && fine.weak_u < 1e-12 &&
                     fine.weak_v < 1e-12;
    table.order_lyap = fitted_order(dts, l);
    table.order_k = fitted_order(dts, k);
    table.order_weak_u = fitted_order(dts, wu);
    table.order_weak_v = fitted_order(dts, wv);
    return table;
}

}  // namespace xdiff
