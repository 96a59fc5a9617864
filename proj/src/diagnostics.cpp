#include "xdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xdiff/quadrature.hpp"

namespace xdiff {

const std::array<const char*, 16>& DiagnosticsRecord::csv_columns() {
    static const std::array<const char*, 16> cols = {
        "t",        "mass_u",        "mean_v",    "L0",       "D0_grad", "D0_relax",
        "D0_mono",  "lyap_residual", "entropy_y", "h1dual_u", "l2_v",    "h1_v",
        "min_v",    "min_u",         "energy_a21", "K_residual"};
    return cols;
}

std::array<double, 16> DiagnosticsRecord::values() const {
    return {t,        mass_u,        mean_v,    L0,       D0_grad,    D0_relax,
            D0_mono,  lyap_residual, entropy_y, h1dual_u, l2_v,       h1_v,
            min_v,    min_u,         energy_a21, K_residual};
}

Field gamma_field(const Motility& m, const Field& v) {
    Field out(v.grid);
    std::visit(
        [&](const auto& g) {
            for (int i = 0; i < v.size(); ++i) out.v[i] = g.value(v.v[i]);
        },
        m);
    return out;
}

G0Evaluator::G0Evaluator(Motility motility, double m, double quad_tol)
    : motility_(std::move(motility)), m_(m), quad_tol_(quad_tol) {
    if (!(m > 0)) throw DomainError("G0 anchor m must be positive");
    mgm_ = m_ * gamma_value(motility_, m_);
    if (const auto* spec = std::get_if<MotilitySpec>(&motility_)) {
        if (spec->exponent() == 1.0) {
            if (spec->kind() == MotilityKind::Prototype) closed_kind_ = ClosedForm::PrototypeK1;
            if (spec->kind() == MotilityKind::Power) closed_kind_ = ClosedForm::PowerK1;
        }
    }
    if (closed_kind_ != ClosedForm::None) {
        // Cross-check the registered closed form against quadrature once.
        for (double z : {0.5 * m_, 0.9 * m_, 1.5 * m_, 3.0 * m_ + 1.0}) {
            if (std::abs(closed_form(z) - value_quadrature(z)) > 1e-8)
                throw Error("G0 closed form disagrees with quadrature");
        }
    }
}

double G0Evaluator::prime(double z) const {
    const double g = gamma_value(motility_, z);
    return 2.0 * z * g - m_ * g - mgm_;
}

double G0Evaluator::second(double z) const {
    const double g = gamma_value(motility_, z);
    const double gp = gamma_deriv(motility_, z);
    return 2.0 * z * gp + 2.0 * g - m_ * gp;
}

double G0Evaluator::value_quadrature(double z) const {
    if (z == m_) return 0.0;
    return adaptive_simpson([this](double s) { return prime(s); }, m_, z, quad_tol_);
}

double G0Evaluator::closed_form(double z) const {
    switch (closed_kind_) {
        case ClosedForm::PrototypeK1: {
            // gamma = 1/(1+z): antiderivative of G0' is
            // 2z - (2+m) ln(1+z) - m z gamma(m), anchored at m.
            auto anti = [this](double s) {
                return 2.0 * s - (2.0 + m_) * std::log1p(s) - mgm_ * s;
            };
            return anti(z) - anti(m_);
        }
        case ClosedForm::PowerK1:
            // gamma = 1/z: G0' = 1 - m/z, so G0 = z - m - m ln(z/m).
            return z - m_ - m_ * std::log(z / m_);
        case ClosedForm::None:
            break;
    }
    throw Error("no closed form registered");
}

double G0Evaluator::value(double z) const {
    if (!(z > 0)) throw DomainError("G0 requires z > 0");
    if (z == m_) return 0.0;
    return closed_kind_ != ClosedForm::None ? closed_form(z) : value_quadrature(z);
}

double G0Evaluator::integral_over_field(const Field& v) const {
    const double vol = v.grid.cell_volume();
    if (closed_kind_ != ClosedForm::None) {
        double acc = 0.0;
        for (double z : v.v) acc += closed_form(z);
        return acc * vol;
    }
    // Sort the cell values once and advance the antiderivative between
    // consecutive values; each sub-integral is short.
    std::vector<int> order(v.v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return v.v[a] < v.v[b]; });
    double acc = 0.0;
    double z_prev = m_, g_prev = 0.0;
    for (int idx : order) {
        const double z = v.v[idx];
        if (!(z > 0)) throw DomainError("G0 requires positive field values");
        const double g = z == z_prev
                             ? g_prev
                             : g_prev + adaptive_simpson([this](double s) { return prime(s); },
                                                         z_prev, z, quad_tol_);
        acc += g;
        z_prev = z;
        g_prev = g;
    }
    return acc * vol;
}

double eval_G0(const G0Evaluator& ev, double z) { return ev.value(z); }
double eval_G0_second(const G0Evaluator& ev, double z) { return ev.second(z); }

double eval_L0(const State& s, const G0Evaluator& g0, const EllipticSolver& solver,
               double epsilon) {
    Field um(s.u);
    const double m = g0.anchor();
    for (double& x : um.v) x -= m;
    const double dual = solver.h1dual_norm(um);
    return 0.5 * dual * dual + epsilon * g0.integral_over_field(s.v);
}

D0Parts eval_D0(const State& s, const G0Evaluator& g0) {
    D0Parts parts;
    const Field gsq = grad_sq(s.v);
    const Field gam = gamma_field(g0.motility(), s.v);
    const double m = g0.anchor();
    const double mgm = m * gamma_value(g0.motility(), m);
    double a = 0.0, b = 0.0, c = 0.0;
    for (int i = 0; i < s.v.size(); ++i) {
        const double v = s.v.v[i];
        const double du = s.u.v[i] - v;
        a += g0.second(v) * gsq.v[i];
        b += du * du * gam.v[i];
        c += (v - m) * (v * gam.v[i] - mgm);
    }
    const double vol = s.v.grid.cell_volume();
    parts.grad = a * vol;
    parts.relax = b * vol;
    parts.mono = c * vol;
    return parts;
}

double eval_entropy(const State& s, double epsilon) {
    double acc = 0.0;
    for (double u : s.u.v) {
        const double w = u + M_E;
        acc += w * (std::log(w) - 1.0);
    }
    return acc * s.u.grid.cell_volume() + epsilon * integrate(grad_sq(s.v));
}

double lyapunov_residual(const DiagnosticsRecord& a, const DiagnosticsRecord& b, double D0_mid) {
    const double dt = b.t - a.t;
    if (!(dt > 0)) throw DomainError("records must be ordered in time");
    return std::abs((b.L0 - a.L0) / dt + D0_mid);
}

double K_equation_residual(const State& prev, const State& next, const Motility& motility,
                           const EllipticSolver& solver) {
    const double dt = next.t - prev.t;
    if (!(dt > 0)) throw DomainError("states must be ordered in time");
    Field dudt(prev.u.grid);
    Field umid(prev.u.grid), vmid(prev.u.grid);
    for (int i = 0; i < dudt.size(); ++i) {
        dudt.v[i] = (next.u.v[i] - prev.u.v[i]) / dt;
        umid.v[i] = 0.5 * (next.u.v[i] + prev.u.v[i]);
        vmid.v[i] = 0.5 * (next.v.v[i] + prev.v.v[i]);
    }
    const Field kd = solver.solve_K(dudt);
    Field p = gamma_field(motility, vmid);
    for (int i = 0; i < p.size(); ++i) p.v[i] *= umid.v[i];
    const double pbar = mean(p);
    Field res(kd);
    for (int i = 0; i < res.size(); ++i) res.v[i] += p.v[i] - pbar;
    return lp_norm(res, 2.0);
}

namespace {

State midpoint_state(const State& a, const State& b) {
    State mid;
    mid.t = 0.5 * (a.t + b.t);
    mid.u = a.u;
    mid.v = a.v;
    for (int i = 0; i < mid.u.size(); ++i) {
        mid.u.v[i] = 0.5 * (a.u.v[i] + b.u.v[i]);
        mid.v.v[i] = 0.5 * (a.v.v[i] + b.v.v[i]);
    }
    return mid;
}

}  // namespace

DiagnosticsRecord compute_record(const State& s, const DiagnosticsContext& ctx,
                                 const G0Evaluator& g0, const EllipticSolver& solver) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass_u = integrate(s.u);
    r.mean_v = mean(s.v);
    r.min_u = min_of(s.u);
    r.min_v = min_of(s.v);

    Field um(s.u);
    for (double& x : um.v) x -= ctx.m;
    r.h1dual_u = solver.h1dual_norm(um);
    r.L0 = 0.5 * r.h1dual_u * r.h1dual_u + ctx.epsilon * g0.integral_over_field(s.v);

    const D0Parts d0 = eval_D0(s, g0);
    r.D0_grad = d0.grad;
    r.D0_relax = d0.relax;
    r.D0_mono = d0.mono;

    r.entropy_y = eval_entropy(s, ctx.epsilon);
    r.l2_v = lp_norm(s.v, 2.0);
    const double gv2 = integrate(grad_sq(s.v));
    r.h1_v = std::sqrt(r.l2_v * r.l2_v + gv2);

    const Field gam = gamma_field(ctx.motility, s.v);
    double e = 0.0;
    for (int i = 0; i < s.u.size(); ++i) e += s.u.v[i] * s.u.v[i] * gam.v[i];
    r.energy_a21 = e * s.u.grid.cell_volume();
    return r;
}

DiagnosticsRecord compute_record(const State& prev, const State& s,
                                 const DiagnosticsContext& ctx, const G0Evaluator& g0,
                                 const EllipticSolver& solver,
                                 std::optional<double> L0_prev_hint) {
    DiagnosticsRecord r = compute_record(s, ctx, g0, solver);
    const double L0_prev =
        L0_prev_hint ? *L0_prev_hint : eval_L0(prev, g0, solver, ctx.epsilon);
    DiagnosticsRecord stub;
    stub.t = prev.t;
    stub.L0 = L0_prev;
    const double d0_mid = eval_D0(midpoint_state(prev, s), g0).total();
    r.lyap_residual = lyapunov_residual(stub, r, d0_mid);
    const bool conservative = ctx.growth.kind == GrowthSpec::Kind::None;
    r.K_residual = conservative ? K_equation_residual(prev, s, ctx.motility, solver) : 0.0;
    return r;
}

WeakformResiduals weakform_residual(const Trajectory& traj, const SpaceTimeTest& test,
                                    const Motility& motility, double epsilon) {
    WeakformResiduals out;
    if (traj.size() < 2) return out;
    const Grid& grid = traj.front().u.grid;
    const double vol = grid.cell_volume();
    const QuadratureRule gl = gauss_legendre(7);

    // Spatial sums of f(t,x) against a snapshot field.
    auto space_sum = [&](const Field& f, double t,
                         const std::function<double(double, double, double)>& fn) {
        double acc = 0.0;
        if (grid.dim == 1) {
            for (int i = 0; i < grid.nx; ++i) acc += f(i) * fn(t, grid.x_center(i), 0.0);
        } else {
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i)
                    acc += f(i, j) * fn(t, grid.x_center(i), grid.y_center(j));
        }
        return acc * vol;
    };

    // Time integral of the linear-in-time interpolant of per-snapshot fields
    // against an analytic kernel.
    struct TermAccum {
        double u_dphi = 0.0;   // u * dphi/dt
        double p_lap = 0.0;    // u gamma(v) * lap phi
        double v_dphi = 0.0;   // v * dphi/dt
        double v_lap_m = 0.0;  // v * (lap phi - phi)
        double u_phi = 0.0;    // u * phi
    };

    std::vector<Field> pfields;
    pfields.reserve(traj.size());
    for (const auto& s : traj) {
        Field p = gamma_field(motility, s.v);
        for (int i = 0; i < p.size(); ++i) p.v[i] *= s.u.v[i];
        pfields.push_back(std::move(p));
    }

    auto lap_minus_phi = [&test](double t, double x, double y) {
        return test.lap_phi(t, x, y) - test.phi(t, x, y);
    };

    TermAccum acc;
    for (std::size_t s = 0; s + 1 < traj.size(); ++s) {
        const double ta = traj[s].t, tb = traj[s + 1].t;
        const double half = 0.5 * (tb - ta);
        if (!(half > 0)) continue;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double tq = 0.5 * (ta + tb) + half * gl.nodes[q];
            const double wq = gl.weights[q] * half;
            const double beta = (tq - ta) / (tb - ta), alpha = 1.0 - beta;
            auto blend = [&](const Field& fa, const Field& fb,
                             const std::function<double(double, double, double)>& fn) {
                return alpha * space_sum(fa, tq, fn) + beta * space_sum(fb, tq, fn);
            };
            acc.u_dphi += wq * blend(traj[s].u, traj[s + 1].u, test.dphi_dt);
            acc.p_lap += wq * blend(pfields[s], pfields[s + 1], test.lap_phi);
            acc.v_dphi += wq * blend(traj[s].v, traj[s + 1].v, test.dphi_dt);
            acc.v_lap_m += wq * blend(traj[s].v, traj[s + 1].v, lap_minus_phi);
            acc.u_phi += wq * blend(traj[s].u, traj[s + 1].u, test.phi);
        }
    }

    const double t0 = traj.front().t;
    const double init_u = space_sum(traj.front().u, t0, test.phi);
    const double init_v = space_sum(traj.front().v, t0, test.phi);

    out.r_u = std::abs(-acc.u_dphi - init_u - acc.p_lap);
    out.r_v = std::abs(-epsilon * acc.v_dphi - epsilon * init_v - acc.v_lap_m - acc.u_phi);
    return out;
}

}  // namespace xdiff
