#include "xdiff/steady.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace xdiff {

namespace {

Field steady_residual_field(const Field& w, double d, double k) {
    Field F = laplacian_neumann(w);
    for (int i = 0; i < F.size(); ++i)
        F.v[i] = d * F.v[i] - w.v[i] + std::pow(w.v[i], k);
    return F;
}

// J x with J = d lap - I + k diag(w^(k-1)).
void apply_jacobian(const Field& w, double d, double k, const std::vector<double>& x,
                    std::vector<double>& y, Field& scratch) {
    std::copy(x.begin(), x.end(), scratch.v.begin());
    Field lx = laplacian_neumann(scratch);
    for (int i = 0; i < lx.size(); ++i)
        y[i] = d * lx.v[i] + (-1.0 + k * std::pow(w.v[i], k - 1.0)) * x[i];
}

double vec_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
}

// CG on the normal equations J^2 x = J b (J symmetric, possibly indefinite).
std::vector<double> solve_cgnr(const Field& w, double d, double k,
                               const std::vector<double>& b, double tol, int max_iter) {
    const int n = static_cast<int>(b.size());
    Field scratch(w.grid);
    std::vector<double> x(n, 0.0), r(n), p(n), jp(n), jjp(n), jr(n);

    apply_jacobian(w, d, k, b, jr, scratch);  // J b
    r = jr;
    p = r;
    double rs = 0.0;
    for (double ri : r) rs += ri * ri;
    const double bnorm = vec_norm(b);
    if (bnorm == 0.0) return x;

    for (int it = 0; it < max_iter; ++it) {
        apply_jacobian(w, d, k, p, jp, scratch);
        apply_jacobian(w, d, k, jp, jjp, scratch);
        double pq = 0.0;
        for (int i = 0; i < n; ++i) pq += p[i] * jjp[i];
        if (pq == 0.0) break;
        const double alpha = rs / pq;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * jjp[i];
        if (it % 10 == 0) {
            apply_jacobian(w, d, k, x, jp, scratch);
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                const double e = jp[i] - b[i];
                res += e * e;
            }
            if (std::sqrt(res) <= tol * bnorm) return x;
        }
        double rs_new = 0.0;
        for (double ri : r) rs_new += ri * ri;
        const double beta = rs_new / rs;
        rs = rs_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    apply_jacobian(w, d, k, x, jp, scratch);
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = jp[i] - b[i];
        res += e * e;
    }
    if (std::sqrt(res) > 10.0 * tol * bnorm)
        throw IterationError("steady inner solve (CGNR) stalled", std::sqrt(res) / bnorm,
                             max_iter);
    return x;
}

// Direct tridiagonal solve of J x = b in 1D; falls back to CGNR on a tiny
// pivot (the Jacobian is indefinite near spike profiles).
std::vector<double> solve_newton_system(const Field& w, double d, double k,
                                        const std::vector<double>& rhs) {
    const Grid& g = w.grid;
    if (g.dim == 2) return solve_cgnr(w, d, k, rhs, 1e-12, 20000);

    const int n = g.nx;
    const double dh2 = d / (g.h * g.h);
    std::vector<double> lower(n, dh2), diag(n), upper(n, dh2), b(rhs);
    for (int i = 0; i < n; ++i) {
        const double stencil_center = (i == 0 || i == n - 1) ? -dh2 : -2.0 * dh2;
        diag[i] = stencil_center - 1.0 + k * std::pow(w.v[i], k - 1.0);
    }
    const double scale = std::abs(dh2) + 1.0;
    std::vector<double> x(n);
    // Thomas sweep with pivot guard.
    std::vector<double> c(n), dd(n);
    c[0] = upper[0] / diag[0];
    dd[0] = b[0] / diag[0];
    bool ok = std::abs(diag[0]) > 1e-13 * scale;
    for (int i = 1; ok && i < n; ++i) {
        const double piv = diag[i] - lower[i] * c[i - 1];
        if (std::abs(piv) <= 1e-13 * scale) {
            ok = false;
            break;
        }
        c[i] = (i < n - 1 ? upper[i] : 0.0) / piv;
        dd[i] = (b[i] - lower[i] * dd[i - 1]) / piv;
    }
    if (!ok) return solve_cgnr(w, d, k, rhs, 1e-12, 20000);
    x[n - 1] = dd[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dd[i] - c[i] * x[i + 1];
    return x;
}

Field newton_polish(Field w, double d, double k, const SteadyOptions& opts) {
    const int n = w.size();
    for (int it = 0; it < opts.newton_max_iter; ++it) {
        const Field F = steady_residual_field(w, d, k);
        const double fn = lp_norm(F, 2.0);
        const double wn = lp_norm(w, 2.0);
        if (fn <= opts.newton_tol * std::max(wn, 1e-30)) {
            if (!(min_of(w) > 0.0))
                throw IterationError("Newton converged to a nonpositive profile", fn, it);
            return w;
        }
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -F.v[i];
        const std::vector<double> delta = solve_newton_system(w, d, k, rhs);

        double alpha = 1.0;
        bool moved = false;
        while (alpha >= 1e-8) {
            Field trial = w;
            for (int i = 0; i < n; ++i) trial.v[i] += alpha * delta[i];
            if (min_of(trial) > 0.0 &&
                lp_norm(steady_residual_field(trial, d, k), 2.0) <= (1.0 - 1e-4 * alpha) * fn) {
                w = std::move(trial);
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved)
            throw IterationError("Newton line search failed (negative or stagnant iterate)", fn,
                                 it);
    }
    throw IterationError("Newton did not converge",
                         lp_norm(steady_residual_field(w, d, k), 2.0), opts.newton_max_iter);
}

Field relax_parabolic(Field w, double d, double k, const SteadyOptions& opts) {
    // Explicit integration of w_t = d lap w - w + w^k until the velocity
    // stalls; this parks the iterate near the steady manifold for Newton.
    double t = 0.0;
    while (t < opts.relax_t_max) {
        const double reaction = 1.0 + k * std::pow(max_of(w), k - 1.0);
        double dt = std::min(0.4 * w.grid.h * w.grid.h / (2.0 * w.grid.dim * d),
                             0.2 / reaction);
        const Field F = steady_residual_field(w, d, k);
        if (lp_norm(F, 2.0) < opts.relax_stall) break;
        if (max_of(w) > 1e6)
            throw IterationError("parabolic relaxation blew up", max_of(w), 0);
        Field trial = w;
        for (int retry = 0; retry < 30; ++retry) {
            for (int i = 0; i < w.size(); ++i) trial.v[i] = w.v[i] + dt * F.v[i];
            if (min_of(trial) > 0.0) break;
            dt *= 0.5;
        }
        w = trial;
        t += dt;
    }
    return w;
}

}  // namespace

Field spike_initial(const Grid& g, double d, const SteadyOptions& opts) {
    Field w(g, 1.0);
    const double sigma = opts.spike_width_factor * std::sqrt(d);
    const double xc = opts.spike_at_center ? 0.5 * g.lx : g.x_center(0);
    const double yc = g.dim == 2 ? (opts.spike_at_center ? 0.5 * g.ly : g.y_center(0)) : 0.0;
    for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double dx = g.x_center(i) - xc;
            const double dy = g.dim == 2 ? g.y_center(j) - yc : 0.0;
            const double r2 = dx * dx + dy * dy;
            w.v[static_cast<std::size_t>(j) * g.nx + i] +=
                opts.spike_amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
        }
    return w;
}

double scalar_steady_residual(const Field& w, double d, double k) {
    return lp_norm(steady_residual_field(w, d, k), 2.0);
}

Field solve_scalar_steady(const Grid& g, double d, double k, SteadyInit strategy,
                          const Field* given, const SteadyOptions& opts) {
    if (!(d > 0)) throw DomainError("steady solve requires d > 0");
    if (!(k > 1)) throw DomainError("steady solve requires k > 1");
    Field w0;
    switch (strategy) {
        case SteadyInit::SpikeAnsatz:
            w0 = spike_initial(g, d, opts);
            break;
        case SteadyInit::ParabolicRelax:
            w0 = relax_parabolic(spike_initial(g, d, opts), d, k, opts);
            break;
        case SteadyInit::Given:
            if (!given) throw DomainError("strategy Given needs a starting profile");
            w0 = *given;
            if (!(w0.grid == g)) throw StructuralError("starting profile grid mismatch");
            break;
    }
    return newton_polish(std::move(w0), d, k, opts);
}

SteadyProfile scale_to_pattern(const Field& w, double d, double k) {
    if (!(d > 0)) throw DomainError("scaling requires d > 0");
    SteadyProfile p;
    p.ref_grid = w.grid;
    p.d = d;
    p.k = k;
    p.R = 1.0 / std::sqrt(d);
    p.w = w;
    p.scaled_grid = w.grid.dim == 1 ? Grid::line(p.R * w.grid.lx, w.grid.nx)
                                    : Grid::rect(p.R * w.grid.lx, w.grid.nx, w.grid.ny);
    p.v = Field(p.scaled_grid);
    p.u = Field(p.scaled_grid);
    for (int i = 0; i < w.size(); ++i) {
        p.v.v[i] = w.v[i];
        p.u.v[i] = std::pow(w.v[i], k);
    }
    return p;
}

std::pair<double, double> verify_steady(const SteadyProfile& p, const MotilitySpec& motility) {
    if (motility.kind() != MotilityKind::Power || std::abs(motility.exponent() - p.k) > 1e-14)
        throw DomainError("verify_steady needs the power motility with the profile's exponent");
    Field prod(p.scaled_grid);
    for (int i = 0; i < prod.size(); ++i) prod.v[i] = p.u.v[i] * motility.value(p.v.v[i]);
    const double r1 = lp_norm(laplacian_neumann(prod), 2.0);
    Field res = laplacian_neumann(p.v);
    for (int i = 0; i < res.size(); ++i) res.v[i] += -p.v.v[i] + p.u.v[i];
    const double r2 = lp_norm(res, 2.0);
    return {r1, r2};
}

namespace {

bool lands_nonconstant(const Grid& g, double d, double k, const SteadyOptions& base) {
    for (bool center : {false, true}) {
        SteadyOptions opts = base;
        opts.spike_at_center = center;
        try {
            const Field w = solve_scalar_steady(g, d, k, SteadyInit::SpikeAnsatz, nullptr, opts);
            if (oscillation(w) > 1e-2) return true;
        } catch (const IterationError&) {
            // divergence counts as "no pattern found from this start"
        }
    }
    return false;
}

}  // namespace

PatternThreshold find_pattern_threshold(const Grid& g, double k, double d_lo, double d_hi,
                                        double rel_gap, const SteadyOptions& opts) {
    if (!(d_lo > 0 && d_hi > d_lo)) throw DomainError("threshold bracket must satisfy 0 < lo < hi");
    if (!lands_nonconstant(g, d_lo, k, opts))
        throw DomainError("no nonconstant profile at the lower bracket");
    if (lands_nonconstant(g, d_hi, k, opts))
        throw DomainError("nonconstant profile persists at the upper bracket");
    PatternThreshold out;
    double lo = d_lo, hi = d_hi;
    while (hi - lo > rel_gap * hi) {
        const double mid = 0.5 * (lo + hi);
        (lands_nonconstant(g, mid, k, opts) ? lo : hi) = mid;
        ++out.bisections;
    }
    out.d0 = lo;
    return out;
}

}  // namespace xdiff
