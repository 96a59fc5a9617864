#include "xdiff/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "xdiff/kernels.hpp"

namespace xdiff {

namespace {

// FFTW planning is not thread-safe; executions of a ready plan are.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> stencil_eigenvalues(int n, double h) {
    // -lap_h cos(pi k (i+1/2)/n) = lam_k cos(...), lam_k = (2/h^2)(1-cos(pi k/n))
    std::vector<double> lam(n);
    for (int k = 0; k < n; ++k) lam[k] = 2.0 / (h * h) * (1.0 - std::cos(M_PI * k / n));
    return lam;
}

}  // namespace

struct EllipticSolver::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    ~Plans() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

EllipticSolver::EllipticSolver(const Grid& g, Method method, double rel_tol, int max_iter)
    : grid_(g), method_(method), rel_tol_(rel_tol), max_iter_(max_iter) {
    lam_x_ = stencil_eigenvalues(g.nx, g.h);
    if (g.dim == 2) lam_y_ = stencil_eigenvalues(g.ny, g.h);
    if (method_ == Method::SpectralCosine) {
        plans_ = std::make_unique<Plans>();
        std::vector<double> a(g.cells()), b(g.cells());
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (g.dim == 1) {
            plans_->fwd = fftw_plan_r2r_1d(g.nx, a.data(), b.data(), FFTW_REDFT10, flags);
            plans_->inv = fftw_plan_r2r_1d(g.nx, a.data(), b.data(), FFTW_REDFT01, flags);
        } else {
            plans_->fwd = fftw_plan_r2r_2d(g.ny, g.nx, a.data(), b.data(), FFTW_REDFT10,
                                           FFTW_REDFT10, flags);
            plans_->inv = fftw_plan_r2r_2d(g.ny, g.nx, a.data(), b.data(), FFTW_REDFT01,
                                           FFTW_REDFT01, flags);
        }
    }
}

EllipticSolver::~EllipticSolver() = default;

void EllipticSolver::check_grid(const Field& w) const {
    if (!(w.grid == grid_)) throw StructuralError("field grid does not match solver grid");
}

Field EllipticSolver::spectral_solve(const Field& w, double shift, bool zero_mean_mode) const {
    const int n = grid_.cells();
    std::vector<double> in(w.v), coef(n);
    fftw_execute_r2r(plans_->fwd, in.data(), coef.data());
    const double norm = grid_.dim == 1 ? 2.0 * grid_.nx : 4.0 * static_cast<double>(grid_.nx) * grid_.ny;
    if (grid_.dim == 1) {
        for (int k = 0; k < n; ++k) {
            const double denom = lam_x_[k] + shift;
            coef[k] = (k == 0 && zero_mean_mode) ? 0.0 : coef[k] / denom;
        }
    } else {
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                const int idx = j * grid_.nx + i;
                const double denom = lam_x_[i] + lam_y_[j] + shift;
                coef[idx] = (idx == 0 && zero_mean_mode) ? 0.0 : coef[idx] / denom;
            }
    }
    Field out(grid_);
    fftw_execute_r2r(plans_->inv, coef.data(), out.v.data());
    for (double& x : out.v) x /= norm;
    return out;
}

Field EllipticSolver::cg_solve(const Field& w, double shift, bool zero_mean_mode) const {
    // Matrix-free CG on A x = b with A = -lap_h + shift I, restricted to
    // zero-mean vectors when shift = 0 (constants span the kernel).
    const int n = grid_.cells();
    const double inv_h2 = 1.0 / (grid_.h * grid_.h);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        if (grid_.dim == 1)
            kernels::laplacian_1d(x.data(), y.data(), grid_.nx, inv_h2);
        else
            kernels::laplacian_2d(x.data(), y.data(), grid_.nx, grid_.ny, inv_h2);
        for (int i = 0; i < n; ++i) y[i] = -y[i] + shift * x[i];
    };
    auto project = [&](std::vector<double>& x) {
        if (!zero_mean_mode) return;
        const double mu = kernels::sum(x.data(), x.size()) / n;
        for (double& xi : x) xi -= mu;
    };

    std::vector<double> b(w.v);
    project(b);
    const double bnorm = std::sqrt(kernels::sum_product(b.data(), b.data(), n));
    Field out(grid_);
    if (bnorm == 0.0) return out;

    std::vector<double> x(n, 0.0), r(b), p(b), q(n);
    double rs = kernels::sum_product(r.data(), r.data(), n);
    // Solve well below the contract tolerance so backend agreement is not
    // limited by the stopping test.
    const double target = std::max(1e-3 * rel_tol_, 1e-15) * bnorm;
    int it = 0;
    while (std::sqrt(rs) > target) {
        if (++it > max_iter_)
            throw IterationError("conjugate gradient did not converge", std::sqrt(rs) / bnorm, it);
        apply(p, q);
        const double alpha = rs / kernels::sum_product(p.data(), q.data(), n);
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
        if (it % 50 == 0) project(r);
        const double rs_new = kernels::sum_product(r.data(), r.data(), n);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    out.v = std::move(x);
    return out;
}

Field EllipticSolver::solve_K(const Field& w) const {
    check_grid(w);
    Field out = method_ == Method::SpectralCosine ? spectral_solve(w, 0.0, true)
                                                  : cg_solve(w, 0.0, true);
    // The zero-mean constraint is enforced exactly: any residual mean left by
    // floating point is subtracted.
    const double mu = mean(out);
    for (double& x : out.v) x -= mu;
    return out;
}

Field EllipticSolver::solve_helmholtz(const Field& w, double lambda) const {
    check_grid(w);
    if (!(lambda >= 0)) throw DomainError("helmholtz shift must be >= 0");
    return method_ == Method::SpectralCosine ? spectral_solve(w, 1.0 + lambda, false)
                                             : cg_solve(w, 1.0 + lambda, false);
}

double EllipticSolver::h1dual_norm(const Field& w) const {
    check_grid(w);
    Field u = solve_K(w);  // solve_K annihilates the mean of w
    return std::sqrt(integrate(grad_sq(u)));
}

}  // namespace xdiff
