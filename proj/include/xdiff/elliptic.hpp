#pragma once
#include <memory>
#include <vector>

#include "xdiff/grid.hpp"

namespace xdiff {

// Neumann elliptic solves on a uniform grid:
//   solve_K:          -lap u = w - <w>,  <u> = 0   (zero-mean inverse Laplacian)
//   solve_helmholtz:  -lap z + (1+lambda) z = w
//   h1dual_norm:      || grad K(w - <w>) ||_2
//
// Two interchangeable backends. SpectralCosine diagonalizes the mirror-ghost
// stencil exactly in the DCT-II basis (direct, O(n log n)); ConjugateGradient
// is matrix-free with mean projection and serves as the independent
// cross-check. Plans and eigenvalue tables are immutable after construction;
// concurrent solves on one solver are safe.
class EllipticSolver {
public:
    enum class Method { SpectralCosine, ConjugateGradient };

    explicit EllipticSolver(const Grid& g, Method method = Method::SpectralCosine,
                            double rel_tol = 1e-10, int max_iter = 50000);
    ~EllipticSolver();
    EllipticSolver(const EllipticSolver&) = delete;
    EllipticSolver& operator=(const EllipticSolver&) = delete;

    Field solve_K(const Field& w) const;
    Field solve_helmholtz(const Field& w, double lambda) const;
    double h1dual_norm(const Field& w) const;

    const Grid& grid() const { return grid_; }
    Method method() const { return method_; }
    double rel_tol() const { return rel_tol_; }

private:
    struct Plans;
    Grid grid_;
    Method method_;
    double rel_tol_;
    int max_iter_;
    std::vector<double> lam_x_, lam_y_;  // per-direction stencil eigenvalues, >= 0
    std::unique_ptr<Plans> plans_;

    Field spectral_solve(const Field& w, double shift, bool zero_mean_mode) const;
    Field cg_solve(const Field& w, double shift, bool zero_mean_mode) const;
    void check_grid(const Field& w) const;
};

}  // namespace xdiff
