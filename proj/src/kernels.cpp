#include "xdiff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace xdiff::kernels {

namespace {

// Mirror ghost: index -1 maps to 0, index n maps to n-1.
inline int reflect(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

template <class BlockFn>
double blocked_reduce_sum(std::size_t n, BlockFn&& block_sum) {
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    if (nblocks <= 1) return block_sum(std::size_t{0}, n);
    std::vector<double> partial(nblocks);
    const bool par = n >= kParallelCutoff;
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
        const std::size_t hi = std::min(n, lo + kSumBlock);
        partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

}  // namespace

void laplacian_1d(const double* x, double* y, int nx, double inv_h2) {
    const bool par = static_cast<std::size_t>(nx) >= kParallelCutoff;
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < nx; ++i) {
        const double xm = x[reflect(i - 1, nx)];
        const double xp = x[reflect(i + 1, nx)];
        y[i] = (xm - 2.0 * x[i] + xp) * inv_h2;
    }
}

void laplacian_2d(const double* x, double* y, int nx, int ny, double inv_h2) {
    const bool par = static_cast<std::size_t>(nx) * ny >= kParallelCutoff;
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < ny; ++j) {
        const int jm = reflect(j - 1, ny), jp = reflect(j + 1, ny);
        for (int i = 0; i < nx; ++i) {
            const int im = reflect(i - 1, nx), ip = reflect(i + 1, nx);
            const double c = x[j * nx + i];
            y[j * nx + i] =
                (x[j * nx + im] + x[j * nx + ip] + x[jm * nx + i] + x[jp * nx + i] - 4.0 * c) *
                inv_h2;
        }
    }
}

void grad_sq_1d(const double* x, double* y, int nx, double inv_2h) {
    const bool par = static_cast<std::size_t>(nx) >= kParallelCutoff;
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < nx; ++i) {
        const double g = (x[reflect(i + 1, nx)] - x[reflect(i - 1, nx)]) * inv_2h;
        y[i] = g * g;
    }
}

void grad_sq_2d(const double* x, double* y, int nx, int ny, double inv_2h) {
    const bool par = static_cast<std::size_t>(nx) * ny >= kParallelCutoff;
#pragma omp parallel for schedule(static) if (par)
    for (int j = 0; j < ny; ++j) {
        const int jm = reflect(j - 1, ny), jp = reflect(j + 1, ny);
        for (int i = 0; i < nx; ++i) {
            const int im = reflect(i - 1, nx), ip = reflect(i + 1, nx);
            const double gx = (x[j * nx + ip] - x[j * nx + im]) * inv_2h;
            const double gy = (x[jp * nx + i] - x[jm * nx + i]) * inv_2h;
            y[j * nx + i] = gx * gx + gy * gy;
        }
    }
}

double sum(const double* x, std::size_t n) {
    return blocked_reduce_sum(n, [x](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        return s;
    });
}

double sum_product(const double* x, const double* y, std::size_t n) {
    return blocked_reduce_sum(n, [x, y](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
    });
}

double sum_abs_pow(const double* x, std::size_t n, double p) {
    return blocked_reduce_sum(n, [x, p](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::abs(x[i]), p);
        return s;
    });
}

double min_value(const double* x, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

double max_value(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

bool all_finite(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

}  // namespace xdiff::kernels

namespace xdiff::ref {

namespace {
inline int reflect(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }
}  // namespace

void laplacian_1d(const double* x, double* y, int nx, double inv_h2) {
    for (int i = 0; i < nx; ++i) {
        const double xm = x[reflect(i - 1, nx)];
        const double xp = x[reflect(i + 1, nx)];
        y[i] = (xm - 2.0 * x[i] + xp) * inv_h2;
    }
}

void laplacian_2d(const double* x, double* y, int nx, int ny, double inv_h2) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double xm = x[j * nx + reflect(i - 1, nx)];
            const double xp = x[j * nx + reflect(i + 1, nx)];
            const double ym = x[reflect(j - 1, ny) * nx + i];
            const double yp = x[reflect(j + 1, ny) * nx + i];
            y[j * nx + i] = (xm + xp + ym + yp - 4.0 * x[j * nx + i]) * inv_h2;
        }
}

void grad_sq_1d(const double* x, double* y, int nx, double inv_2h) {
    for (int i = 0; i < nx; ++i) {
        const double g = (x[reflect(i + 1, nx)] - x[reflect(i - 1, nx)]) * inv_2h;
        y[i] = g * g;
    }
}

void grad_sq_2d(const double* x, double* y, int nx, int ny, double inv_2h) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double gx =
                (x[j * nx + reflect(i + 1, nx)] - x[j * nx + reflect(i - 1, nx)]) * inv_2h;
            const double gy =
                (x[reflect(j + 1, ny) * nx + i] - x[reflect(j - 1, ny) * nx + i]) * inv_2h;
            y[j * nx + i] = gx * gx + gy * gy;
        }
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_product(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

}  // namespace xdiff::ref
