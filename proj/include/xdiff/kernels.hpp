#pragma once
#include <cstddef>

// Low-level stencil and reduction kernels on raw arrays.
//
// Every data-parallel loop exists twice: the OpenMP version in xdiff::kernels
// used by the library, and a plain serial version in xdiff::ref kept as the
// reference for tests and for the benchmark target.
//
// Reductions are blocked with a fixed block size (kSumBlock): partial sums are
// computed per block (in parallel) and accumulated in block order, so the
// result is bitwise independent of the number of OpenMP threads. Loops shorter
// than kParallelCutoff run serially inside the same code path; the arithmetic
// is identical either way.

namespace xdiff::kernels {

inline constexpr std::size_t kSumBlock = 4096;
inline constexpr std::size_t kParallelCutoff = 16384;

// y = 2*dim+1-point Neumann Laplacian of x, mirror ghost cells, uniform h.
void laplacian_1d(const double* x, double* y, int nx, double inv_h2);
void laplacian_2d(const double* x, double* y, int nx, int ny, double inv_h2);

// y = |grad x|^2, centered differences with mirror ghost cells.
void grad_sq_1d(const double* x, double* y, int nx, double inv_2h);
void grad_sq_2d(const double* x, double* y, int nx, int ny, double inv_2h);

double sum(const double* x, std::size_t n);
double sum_product(const double* x, const double* y, std::size_t n);
double sum_abs_pow(const double* x, std::size_t n, double p);
double min_value(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
bool all_finite(const double* x, std::size_t n);

}  // namespace xdiff::kernels

namespace xdiff::ref {

void laplacian_1d(const double* x, double* y, int nx, double inv_h2);
void laplacian_2d(const double* x, double* y, int nx, int ny, double inv_h2);
void grad_sq_1d(const double* x, double* y, int nx, double inv_2h);
void grad_sq_2d(const double* x, double* y, int nx, int ny, double inv_2h);
double sum(const double* x, std::size_t n);
double sum_product(const double* x, const double* y, std::size_t n);

}  // namespace xdiff::ref
