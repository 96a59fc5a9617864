#pragma once
#include <vector>

#include "xdiff/errors.hpp"

namespace xdiff {

// Uniform cell-centered rectangular mesh in 1 or 2 dimensions. Cells are
// square in 2D: ly = ny * h with h = lx / nx. Zero-flux boundaries are
// realized everywhere by mirror ghost cells.
struct Grid {
    int dim = 1;
    int nx = 0;
    int ny = 1;
    double lx = 0.0;
    double ly = 0.0;
    double h = 0.0;

    static Grid line(double lx, int nx);
    static Grid rect(double lx, int nx, int ny);

    int cells() const { return nx * ny; }
    double measure() const { return dim == 1 ? lx : lx * ly; }
    double cell_volume() const { return dim == 1 ? h : h * h; }
    double x_center(int i) const { return (i + 0.5) * h; }
    double y_center(int j) const { return (j + 0.5) * h; }

    bool operator==(const Grid& o) const = default;
};

// Scalar grid function, one value per cell, row-major in 2D.
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

    double& operator()(int i) { return v[static_cast<std::size_t>(i)]; }
    double operator()(int i) const { return v[static_cast<std::size_t>(i)]; }
    double& operator()(int i, int j) { return v[static_cast<std::size_t>(j) * grid.nx + i]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(j) * grid.nx + i]; }
    int size() const { return static_cast<int>(v.size()); }
};

void require_same_grid(const Field& a, const Field& b);
bool all_finite(const Field& f);

// 2*dim+1-point Neumann Laplacian; column sums vanish identically.
Field laplacian_neumann(const Field& f);

// Space average (1/|Omega|) integral.
double mean(const Field& f);

// Cell-value quadrature L^p norm; p = inf gives the max norm. Throws for p < 1.
double lp_norm(const Field& f, double p);

// Cellwise |grad f|^2, centered differences with mirror ghosts.
Field grad_sq(const Field& f);

// h^dim * sum of cell values.
double integrate(const Field& f);

// Cell inner product <f,g> = h^dim * sum f_i g_i.
double dot(const Field& a, const Field& b);

double min_of(const Field& f);
double max_of(const Field& f);

// max f - min f.
double oscillation(const Field& f);

}  // namespace xdiff
