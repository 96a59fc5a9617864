#include "xdiff/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "xdiff/kernels.hpp"

namespace xdiff {

namespace {

void validate(const Grid& g) {
    if (g.dim != 1 && g.dim != 2) throw StructuralError("grid dim must be 1 or 2");
    if (g.nx < 3 || (g.dim == 2 && g.ny < 3))
        throw StructuralError("grid needs at least 3 cells per direction");
    if (!(g.lx > 0.0)) throw StructuralError("grid extent must be positive");
}

void check_output(const Field& f, const char* op) {
    if (!all_finite(f)) throw StructuralError(std::string(op) + " produced non-finite values");
}

}  // namespace

Grid Grid::line(double lx, int nx) {
    Grid g;
    g.dim = 1;
    g.nx = nx;
    g.ny = 1;
    g.lx = lx;
    g.ly = 0.0;
    g.h = lx / nx;
    validate(g);
    return g;
}

Grid Grid::rect(double lx, int nx, int ny) {
    Grid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.h = lx / nx;
    g.ly = ny * g.h;
    validate(g);
    return g;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw StructuralError("fields live on different grids");
}

bool all_finite(const Field& f) {
    return kernels::all_finite(f.v.data(), f.v.size());
}

Field laplacian_neumann(const Field& f) {
    if (f.size() != f.grid.cells()) throw StructuralError("field size does not match grid");
    Field out(f.grid);
    const double inv_h2 = 1.0 / (f.grid.h * f.grid.h);
    if (f.grid.dim == 1)
        kernels::laplacian_1d(f.v.data(), out.v.data(), f.grid.nx, inv_h2);
    else
        kernels::laplacian_2d(f.v.data(), out.v.data(), f.grid.nx, f.grid.ny, inv_h2);
    check_output(out, "laplacian_neumann");
    return out;
}

double mean(const Field& f) {
    return kernels::sum(f.v.data(), f.v.size()) * f.grid.cell_volume() / f.grid.measure();
}

double lp_norm(const Field& f, double p) {
    if (std::isinf(p)) return kernels::max_abs(f.v.data(), f.v.size());
    if (p < 1.0) throw DomainError("lp_norm requires p >= 1");
    const double s = kernels::sum_abs_pow(f.v.data(), f.v.size(), p);
    return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

Field grad_sq(const Field& f) {
    Field out(f.grid);
    const double inv_2h = 1.0 / (2.0 * f.grid.h);
    if (f.grid.dim == 1)
        kernels::grad_sq_1d(f.v.data(), out.v.data(), f.grid.nx, inv_2h);
    else
        kernels::grad_sq_2d(f.v.data(), out.v.data(), f.grid.nx, f.grid.ny, inv_2h);
    check_output(out, "grad_sq");
    return out;
}

double integrate(const Field& f) {
    return kernels::sum(f.v.data(), f.v.size()) * f.grid.cell_volume();
}

double dot(const Field& a, const Field& b) {
    require_same_grid(a, b);
    return kernels::sum_product(a.v.data(), b.v.data(), a.v.size()) * a.grid.cell_volume();
}

double min_of(const Field& f) { return kernels::min_value(f.v.data(), f.v.size()); }
double max_of(const Field& f) { return kernels::max_value(f.v.data(), f.v.size()); }

double oscillation(const Field& f) { return max_of(f) - min_of(f); }

}  // namespace xdiff
