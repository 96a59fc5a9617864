#include <doctest.h>

#include <cmath>

#include "xdiff/elliptic.hpp"
#include "xdiff/rng.hpp"

using namespace xdiff;

namespace {

Field random_field(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    CounterRng rng{seed};
    Field f(g);
    for (int i = 0; i < g.cells(); ++i) f.v[i] = lo + (hi - lo) * rng.uniform(i);
    return f;
}

Field zero_mean(Field f) {
    const double mu = mean(f);
    for (double& x : f.v) x -= mu;
    return f;
}

double rel_l2_diff(const Field& a, const Field& b) {
    Field d = a;
    for (int i = 0; i < d.size(); ++i) d.v[i] -= b.v[i];
    return lp_norm(d, 2.0) / std::max(lp_norm(b, 2.0), 1e-300);
}

}  // namespace

TEST_CASE("solve_K of zero is zero") {
    const Grid g = Grid::line(1.0, 32);
    const EllipticSolver solver(g);
    const Field out = solver.solve_K(Field(g, 0.0));
    for (double x : out.v) CHECK(x == 0.0);
}

TEST_CASE("solve_K inverts the stencil on its eigenfunction") {
    const Grid g = Grid::line(1.0, 64);
    const EllipticSolver solver(g);
    Field w(g);
    for (int i = 0; i < g.nx; ++i) w(i) = std::cos(M_PI * g.x_center(i));
    const Field kw = solver.solve_K(w);
    const double lam = 2.0 / (g.h * g.h) * (1.0 - std::cos(M_PI * g.h));
    for (int i = 0; i < g.nx; ++i)
        CHECK(kw(i) == doctest::Approx(w(i) / lam).epsilon(1e-11));

    // continuum limit 1/pi^2
    const Grid fine = Grid::line(1.0, 4096);
    const EllipticSolver fs(fine);
    Field wf(fine);
    for (int i = 0; i < fine.nx; ++i) wf(i) = std::cos(M_PI * fine.x_center(i));
    const Field kwf = fs.solve_K(wf);
    CHECK(kwf(0) == doctest::Approx(wf(0) / (M_PI * M_PI)).epsilon(1e-5));
}

TEST_CASE("solve_K round trip and zero mean on random fields") {
    for (int dim = 1; dim <= 2; ++dim) {
        const Grid g = dim == 1 ? Grid::line(1.0, 128) : Grid::rect(1.0, 24, 16);
        for (auto method :
             {EllipticSolver::Method::SpectralCosine, EllipticSolver::Method::ConjugateGradient}) {
            const EllipticSolver solver(g, method);
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                const Field w = zero_mean(random_field(g, seed));
                const Field kw = solver.solve_K(w);
                CHECK(std::abs(mean(kw)) <= 1e-12);
                Field lhs = laplacian_neumann(kw);
                for (double& x : lhs.v) x = -x;
                CHECK(rel_l2_diff(lhs, w) <= 1e-10);
            }
        }
    }
}

TEST_CASE("solve_K subtracts a residual mean defensively") {
    const Grid g = Grid::line(1.0, 48);
    const EllipticSolver solver(g);
    Field w = random_field(g, 9);  // nonzero mean
    const Field kw = solver.solve_K(w);
    CHECK(std::abs(mean(kw)) <= 1e-12);
    Field lhs = laplacian_neumann(kw);
    for (double& x : lhs.v) x = -x;
    CHECK(rel_l2_diff(lhs, zero_mean(w)) <= 1e-10);
}

TEST_CASE("helmholtz on constants") {
    const Grid g = Grid::line(2.0, 40);
    const EllipticSolver solver(g);
    const Field c(g, 5.0);
    const Field z0 = solver.solve_helmholtz(c, 0.0);
    const Field z3 = solver.solve_helmholtz(c, 3.0);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(z0(i) == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(z3(i) == doctest::Approx(1.25).epsilon(1e-12));
    }
    CHECK_THROWS_AS(solver.solve_helmholtz(c, -1.0), DomainError);
}

TEST_CASE("helmholtz maximum principle keeps nonnegative data nonnegative") {
    const Grid g = Grid::rect(1.0, 20, 20);
    const EllipticSolver solver(g);
    for (std::uint64_t seed : {4u, 5u}) {
        const Field w = random_field(g, seed, 0.0, 2.0);
        const Field z = solver.solve_helmholtz(w, 0.7);
        CHECK(min_of(z) >= -1e-13);
    }
}

TEST_CASE("h1dual norm basics") {
    const Grid g = Grid::line(1.0, 96);
    const EllipticSolver solver(g);
    CHECK(solver.h1dual_norm(Field(g, 7.0)) == 0.0);
    const Field w = random_field(g, 6);
    Field w2 = w;
    for (double& x : w2.v) x *= 2.0;
    CHECK(solver.h1dual_norm(w2) ==
          doctest::Approx(2.0 * solver.h1dual_norm(w)).epsilon(1e-12));
}

TEST_CASE("h1dual norm of the first cosine mode approaches sqrt(1/2)/pi") {
    const Grid g = Grid::line(1.0, 4096);
    const EllipticSolver solver(g);
    Field w(g);
    for (int i = 0; i < g.nx; ++i) w(i) = std::cos(M_PI * g.x_center(i));
    CHECK(solver.h1dual_norm(w) == doctest::Approx(std::sqrt(0.5) / M_PI).epsilon(1e-5));
}

TEST_CASE("K is self-adjoint and its quadratic form is the dual norm") {
    const Grid g = Grid::line(1.0, 128);
    const EllipticSolver solver(g);
    const Field w1 = zero_mean(random_field(g, 11));
    const Field w2 = zero_mean(random_field(g, 12));
    const double a = dot(solver.solve_K(w1), w2);
    const double b = dot(w1, solver.solve_K(w2));
    CHECK(a == doctest::Approx(b).epsilon(1e-9));

    const double quad = dot(solver.solve_K(w1), w1);
    CHECK(quad >= 0.0);
    const double dual = solver.h1dual_norm(w1);
    // face-gradient vs centered-gradient quadratures differ at O(h^2)
    CHECK(quad == doctest::Approx(dual * dual).epsilon(1e-2));
}

TEST_CASE("spectral and CG backends agree") {
    for (int dim = 1; dim <= 2; ++dim) {
        const Grid g = dim == 1 ? Grid::line(1.0, 128) : Grid::rect(1.0, 20, 24);
        const EllipticSolver spec(g, EllipticSolver::Method::SpectralCosine);
        const EllipticSolver cg(g, EllipticSolver::Method::ConjugateGradient);
        for (std::uint64_t seed : {21u, 22u, 23u}) {
            const Field w = zero_mean(random_field(g, seed));
            CHECK(rel_l2_diff(cg.solve_K(w), spec.solve_K(w)) <= 1e-8);
            const Field s = random_field(g, seed + 100, 0.0, 1.0);
            CHECK(rel_l2_diff(cg.solve_helmholtz(s, 2.0), spec.solve_helmholtz(s, 2.0)) <= 1e-8);
        }
    }
}

TEST_CASE("equivalent-norm surrogate vanishes iff constant and scales linearly") {
    const Grid g = Grid::line(1.0, 64);
    const EllipticSolver solver(g);
    auto surrogate = [&](const Field& w) {
        const Field ai = solver.solve_helmholtz(w, 0.0);
        Field centered = ai;
        const double mu = mean(w);
        for (double& x : centered.v) x -= mu;
        return std::sqrt(integrate(grad_sq(ai))) + lp_norm(centered, 2.0);
    };
    CHECK(surrogate(Field(g, 3.0)) <= 1e-10);
    const Field w = random_field(g, 33);
    const double s1 = surrogate(w);
    CHECK(s1 > 1e-3);
    Field w2 = w;
    for (double& x : w2.v) x *= 2.0;
    CHECK(surrogate(w2) == doctest::Approx(2.0 * s1).epsilon(1e-9));
}

TEST_CASE("solver rejects foreign grids") {
    const EllipticSolver solver(Grid::line(1.0, 32));
    CHECK_THROWS_AS(solver.solve_K(Field(Grid::line(1.0, 64))), StructuralError);
}
