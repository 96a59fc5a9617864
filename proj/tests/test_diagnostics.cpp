#include <doctest.h>

#include <cmath>

#include "xdiff/diagnostics.hpp"
#include "xdiff/dynamics.hpp"
#include "xdiff/rng.hpp"

using namespace xdiff;

namespace {

State perturbed_state(const Grid& g, double m, double amp, std::uint64_t seed) {
    CounterRng rng{seed};
    const CounterRng ru = rng.split(0), rv = rng.split(1);
    State s;
    s.u = Field(g);
    s.v = Field(g);
    for (int i = 0; i < g.cells(); ++i) {
        s.u.v[i] = m * (1.0 + amp * (2.0 * ru.uniform(i) - 1.0));
        s.v.v[i] = m * (1.0 + amp * (2.0 * rv.uniform(i) - 1.0));
    }
    return s;
}

}  // namespace

TEST_CASE("G0 anchor, prime and displayed second derivative") {
    const G0Evaluator ev(MotilitySpec::prototype(1.0), 1.0);
    CHECK(ev.value(1.0) == 0.0);
    CHECK(ev.prime(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    // 2 z gamma - m gamma - m gamma(m) at z = 0: -1 - 1/2
    CHECK(ev.prime(0.0) == doctest::Approx(-1.5).epsilon(1e-15));
    // 2 z gamma' + 2 gamma - m gamma' at z = 1: 2(-1/4) + 1 + 1/4
    CHECK(ev.second(1.0) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("G0 for the power kind has second derivative m/z^2") {
    const double m = 2.0;
    const G0Evaluator ev(MotilitySpec::power(1.0), m);
    for (double z : {0.5, 1.0, 3.0})
        CHECK(ev.second(z) == doctest::Approx(m / (z * z)).epsilon(1e-13));
}

TEST_CASE("G0 closed forms agree with quadrature") {
    for (double m : {0.5, 1.0, 2.0}) {
        const G0Evaluator proto(MotilitySpec::prototype(1.0), m);
        const G0Evaluator pow1(MotilitySpec::power(1.0), m);
        REQUIRE(proto.has_closed_form());
        REQUIRE(pow1.has_closed_form());
        for (double z = 0.05; z <= 20.0; z += 0.83) {
            CHECK(std::abs(proto.closed_form(z) - proto.value_quadrature(z)) <= 1e-8);
            CHECK(std::abs(pow1.closed_form(z) - pow1.value_quadrature(z)) <= 1e-8);
        }
    }
}

TEST_CASE("G0 second derivative matches finite differences of G0") {
    for (const Motility& mot :
         {Motility(MotilitySpec::prototype(1.0)), Motility(MotilitySpec::prototype(0.5))}) {
        const G0Evaluator ev(mot, 1.0);
        const double step = 1e-4;
        for (double z = 0.5; z <= 5.0; z += 0.37) {
            const double fd2 =
                (ev.value(z + step) - 2.0 * ev.value(z) + ev.value(z - step)) / (step * step);
            CHECK(std::abs(ev.second(z) - fd2) <= 1e-5);
        }
    }
}

TEST_CASE("G0 is nonnegative and convex for monotone motilities") {
    for (double m : {0.5, 1.0, 2.0}) {
        for (const Motility& mot :
             {Motility(MotilitySpec::prototype(0.5)), Motility(MotilitySpec::prototype(1.0)),
              Motility(MotilitySpec::power(1.0))}) {
            const G0Evaluator ev(mot, m);
            for (int i = 1; i <= 1000; ++i) {
                const double z = 20.0 * i / 1000.0;
                CHECK(ev.value(z) >= -1e-9);
                CHECK(ev.second(z) >= -1e-9);
            }
        }
    }
}

TEST_CASE("integral_over_field agrees with the per-cell sum (quadrature path)") {
    const Grid g = Grid::line(1.0, 64);
    // power k=2 has no registered closed form, so the sorted sweep is used
    const G0Evaluator ev(MotilitySpec::power(2.0), 1.0);
    const State s = perturbed_state(g, 1.0, 0.35, 10);
    double direct = 0.0;
    for (double z : s.v.v) direct += ev.value_quadrature(z);
    direct *= g.cell_volume();
    CHECK(ev.integral_over_field(s.v) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("L0 vanishes at the homogeneous pair and splits as expected") {
    const Grid g = Grid::line(1.0, 64);
    const EllipticSolver solver(g);
    const double m = 1.0;
    const G0Evaluator ev(MotilitySpec::prototype(1.0), m);
    State s;
    s.u = Field(g, m);
    s.v = Field(g, m);
    CHECK(eval_L0(s, ev, solver, 1.0) <= 1e-14);

    // u = m: only the potential term remains
    State sv = s;
    for (int i = 0; i < g.nx; ++i) sv.v(i) = m + 0.1 * std::cos(M_PI * g.x_center(i));
    const double eps = 0.7;
    CHECK(eval_L0(sv, ev, solver, eps) ==
          doctest::Approx(eps * ev.integral_over_field(sv.v)).epsilon(1e-12));

    // doubling u - m quadruples the dual-norm term
    State su = s;
    for (int i = 0; i < g.nx; ++i) su.u(i) = m + 0.05 * std::cos(M_PI * g.x_center(i));
    const double l1 = eval_L0(su, ev, solver, 1.0);
    for (int i = 0; i < g.nx; ++i) su.u(i) = m + 0.10 * std::cos(M_PI * g.x_center(i));
    const double l2 = eval_L0(su, ev, solver, 1.0);
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-10));
}

TEST_CASE("D0 components vanish where the paper says they vanish") {
    const Grid g = Grid::line(1.0, 48);
    const double m = 1.0;
    const G0Evaluator ev(MotilitySpec::prototype(1.0), m);

    State hom;
    hom.u = Field(g, m);
    hom.v = Field(g, m);
    const D0Parts zero = eval_D0(hom, ev);
    CHECK(std::abs(zero.grad) <= 1e-14);
    CHECK(std::abs(zero.relax) <= 1e-14);
    CHECK(std::abs(zero.mono) <= 1e-14);

    // u = v pointwise kills the relaxation term
    State uv = hom;
    for (int i = 0; i < g.nx; ++i) {
        uv.v(i) = m + 0.2 * std::cos(M_PI * g.x_center(i));
        uv.u(i) = uv.v(i);
    }
    CHECK(eval_D0(uv, ev).relax <= 1e-14);

    // v = m: only relaxation survives, equal to gamma(m) ||u - m||_2^2
    State vm = hom;
    for (int i = 0; i < g.nx; ++i) vm.u(i) = m + 0.3 * std::cos(2.0 * M_PI * g.x_center(i));
    const D0Parts parts = eval_D0(vm, ev);
    CHECK(parts.grad <= 1e-14);
    CHECK(std::abs(parts.mono) <= 1e-14);
    Field um = vm.u;
    for (double& x : um.v) x -= m;
    const double expect = MotilitySpec::prototype(1.0).value(m) * std::pow(lp_norm(um, 2.0), 2);
    CHECK(parts.relax == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("entropy functional") {
    const Grid g = Grid::line(1.0, 32);
    State s;
    s.u = Field(g, 0.0);
    s.v = Field(g, 2.0);
    CHECK(eval_entropy(s, 1.0) == doctest::Approx(0.0).epsilon(1e-14));

    const double u0 = M_E * M_E - M_E;  // u + e = e^2, integrand e^2 (2 - 1)
    s.u = Field(g, u0);
    CHECK(eval_entropy(s, 1.0) == doctest::Approx(M_E * M_E * g.measure()).epsilon(1e-13));

    for (int i = 0; i < g.nx; ++i) s.v(i) = 2.0 + 0.3 * std::sin(2.0 * M_PI * g.x_center(i));
    const double e1 = eval_entropy(s, 1.0), e2 = eval_entropy(s, 2.0), e3 = eval_entropy(s, 3.0);
    CHECK(e3 - e2 == doctest::Approx(e2 - e1).epsilon(1e-12));
}

TEST_CASE("residuals vanish on the homogeneous trajectory") {
    const Grid g = Grid::line(1.0, 48);
    const EllipticSolver solver(g);
    const double m = 1.0;
    const Motility mot = MotilitySpec::prototype(1.0);
    State a;
    a.t = 0.0;
    a.u = Field(g, m);
    a.v = Field(g, m);
    State b = a;
    b.t = 0.25;
    CHECK(K_equation_residual(a, b, mot, solver) <= 1e-12);

    DiagnosticsRecord ra, rb;
    ra.t = 0.0;
    ra.L0 = 0.0;
    rb.t = 0.25;
    rb.L0 = 0.0;
    CHECK(lyapunov_residual(ra, rb, 0.0) == 0.0);
    CHECK_THROWS_AS(lyapunov_residual(rb, ra, 0.0), DomainError);
}

TEST_CASE("the K-equation right side has zero mean by construction") {
    const Grid g = Grid::line(1.0, 64);
    const State s = perturbed_state(g, 1.0, 0.4, 55);
    const Motility mot = MotilitySpec::prototype(1.0);
    Field p = gamma_field(mot, s.v);
    for (int i = 0; i < p.size(); ++i) p.v[i] *= s.u.v[i];
    const double pbar = mean(p);
    for (double& x : p.v) x -= pbar;
    CHECK(std::abs(mean(p)) <= 1e-14);
}

TEST_CASE("weak-form residuals: zero test function and space-constant reduction") {
    const Grid g = Grid::line(1.0, 48);
    ModelParams params;
    params.motility = MotilitySpec::prototype(1.0);
    State s0 = perturbed_state(g, 1.0, 0.3, 77);
    RunOptions opts;
    opts.t_end = 0.02;
    opts.snapshot_count = 17;
    const RunResult res = run(params, s0, opts);
    REQUIRE(res.snapshots.size() >= 2);

    SpaceTimeTest zero;
    zero.phi = [](double, double, double) { return 0.0; };
    zero.dphi_dt = zero.phi;
    zero.lap_phi = zero.phi;
    const WeakformResiduals rz = weakform_residual(res.snapshots, zero, params.motility, 1.0);
    CHECK(rz.r_u == 0.0);
    CHECK(rz.r_v == 0.0);

    // phi = psi(t) with psi(0) = psi(T) = 0: r_u reduces to mass conservation
    const double T = opts.t_end;
    SpaceTimeTest tent;
    tent.phi = [T](double t, double, double) { return std::sin(M_PI * t / T); };
    tent.dphi_dt = [T](double t, double, double) { return M_PI / T * std::cos(M_PI * t / T); };
    tent.lap_phi = [](double, double, double) { return 0.0; };
    const WeakformResiduals rt = weakform_residual(res.snapshots, tent, params.motility, 1.0);
    CHECK(rt.r_u <= 1e-10);
}

TEST_CASE("per-record residual columns are populated by run") {
    const Grid g = Grid::line(1.0, 48);
    ModelParams params;
    params.motility = MotilitySpec::prototype(1.0);
    State s0 = perturbed_state(g, 1.0, 0.3, 99);
    RunOptions opts;
    opts.t_end = 0.005;
    opts.observer_stride = 5;
    const RunResult res = run(params, s0, opts);
    REQUIRE(res.records.size() >= 3);
    CHECK(res.records.front().lyap_residual == 0.0);  // no predecessor
    for (std::size_t i = 1; i < res.records.size(); ++i) {
        CHECK(res.records[i].lyap_residual >= 0.0);
        CHECK(std::isfinite(res.records[i].K_residual));
        CHECK(res.records[i].L0 <= res.records[i - 1].L0 * (1.0 + 1e-9));
    }
}
