#include <doctest.h>

#include <cmath>
#include <vector>

#include "xdiff/motility.hpp"

using namespace xdiff;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("gamma values") {
    CHECK(MotilitySpec::prototype(1.0).value(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(MotilitySpec::power(1.0).value(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(MotilitySpec::exponential().value(0.0) == 1.0);
    CHECK_THROWS_AS(MotilitySpec::power(1.0).value(0.0), DomainError);
    CHECK_THROWS_AS(MotilitySpec::power(1.0).value(-1.0), DomainError);
    CHECK_THROWS_AS(MotilitySpec::prototype(1.0).value(-0.5), DomainError);
}

TEST_CASE("power floor events are counted") {
    const MotilitySpec g = MotilitySpec::power(2.0);
    CHECK(g.floor_events() == 0);
    (void)g.value(1e-15);
    (void)g.value(1e-13);
    (void)g.value(1.0);
    CHECK(g.floor_events() == 2);
    CHECK(g.value(1e-15) == g.value(MotilitySpec::kPowerFloor));
}

TEST_CASE("analytic derivatives") {
    CHECK(MotilitySpec::prototype(1.0).deriv(1.0) == doctest::Approx(-0.25).epsilon(1e-15));
    const MotilitySpec e = MotilitySpec::exponential();
    for (double z : {0.1, 1.0, 4.0})
        CHECK(e.deriv(z) == doctest::Approx(-e.value(z)).epsilon(1e-12));
}

TEST_CASE("derivatives agree with finite differences") {
    const double step = 1e-6;
    for (const MotilitySpec& g : {MotilitySpec::prototype(0.5), MotilitySpec::prototype(2.0),
                                  MotilitySpec::power(1.0), MotilitySpec::exponential()}) {
        for (double z : linspace(0.1, 10.0, 40)) {
            const double fd = (g.value(z + step) - g.value(z - step)) / (2.0 * step);
            CHECK(std::abs(g.deriv(z) - fd) <= 1e-6);
            const double fd2 = (g.value(z + step) - 2.0 * g.value(z) + g.value(z - step)) /
                               (step * step);
            CHECK(std::abs(g.second(z) - fd2) <= 1e-3 * std::max(1.0, std::abs(fd2)));
        }
    }
}

TEST_CASE("tabulated motility follows its samples") {
    std::vector<double> z = linspace(0.0, 10.0, 200), g(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) g[i] = 1.0 / (1.0 + z[i]);
    const MotilitySpec tab = MotilitySpec::tabulated(z, g);
    for (double zz : linspace(0.2, 9.8, 37)) {
        CHECK(tab.value(zz) == doctest::Approx(1.0 / (1.0 + zz)).epsilon(1e-6));
        CHECK(tab.deriv(zz) ==
              doctest::Approx(-1.0 / ((1.0 + zz) * (1.0 + zz))).epsilon(1e-3));
    }
}

TEST_CASE("mollification stays above eta and below sup gamma + 1") {
    for (double eta : {0.5, 0.1, 0.01}) {
        const MollifiedMotility gm = mollify(MotilitySpec::prototype(1.0), eta);
        for (double z : linspace(0.0, 100.0, 1000)) {
            const double val = gm.value(z);
            CHECK(val >= eta - 1e-15);
            CHECK(val <= 1.0 + 1.0 + 1e-8);  // K0 = sup gamma = 1
        }
    }
    CHECK_THROWS_AS(mollify(MotilitySpec::prototype(1.0), 0.0), DomainError);
    CHECK_THROWS_AS(mollify(MotilitySpec::prototype(1.0), 1.0), DomainError);
}

TEST_CASE("mollifying a constant adds exactly eta") {
    std::vector<double> z = linspace(0.0, 20.0, 50), g(z.size(), 3.25);
    const MotilitySpec constant = MotilitySpec::tabulated(z, g);
    const MollifiedMotility gm = mollify(constant, 0.25);
    for (double zz : linspace(0.0, 15.0, 100))
        CHECK(gm.value(zz) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("mollified reciprocal obeys the algebraic growth bound") {
    // 1/gamma_eta <= 3^k K1 (z+1)^k with k = K1 = 1 for the prototype.
    for (double eta : {0.5, 0.1, 0.01}) {
        const MollifiedMotility gm = mollify(MotilitySpec::prototype(1.0), eta);
        for (double z : linspace(0.0, 100.0, 1000))
            CHECK(1.0 / gm.value(z) <= 3.0 * (z + 1.0) + 1e-8);
    }
}

TEST_CASE("mollified family converges uniformly as eta -> 0") {
    const double eta = 1e-3;
    for (const MotilitySpec& base :
         {MotilitySpec::prototype(0.5), MotilitySpec::prototype(1.0)}) {
        const MollifiedMotility gm = mollify(base, eta);
        const double Z = 10.0;
        double max_err = 0.0, modulus = 0.0;
        for (double z : linspace(0.0, Z, 2000)) {
            max_err = std::max(max_err, std::abs(gm.value(z) - base.value(z)));
            modulus = std::max(modulus, std::abs(base.value(z + 2.0 * eta) - base.value(z)));
        }
        CHECK(max_err <= 10.0 * modulus);
    }
}

TEST_CASE("mollified derivative differentiates under the integral") {
    const MollifiedMotility gm = mollify(MotilitySpec::prototype(1.0), 0.1);
    const double step = 1e-6;
    for (double z : linspace(0.1, 5.0, 20)) {
        const double fd = (gm.value(z + step) - gm.value(z - step)) / (2.0 * step);
        CHECK(gm.deriv(z) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("growth term") {
    CHECK(eval_h(GrowthSpec::logistic_power(1.0, 1.0), 1.0) == 0.0);
    CHECK(eval_h(GrowthSpec::logistic_power(2.0, 2.0), 0.0) == 2.0);
    CHECK(eval_h(GrowthSpec::logistic_power(1.0, 1.0), 3.0) == doctest::Approx(-2.0));
    CHECK(GrowthSpec::logistic_power(1.0, 1.0).s1() == doctest::Approx(2.0));
    CHECK(GrowthSpec::logistic_power(1.0, 1.0).superlinear_damping());
    CHECK_FALSE(GrowthSpec::none().superlinear_damping());
    CHECK_THROWS_AS(GrowthSpec::logistic_power(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(GrowthSpec::logistic_power(1.0, 0.5), DomainError);
}

TEST_CASE("hypothesis audit: prototype k=1 passes") {
    const auto rep = check_hypotheses(MotilitySpec::prototype(1.0), linspace(1e-3, 50.0, 2000));
    CHECK(rep.gamma_positive);
    CHECK(rep.gamma_prime_nonpositive);
    CHECK(rep.zgamma_nondecreasing);
    CHECK(rep.zgamma_deriv_bounded);
    CHECK(rep.lipschitz_holds);
    CHECK(rep.lipschitz_checked);
    CHECK(rep.monotone_hypothesis());
}

TEST_CASE("hypothesis audit: prototype k=2 fails monotonicity of z gamma beyond 1") {
    // (z gamma)' = (1-z)/(1+z)^3 turns negative for z > 1.
    const auto rep = check_hypotheses(MotilitySpec::prototype(2.0), linspace(1e-3, 50.0, 2000));
    CHECK(rep.gamma_prime_nonpositive);
    CHECK_FALSE(rep.zgamma_nondecreasing);
    CHECK(rep.first_failure_z > 1.0);
    CHECK_FALSE(rep.monotone_hypothesis());
}

TEST_CASE("hypothesis audit: power k=1 has z gamma constant") {
    const auto rep = check_hypotheses(MotilitySpec::power(1.0), linspace(1e-3, 50.0, 2000));
    CHECK(rep.gamma_positive);
    CHECK(rep.zgamma_nondecreasing);
    CHECK_FALSE(rep.lipschitz_checked);  // gamma(0) unbounded, skipped with notice
    CHECK(!rep.notes.empty());
}

TEST_CASE("monotone defaults follow the k <= 1 boundary") {
    CHECK(MotilitySpec::prototype(0.5).monotone());
    CHECK(MotilitySpec::prototype(1.0).monotone());
    CHECK_FALSE(MotilitySpec::prototype(1.5).monotone());
    CHECK(MotilitySpec::power(1.0).monotone());
    CHECK_FALSE(MotilitySpec::power(2.0).monotone());
    CHECK_FALSE(MotilitySpec::exponential().monotone());
    CHECK(MotilitySpec::prototype(2.0, true).monotone());  // explicit override
}

TEST_CASE("monotone spec: gamma nonincreasing, z gamma nondecreasing on samples") {
    const MotilitySpec g = MotilitySpec::prototype(0.7);
    const auto zs = linspace(0.1, 30.0, 500);
    double prev_g = g.value(zs.front()), prev_zg = zs.front() * prev_g;
    for (std::size_t i = 1; i < zs.size(); ++i) {
        const double gv = g.value(zs[i]);
        CHECK(gv <= prev_g + 1e-15);
        const double zg = zs[i] * gv;
        CHECK(zg >= prev_zg - 1e-15);
        prev_g = gv;
        prev_zg = zg;
    }
}
