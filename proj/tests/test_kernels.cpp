#include <doctest.h>

#include <cmath>
#include <vector>

#include "xdiff/kernels.hpp"
#include "xdiff/rng.hpp"

using namespace xdiff;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    CounterRng rng{seed};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 2.0 * rng.uniform(i) - 1.0;
    return v;
}

}  // namespace

TEST_CASE("OpenMP stencils match the serial reference bitwise") {
    // Sizes straddle the parallel cutoff.
    for (int nx : {37, 1 << 15, (1 << 15) + 13}) {
        const auto x = random_vec(nx, 7);
        std::vector<double> a(nx), b(nx);
        kernels::laplacian_1d(x.data(), a.data(), nx, 123.0);
        ref::laplacian_1d(x.data(), b.data(), nx, 123.0);
        CHECK(a == b);
        kernels::grad_sq_1d(x.data(), a.data(), nx, 0.5);
        ref::grad_sq_1d(x.data(), b.data(), nx, 0.5);
        CHECK(a == b);
    }
    const int nx = 301, ny = 217;  // above cutoff in total
    const auto x = random_vec(static_cast<std::size_t>(nx) * ny, 8);
    std::vector<double> a(x.size()), b(x.size());
    kernels::laplacian_2d(x.data(), a.data(), nx, ny, 4.0);
    ref::laplacian_2d(x.data(), b.data(), nx, ny, 4.0);
    CHECK(a == b);
    kernels::grad_sq_2d(x.data(), a.data(), nx, ny, 2.0);
    ref::grad_sq_2d(x.data(), b.data(), nx, ny, 2.0);
    CHECK(a == b);
}

TEST_CASE("blocked sums agree with the serial reference") {
    for (std::size_t n : {100u, 5000u, 100000u}) {
        const auto x = random_vec(n, 11);
        const auto y = random_vec(n, 12);
        const double s1 = kernels::sum(x.data(), n);
        const double s2 = ref::sum(x.data(), n);
        CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
        const double p1 = kernels::sum_product(x.data(), y.data(), n);
        const double p2 = ref::sum_product(x.data(), y.data(), n);
        CHECK(p1 == doctest::Approx(p2).epsilon(1e-12));
    }
}

TEST_CASE("blocked sums are independent of the thread count by construction") {
    // The blocked accumulation must equal a serial emulation of the same
    // blocking, bitwise.
    const std::size_t n = 123457;
    const auto x = random_vec(n, 21);
    double expect = 0.0;
    for (std::size_t lo = 0; lo < n; lo += kernels::kSumBlock) {
        const std::size_t hi = std::min(n, lo + kernels::kSumBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        expect += s;
    }
    CHECK(kernels::sum(x.data(), n) == expect);
}

TEST_CASE("min/max/all_finite") {
    std::vector<double> v = {3.0, -7.5, 2.0, 11.25, 0.0};
    CHECK(kernels::min_value(v.data(), v.size()) == -7.5);
    CHECK(kernels::max_value(v.data(), v.size()) == 11.25);
    CHECK(kernels::max_abs(v.data(), v.size()) == 11.25);
    CHECK(kernels::all_finite(v.data(), v.size()));
    v[2] = std::nan("");
    CHECK_FALSE(kernels::all_finite(v.data(), v.size()));
}

TEST_CASE("counter rng reproduces the SplitMix64 vectors and splits") {
    CounterRng r{0};
    CHECK(r.at(0) == 0xE220A8397B1DCDAFULL);
    CHECK(r.at(1) == 0x6E789E6AA1B965F4ULL);
    CHECK(r.at(2) == 0x06C45D188009454FULL);
    for (int i = 0; i < 100; ++i) {
        const double u = r.uniform(i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(r.split(0).seed != r.split(1).seed);
    CHECK(r.split(3).at(0) != r.at(0));
}
