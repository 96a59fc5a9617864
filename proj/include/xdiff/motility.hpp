#pragma once
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "xdiff/errors.hpp"
#include "xdiff/quadrature.hpp"

namespace xdiff {

enum class MotilityKind { Prototype, Power, Exponential, Tabulated };

// Motility gamma > 0 with analytic first and second derivatives.
//   prototype:   gamma(z) = (z+1)^-k
//   power:       gamma(z) = z^-k, evaluated with a floor z <- max(z, 1e-12);
//                floor hits are counted, z <= 0 is a domain error
//   exponential: gamma(z) = exp(-z)
//   tabulated:   natural cubic spline through (z_i, g_i); derivatives by
//                centered differences with step 1e-6 * max(1, z)
class MotilitySpec {
public:
    // The monotone flag declares hypothesis (gamma' <= 0 and (z gamma)' >= 0);
    // by default it is set exactly when the kind satisfies it, i.e. k <= 1
    // for prototype/power and never for exponential.
    static MotilitySpec prototype(double k, std::optional<bool> monotone_flag = {});
    static MotilitySpec power(double k, std::optional<bool> monotone_flag = {});
    static MotilitySpec exponential();
    static MotilitySpec tabulated(std::vector<double> z, std::vector<double> g);

    double value(double z) const;
    double deriv(double z) const;
    double second(double z) const;

    MotilityKind kind() const { return kind_; }
    double exponent() const { return k_; }
    // Growth constant K1 for 1/gamma <= K1 (z+1)^k; 0 when not declared.
    double growth_constant() const { return K1_; }
    bool monotone() const { return monotone_; }
    // sup gamma on [0, inf); +inf for the power kind.
    double sup_value() const;
    long floor_events() const { return floor_count_ ? floor_count_->load() : 0; }

    static constexpr double kPowerFloor = 1e-12;

private:
    MotilityKind kind_ = MotilityKind::Prototype;
    double k_ = 1.0;
    double K1_ = 0.0;
    bool monotone_ = false;
    std::shared_ptr<std::atomic<long>> floor_count_;
    // tabulated data
    std::vector<double> tz_, tg_, tm_;  // nodes, values, spline second derivs
    double spline_value(double z) const;
};

// eta + (psi_eta * gamma)(z + eta) with the standard unit-mass bump psi,
// gamma extended evenly to the real line. The convolution is evaluated by
// a fixed 64-node Gauss-Legendre rule; the bump weights are normalized by
// the same rule, so mollifying a constant is exact.
class MollifiedMotility {
public:
    MollifiedMotility(MotilitySpec base, double eta);

    double value(double z) const;
    double deriv(double z) const;

    const MotilitySpec& base() const { return base_; }
    double eta() const { return eta_; }

private:
    MotilitySpec base_;
    double eta_;
    std::vector<double> nodes_;    // on (-1,1)
    std::vector<double> weights_;  // bump * GL weights, sum exactly 1
};

using Motility = std::variant<MotilitySpec, MollifiedMotility>;

double gamma_value(const Motility& m, double z);
double gamma_deriv(const Motility& m, double z);
bool gamma_monotone(const Motility& m);

MollifiedMotility mollify(const MotilitySpec& spec, double eta);

// Growth term h(s) = h0 (1 - s^l); kind None disables growth entirely.
struct GrowthSpec {
    enum class Kind { None, LogisticPower };
    Kind kind = Kind::None;
    double h0 = 1.0;
    double l = 1.0;

    static GrowthSpec none() { return {}; }
    static GrowthSpec logistic_power(double h0, double l);

    double value(double s) const;
    // Smallest s with h(s) <= -1.
    double s1() const;
    // Sampled check that h(s) ln s / s decreases without bound.
    bool superlinear_damping(double s_max = 1e6) const;
};

double eval_h(const GrowthSpec& g, double s);

// Pointwise hypothesis audit on a sample grid: signs of gamma' and (z gamma)',
// the bound 0 <= (z gamma)' <= gamma(0), and the Lipschitz estimate
// |z gamma(z) - y gamma(y)| <= gamma(0) |z - y| on sampled pairs.
struct HypothesisReport {
    bool gamma_positive = true;
    bool gamma_prime_nonpositive = true;
    bool zgamma_nondecreasing = true;
    bool zgamma_deriv_bounded = true;
    bool lipschitz_holds = true;
    bool lipschitz_checked = true;  // false when gamma(0) is unbounded (power kind)
    double first_failure_z = 0.0;
    std::string notes;

    bool monotone_hypothesis() const { return gamma_prime_nonpositive && zgamma_nondecreasing; }
};

HypothesisReport check_hypotheses(const MotilitySpec& spec, const std::vector<double>& z_grid);

}  // namespace xdiff
