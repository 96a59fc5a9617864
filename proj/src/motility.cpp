#include "xdiff/motility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xdiff {

namespace {

double bump(double t) {
    // C-infinity bump on (-1,1), unnormalized.
    const double s = 1.0 - t * t;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

}  // namespace

MotilitySpec MotilitySpec::prototype(double k, std::optional<bool> monotone_flag) {
    if (!(k > 0)) throw DomainError("prototype motility requires k > 0");
    MotilitySpec s;
    s.kind_ = MotilityKind::Prototype;
    s.k_ = k;
    s.K1_ = 1.0;  // 1/gamma = (z+1)^k
    s.monotone_ = monotone_flag.value_or(k <= 1.0);
    s.floor_count_ = std::make_shared<std::atomic<long>>(0);
    return s;
}

MotilitySpec MotilitySpec::power(double k, std::optional<bool> monotone_flag) {
    if (!(k > 0)) throw DomainError("power motility requires k > 0");
    MotilitySpec s;
    s.kind_ = MotilityKind::Power;
    s.k_ = k;
    s.K1_ = 1.0;  // 1/gamma = z^k <= (z+1)^k
    s.monotone_ = monotone_flag.value_or(k <= 1.0);
    s.floor_count_ = std::make_shared<std::atomic<long>>(0);
    return s;
}

MotilitySpec MotilitySpec::exponential() {
    MotilitySpec s;
    s.kind_ = MotilityKind::Exponential;
    s.k_ = 0.0;
    s.K1_ = 0.0;   // 1/gamma = e^z has no algebraic bound
    s.monotone_ = false;  // (z gamma)' changes sign at z = 1
    s.floor_count_ = std::make_shared<std::atomic<long>>(0);
    return s;
}

MotilitySpec MotilitySpec::tabulated(std::vector<double> z, std::vector<double> g) {
    if (z.size() != g.size() || z.size() < 3)
        throw DomainError("tabulated motility needs >= 3 nodes");
    for (std::size_t i = 0; i + 1 < z.size(); ++i)
        if (!(z[i] < z[i + 1])) throw DomainError("tabulated nodes must increase");
    for (double gv : g)
        if (!(gv > 0)) throw DomainError("tabulated motility must be positive");
    MotilitySpec s;
    s.kind_ = MotilityKind::Tabulated;
    s.floor_count_ = std::make_shared<std::atomic<long>>(0);
    const int n = static_cast<int>(z.size());
    // Natural cubic spline second derivatives.
    std::vector<double> m(n, 0.0), u(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const double sig = (z[i] - z[i - 1]) / (z[i + 1] - z[i - 1]);
        const double p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        u[i] = (g[i + 1] - g[i]) / (z[i + 1] - z[i]) - (g[i] - g[i - 1]) / (z[i] - z[i - 1]);
        u[i] = (6.0 * u[i] / (z[i + 1] - z[i - 1]) - sig * u[i - 1]) / p;
    }
    for (int i = n - 2; i >= 0; --i) m[i] = m[i] * m[i + 1] + u[i];
    s.tz_ = std::move(z);
    s.tg_ = std::move(g);
    s.tm_ = std::move(m);
    return s;
}

double MotilitySpec::spline_value(double z) const {
    const auto& x = tz_;
    const int n = static_cast<int>(x.size());
    // Clamp to the table range; constant extrapolation keeps gamma positive.
    if (z <= x.front()) return tg_.front();
    if (z >= x.back()) return tg_.back();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (x[mid] > z ? hi : lo) = mid;
    }
    const double seg = x[hi] - x[lo];
    const double a = (x[hi] - z) / seg, b = (z - x[lo]) / seg;
    return a * tg_[lo] + b * tg_[hi] +
           ((a * a * a - a) * tm_[lo] + (b * b * b - b) * tm_[hi]) * seg * seg / 6.0;
}

double MotilitySpec::value(double z) const {
    switch (kind_) {
        case MotilityKind::Prototype:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return std::pow(z + 1.0, -k_);
        case MotilityKind::Power: {
            if (z <= 0) throw DomainError("power motility requires z > 0");
            if (z < kPowerFloor) {
                floor_count_->fetch_add(1, std::memory_order_relaxed);
                z = kPowerFloor;
            }
            return std::pow(z, -k_);
        }
        case MotilityKind::Exponential:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return std::exp(-z);
        case MotilityKind::Tabulated:
            return spline_value(z);
    }
    return 0.0;
}

double MotilitySpec::deriv(double z) const {
    switch (kind_) {
        case MotilityKind::Prototype:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return -k_ * std::pow(z + 1.0, -k_ - 1.0);
        case MotilityKind::Power: {
            if (z <= 0) throw DomainError("power motility requires z > 0");
            if (z < kPowerFloor) {
                floor_count_->fetch_add(1, std::memory_order_relaxed);
                z = kPowerFloor;
            }
            return -k_ * std::pow(z, -k_ - 1.0);
        }
        case MotilityKind::Exponential:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return -std::exp(-z);
        case MotilityKind::Tabulated: {
            const double step = 1e-6 * std::max(1.0, z);
            return (spline_value(z + step) - spline_value(z - step)) / (2.0 * step);
        }
    }
    return 0.0;
}

double MotilitySpec::second(double z) const {
    switch (kind_) {
        case MotilityKind::Prototype:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return k_ * (k_ + 1.0) * std::pow(z + 1.0, -k_ - 2.0);
        case MotilityKind::Power: {
            if (z <= 0) throw DomainError("power motility requires z > 0");
            if (z < kPowerFloor) {
                floor_count_->fetch_add(1, std::memory_order_relaxed);
                z = kPowerFloor;
            }
            return k_ * (k_ + 1.0) * std::pow(z, -k_ - 2.0);
        }
        case MotilityKind::Exponential:
            if (z < 0) throw DomainError("motility argument must be >= 0");
            return std::exp(-z);
        case MotilityKind::Tabulated: {
            const double step = 1e-6 * std::max(1.0, z);
            return (spline_value(z + step) - 2.0 * spline_value(z) + spline_value(z - step)) /
                   (step * step);
        }
    }
    return 0.0;
}

double MotilitySpec::sup_value() const {
    switch (kind_) {
        case MotilityKind::Prototype:
            return 1.0;  // attained at z = 0
        case MotilityKind::Power:
            return std::numeric_limits<double>::infinity();
        case MotilityKind::Exponential:
            return 1.0;
        case MotilityKind::Tabulated:
            return *std::max_element(tg_.begin(), tg_.end());
    }
    return 0.0;
}

MollifiedMotility::MollifiedMotility(MotilitySpec base, double eta)
    : base_(std::move(base)), eta_(eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("mollifier eta must lie in (0,1)");
    const QuadratureRule gl = gauss_legendre(64);
    nodes_ = gl.nodes;
    weights_.resize(nodes_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        weights_[i] = gl.weights[i] * bump(nodes_[i]);
        total += weights_[i];
    }
    // Normalizing by the same rule gives unit mass exactly under this rule.
    for (double& w : weights_) w /= total;
}

double MollifiedMotility::value(double z) const {
    if (z < 0) throw DomainError("motility argument must be >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double arg = z + eta_ * (1.0 - nodes_[i]);  // > 0 for z >= 0
        acc += weights_[i] * base_.value(std::abs(arg));
    }
    return eta_ + acc;
}

double MollifiedMotility::deriv(double z) const {
    if (z < 0) throw DomainError("motility argument must be >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double arg = z + eta_ * (1.0 - nodes_[i]);
        acc += weights_[i] * base_.deriv(std::abs(arg));
    }
    return acc;
}

double gamma_value(const Motility& m, double z) {
    return std::visit([z](const auto& g) { return g.value(z); }, m);
}

double gamma_deriv(const Motility& m, double z) {
    return std::visit([z](const auto& g) { return g.deriv(z); }, m);
}

bool gamma_monotone(const Motility& m) {
    if (const auto* s = std::get_if<MotilitySpec>(&m)) return s->monotone();
    return std::get<MollifiedMotility>(m).base().monotone();
}

MollifiedMotility mollify(const MotilitySpec& spec, double eta) {
    return MollifiedMotility(spec, eta);
}

GrowthSpec GrowthSpec::logistic_power(double h0, double l) {
    if (!(h0 > 0)) throw DomainError("growth requires h0 > 0");
    if (!(l >= 1)) throw DomainError("growth requires l >= 1");
    GrowthSpec g;
    g.kind = Kind::LogisticPower;
    g.h0 = h0;
    g.l = l;
    return g;
}

double GrowthSpec::value(double s) const {
    if (kind == Kind::None) return 0.0;
    if (s < 0) throw DomainError("growth argument must be >= 0");
    return h0 * (1.0 - std::pow(s, l));
}

double GrowthSpec::s1() const {
    if (kind == Kind::None) return std::numeric_limits<double>::infinity();
    // h0 (1 - s^l) = -1  =>  s = (1 + 1/h0)^(1/l)
    return std::pow(1.0 + 1.0 / h0, 1.0 / l);
}

bool GrowthSpec::superlinear_damping(double s_max) const {
    if (kind == Kind::None) return false;
    // h(s) ln s / s must decrease through negative values once s is large.
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 8.0; s <= s_max; s *= 2.0) {
        const double q = value(s) * std::log(s) / s;
        if (!(q < prev)) return false;
        prev = q;
    }
    return prev < 0.0;
}

double eval_h(const GrowthSpec& g, double s) { return g.value(s); }

HypothesisReport check_hypotheses(const MotilitySpec& spec, const std::vector<double>& z_grid) {
    HypothesisReport rep;
    const bool has_gamma0 = spec.kind() != MotilityKind::Power;
    const double gamma0 = has_gamma0 ? spec.value(0.0) : std::numeric_limits<double>::infinity();
    rep.lipschitz_checked = has_gamma0;
    if (!has_gamma0) rep.notes = "gamma(0) unbounded; Lipschitz check skipped";

    auto flag = [&rep](bool& ok, double z) {
        if (ok) {
            ok = false;
            if (rep.first_failure_z == 0.0) rep.first_failure_z = z;
        }
    };

    const double slack = 1e-12;
    for (double z : z_grid) {
        const double g = spec.value(z);
        const double gp = spec.deriv(z);
        const double zg_prime = g + z * gp;
        if (!(g > 0)) flag(rep.gamma_positive, z);
        if (gp > slack) flag(rep.gamma_prime_nonpositive, z);
        if (zg_prime < -slack) flag(rep.zgamma_nondecreasing, z);
        if (has_gamma0 && (zg_prime < -slack || zg_prime > gamma0 + slack))
            flag(rep.zgamma_deriv_bounded, z);
    }
    if (has_gamma0) {
        // Sampled pairs, stride keeps the pair count quadratic-but-small.
        const std::size_t stride = std::max<std::size_t>(1, z_grid.size() / 32);
        for (std::size_t i = 0; i < z_grid.size(); i += stride)
            for (std::size_t j = 0; j < z_grid.size(); j += stride) {
                const double a = z_grid[i], b = z_grid[j];
                const double lhs = std::abs(a * spec.value(a) - b * spec.value(b));
                if (lhs > gamma0 * std::abs(a - b) + 1e-10) flag(rep.lipschitz_holds, a);
            }
    }
    return rep;
}

}  // namespace xdiff
