#pragma once
#include <optional>
#include <utility>

#include "xdiff/grid.hpp"
#include "xdiff/motility.hpp"

namespace xdiff {

// Nonconstant steady pair built from a scalar profile w > 0 solving
// d lap w - w + w^k = 0 on the reference domain: the concentration is the
// coordinate-rescaled w on the domain stretched by R = 1/sqrt(d) and the
// density is u = v^k cellwise, so u gamma(v) is constant for gamma(z) = z^-k.
struct SteadyProfile {
    Grid ref_grid;
    double d = 0.0;
    double k = 0.0;
    double R = 0.0;
    Field w;
    Grid scaled_grid;
    Field u;
    Field v;
};

enum class SteadyInit { SpikeAnsatz, ParabolicRelax, Given };

struct SteadyOptions {
    double newton_tol = 1e-12;       // on ||F||_2 relative to ||w||_2
    int newton_max_iter = 200;
    double relax_t_max = 1e3;        // parabolic relaxation horizon
    double relax_stall = 1e-6;       // stop when ||w_t||_2 drops below this
    double spike_amplitude = 3.0;    // ansatz: 1 + A exp(-|x-xc|^2 / (2 sigma^2))
    double spike_width_factor = 3.0; // sigma = factor * sqrt(d)
    bool spike_at_center = false;    // default: boundary cell
};

// Damped Newton for the scalar profile. May land on the constant branch
// w == 1; nonconstancy is the caller's check (`oscillation`).
Field solve_scalar_steady(const Grid& g, double d, double k, SteadyInit strategy,
                          const Field* given = nullptr, const SteadyOptions& opts = {});

// Sup-norm of d lap w - w + w^k (relative to ||w||_2 in the L2 sense).
double scalar_steady_residual(const Field& w, double d, double k);

SteadyProfile scale_to_pattern(const Field& w, double d, double k);

// (r1, r2) = (|| lap(u gamma(v)) ||_2, || lap v - v + u ||_2) on the scaled
// grid; the motility must be the power kind with the profile's exponent.
std::pair<double, double> verify_steady(const SteadyProfile& p, const MotilitySpec& motility);

// Spike ansatz for the Newton iteration.
Field spike_initial(const Grid& g, double d, const SteadyOptions& opts);

// Largest d (within the bracket) below which Newton started from the spike
// ansatz still lands on a nonconstant profile, located by bisection.
struct PatternThreshold {
    double d0 = 0.0;
    int bisections = 0;
};
PatternThreshold find_pattern_threshold(const Grid& g, double k, double d_lo, double d_hi,
                                        double rel_gap = 1e-3,
                                        const SteadyOptions& opts = {});

}  // namespace xdiff
