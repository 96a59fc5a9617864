#pragma once
#include <array>
#include <functional>
#include <optional>

#include "xdiff/elliptic.hpp"
#include "xdiff/motility.hpp"
#include "xdiff/state.hpp"

namespace xdiff {

// One row per observed time. Column order is the frozen CSV schema (v1).
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_u = 0.0;
    double mean_v = 0.0;
    double L0 = 0.0;
    double D0_grad = 0.0;
    double D0_relax = 0.0;
    double D0_mono = 0.0;
    double lyap_residual = 0.0;
    double entropy_y = 0.0;
    double h1dual_u = 0.0;
    double l2_v = 0.0;
    double h1_v = 0.0;
    double min_v = 0.0;
    double min_u = 0.0;
    double energy_a21 = 0.0;
    double K_residual = 0.0;

    static const std::array<const char*, 16>& csv_columns();
    std::array<double, 16> values() const;
};

struct D0Parts {
    double grad = 0.0;
    double relax = 0.0;
    double mono = 0.0;
    double total() const { return grad + relax + mono; }
};

// G0 is the convex potential anchored at the conserved mean m:
//   G0'(z) = 2 z gamma(z) - m gamma(z) - m gamma(m),  G0(m) = 0.
// Values come from adaptive quadrature of G0'; closed forms are registered
// for the prototype k=1 and power k=1 motilities and cross-checked against
// the quadrature at construction.
class G0Evaluator {
public:
    G0Evaluator(Motility motility, double m, double quad_tol = 1e-10);

    double prime(double z) const;
    double second(double z) const;
    double value(double z) const;
    double value_quadrature(double z) const;
    bool has_closed_form() const { return closed_kind_ != ClosedForm::None; }
    double closed_form(double z) const;

    // integral of G0(v) over the domain; sorted incremental quadrature keeps
    // the cost near one sweep of the value range.
    double integral_over_field(const Field& v) const;

    double anchor() const { return m_; }
    const Motility& motility() const { return motility_; }

private:
    enum class ClosedForm { None, PrototypeK1, PowerK1 };
    Motility motility_;
    double m_;
    double mgm_;  // m * gamma(m)
    double quad_tol_;
    ClosedForm closed_kind_ = ClosedForm::None;
};

double eval_G0(const G0Evaluator& ev, double z);
double eval_G0_second(const G0Evaluator& ev, double z);

// Cellwise gamma(v).
Field gamma_field(const Motility& m, const Field& v);

struct DiagnosticsContext {
    Motility motility;
    GrowthSpec growth = GrowthSpec::none();
    double epsilon = 1.0;
    double m = 0.0;  // mean of the initial density
};

double eval_L0(const State& s, const G0Evaluator& g0, const EllipticSolver& solver,
               double epsilon);
D0Parts eval_D0(const State& s, const G0Evaluator& g0);
double eval_entropy(const State& s, double epsilon);

// |(L0_b - L0_a)/dt + D0_mid| for consecutive records; D0_mid belongs to the
// averaged (half-step) state.
double lyapunov_residual(const DiagnosticsRecord& a, const DiagnosticsRecord& b, double D0_mid);

// || K((u_next - u_prev)/dt) + p - <p> ||_2 with p = u gamma(v) at the
// step-midpoint fields. Only meaningful without growth.
double K_equation_residual(const State& prev, const State& next, const Motility& motility,
                           const EllipticSolver& solver);

DiagnosticsRecord compute_record(const State& s, const DiagnosticsContext& ctx,
                                 const G0Evaluator& g0, const EllipticSolver& solver);
// L0_prev_hint skips recomputing the previous state's functional when the
// caller already holds it (records taken every step).
DiagnosticsRecord compute_record(const State& prev, const State& s,
                                 const DiagnosticsContext& ctx, const G0Evaluator& g0,
                                 const EllipticSolver& solver,
                                 std::optional<double> L0_prev_hint = {});

// Space-time test function with grad phi . n = 0 on the lateral boundary;
// 1D tests receive y = 0.
struct SpaceTimeTest {
    std::function<double(double t, double x, double y)> phi;
    std::function<double(double t, double x, double y)> dphi_dt;
    std::function<double(double t, double x, double y)> lap_phi;
};

struct WeakformResiduals {
    double r_u = 0.0;
    double r_v = 0.0;
};

// Residuals of the two distributional identities (two integrations by parts
// in space, one in time) evaluated on stored snapshots. Time integration is
// per-interval Gauss on the linear-in-time interpolant, so the space-constant
// test reduces exactly to discrete mass conservation.
WeakformResiduals weakform_residual(const Trajectory& traj, const SpaceTimeTest& test,
                                    const Motility& motility, double epsilon);

}  // namespace xdiff
