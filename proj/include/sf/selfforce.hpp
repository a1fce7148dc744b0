#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sf/constants.hpp"
#include "sf/fields.hpp"
#include "sf/ode.hpp"

// Radiation-reaction equations of motion: the Lorentz-Dirac force and its
// reduction-of-order integrator, the raw third-order integrator (runaway
// studies), the 6D reaction-force evaluator, the 2+1 integro-differential
// tail equation, and the scalar self-force.

namespace sf {

// tau0 = 2 e^2 / (3 m): e-folding time of the free runaway solution.
inline double runaway_timescale(const Charge& q) {
    return 2.0 * q.e * q.e / (3.0 * q.m);
}

// f = (2 e^2 / 3) (jerk + (a.a) u).  Orthogonal to u; the u-drain term
// carries the Larmor rate (2 e^2/3)(-a.a).
Vec lorentz_dirac_force(const Vec& u, const Vec& a, const Vec& jerk,
                        const Charge& q);
inline double larmor_rate(const Vec& a, const Charge& q) {
    return -2.0 * q.e * q.e / 3.0 * dot(a, a);
}

// --- 6D reaction force -------------------------------------------------------

// derivs = {u, a, jerk, snap, crackle} (d z/dtau orders 1..5), dim 6.
// All five orders are required and must be kinematically consistent
// (u.u = 1, u.a = 0 and the differentiated chain).  The returned force is
// orthogonal to u by construction and admits the decomposition
// f = dQ/dtau - radiated_rate * u with radiated_rate >= 0.
Vec six_d_reaction_force(const std::vector<Vec>& derivs, const Charge& q);

// e^2 [ (2/9)(a.a)^2 - (4/45) jerk.jerk ]: the 6D analog of the Larmor rate,
// calibrated against this library's 6D flux quadrature and manifestly
// non-negative for kinematically valid states.
double six_d_radiated_rate(const std::vector<Vec>& derivs, const Charge& q);

// --- integrated trajectories -------------------------------------------------

// Worldline backed by dense integrator output; velocity comes from the
// interpolant, acceleration from its derivative, jerk one order lower.
// Beyond the integrated window the trajectory coasts inertially, so the
// light-cone solver stays usable for flux surfaces touching the window edge.
class DenseTrajectory : public Worldline {
  public:
    DenseTrajectory(int dim, DenseOutput steps, WorldlinePtr prehistory,
                    bool state_has_accel);
    int dim() const override { return dim_; }
    double tau_min() const override;
    double tau_max() const override {
        return std::numeric_limits<double>::infinity();
    }
    WorldlineState eval(double tau) const override;

    const DenseOutput& dense() const { return steps_; }
    double tau_start() const { return steps_.t_front(); }
    double tau_data_end() const { return steps_.t_back(); }

  private:
    int dim_;
    DenseOutput steps_;
    WorldlinePtr prehistory_;   // may be null: domain starts at tau_start
    WorldlinePtr posthistory_;  // inertial continuation from the last state
    bool has_accel_;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;
    double initial_step = 1e-3;
    bool adaptive = true;
};

struct IntegrationResult {
    std::shared_ptr<const DenseTrajectory> trajectory;
    OdeDiagnostics diagnostics;
    // |a| e-folding time fitted over the integrated span (raw LD only).
    std::optional<double> efold_time;
};

// Landau-Lifshitz style reduction of order: m a = f_ext + f_self with the
// jerk in f_self replaced by the proper-time derivative of f_ext/m along the
// trajectory (field gradient by Richardson-extrapolated differences).
IntegrationResult integrate_reduced_order(const Charge& q, const FieldMap& field,
                                          const Vec& z0, const Vec& u0,
                                          double tau0, double tau1,
                                          const IntegratorOptions& opt = {});

// The genuine third-order system; exhibits runaways for generic a(0).
// backward = true integrates the time-reversed system (runaway decays).
IntegrationResult integrate_lorentz_dirac_raw(const Charge& q,
                                              const FieldMap& field,
                                              const Vec& z0, const Vec& u0,
                                              const Vec& a0, double tau0,
                                              double tau1,
                                              const IntegratorOptions& opt = {},
                                              bool backward = false);

// --- 2+1 tail equation ---------------------------------------------------

enum class Prehistory { Rest, UniformMotion };

// The tail equation is integrated at fixed step by default: the switch-on
// event makes the right-hand side logarithmically non-smooth at tau_start,
// which stalls embedded error control, while the fixed-step error is
// controlled directly by the step-halving acceptance checks.
struct TailOptions {
    IntegratorOptions integrator{1e-7, 1e-9, 0.02, 1e-3, false};
    Prehistory prehistory = Prehistory::Rest;
    // Look-back cap of the tail integral; infinity integrates the full past
    // (mapped quadrature over the analytic prehistory).
    double horizon = std::numeric_limits<double>::infinity();
    // Relative error budget for horizon truncation before HorizonError.
    double horizon_tolerance = 1e-3;
    double subtraction_scale = kTailRenormScale;
    int gauss_order = 32;
    int fixed_point_iters = 3;
};

// Regularized tail self-force of the 2+1 field at tau0 on a worldline that
// covers the entire past of tau0:
//   f = e^2 [ Int_0^D0 ( u_nu h^{mu nu}/sqrt(S) + a^mu/(2 Delta) ) dDelta
//           + Int_D0^inf u_nu h^{mu nu}/sqrt(S) dDelta ]
// with h the Lienard-Wiechert integrand of lw_field_2plus1 and the
// log-divergent acceleration piece removed (absorbed into the mass at scale
// subtraction_scale).  `accel` is the current acceleration entering the
// counterterm.
// kink_lookback marks a known non-smooth event (prehistory switch-on) at
// tau0 - kink_lookback; the quadrature panels split there.
Vec tail_force_2plus1(const Worldline& past, double tau0, const Vec& accel,
                      const Charge& q, const TailOptions& opt,
                      double kink_lookback =
                          std::numeric_limits<double>::infinity());

IntegrationResult integrate_tail_2plus1(const Charge& q, const FieldMap& field,
                                        const Vec& z0, const Vec& u0,
                                        double tau0, double tau1,
                                        const TailOptions& opt = {});

// --- scalar self-force ---------------------------------------------------

// Massless: f = (g^2/3)(jerk + (a.a) u); radiated rate (g^2/3)(-a.a).
Vec scalar_self_force(const Vec& u, const Vec& a, const Vec& jerk, double g);
inline double scalar_radiated_rate(const Vec& a, double g) {
    return -g * g / 3.0 * dot(a, a);
}

struct ScalarTailOptions {
    double horizon = 200.0;
    int gauss_order = 32;
    double panel = 1.0;  // quadrature panel length in proper time
};

// Massive scalar: local part as above plus the tail integral of the massive
// kernel gradient over the past worldline (smooth at coincidence):
//   f_tail = g^2 P_perp Int dtau' 2 K G_tail'(S),
//   G_tail(S) = -(m/4pi) J1(m s)/s,  s = sqrt(S).
Vec scalar_self_force_massive(const Worldline& past, double tau0, double g,
                              double field_mass, const ScalarTailOptions& opt = {});

// --- exports ---------------------------------------------------------------

// CSV: tau, z^mu, u^mu, a^mu, self-force components, cumulative external
// four-work W0 and radiated-energy estimate.
void export_trajectory(const DenseTrajectory& traj, const Charge& q,
                       const FieldMap& field, int samples,
                       const std::string& path);

}  // namespace sf
