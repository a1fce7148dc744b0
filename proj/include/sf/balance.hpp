#pragma once

#include <functional>
#include <string>

#include "sf/fields.hpp"
#include "sf/selfforce.hpp"

// Numerical verification of conservation laws: energy-momentum and angular
// momentum fluxes through surfaces, the bound/radiative split, and
// work-energy ledgers for integrated trajectories.

namespace sf {

// Surface quadrature: product Gauss-Legendre in the polar angles and the
// tau/time direction, trapezoid in azimuth (dimension-generic).  The surface
// Jacobian comes from the tangent vectors, so no explicit sin factors appear.
struct SurfaceQuadrature {
    int polar_order = 24;
    int azimuth_order = 48;
    int tau_order = 16;
    int tau_panels = 8;
    int threads = 1;
};

// T^{mu nu}(x), contravariant.
using StressProvider = std::function<Mat(const Vec& x)>;

struct FluxResult {
    Vec momentum;        // Int T^{mu nu} dSigma_nu
    Mat angular;         // Int (x^mu T^{nu l} - x^nu T^{mu l}) dSigma_l
    double error_estimate = 0;  // from quadrature-order halving
};

// Flux through the Dirac retarded tube rho = R, retarded tau in [tau0, tau1]:
// every surface point x = z(tau) + R (u + m(angles)) has the single emission
// point z(tau).  Outward-oriented.
FluxResult flux_through_retarded_tube(const Worldline& w, double radius,
                                      double tau0, double tau1,
                                      const StressProvider& stress, int dim,
                                      const SurfaceQuadrature& q = {});

// Flux through a coordinate sphere |x - center| = R over t in [t0, t1].
FluxResult flux_through_static_sphere(const Vec& center_spatial, double radius,
                                      double t0, double t1,
                                      const StressProvider& stress, int dim,
                                      const SurfaceQuadrature& q = {});

// Field four-momentum inside the spatial annulus r_in < |x - center| < r_out
// at fixed coordinate time (time-slab surfaces are differences of these).
Vec field_momentum_in_annulus(const Vec& center_spatial, double r_in,
                              double r_out, double t,
                              const StressProvider& stress, int dim,
                              const SurfaceQuadrature& q = {});

// --- stress providers --------------------------------------------------------

enum class FieldPart { Full, Radiative, Velocity };

StressProvider em_stress_provider(WorldlinePtr w, double e,
                                  FieldPart part = FieldPart::Full,
                                  bool advanced = false);
StressProvider em_stress_provider_6d(WorldlinePtr w, double e);
StressProvider em_stress_provider_2plus1(WorldlinePtr w, double e,
                                         const PastIntegralOptions& opt = {});
StressProvider scalar_stress_provider(WorldlinePtr w, double g,
                                      FieldPart part = FieldPart::Full);

// --- high-level operations --------------------------------------------------

// Flux surface descriptor.  RetardedSphere is the workhorse (rho = radius in
// retarded coordinates, window in retarded proper time); Sphere is a fixed
// coordinate sphere over a coordinate-time window; TimeSlab reports the
// field-momentum content change of the annulus r_inner..radius between t0
// and t1.
struct FluxSurface {
    enum class Kind { RetardedSphere, Sphere, TimeSlab };
    Kind kind = Kind::RetardedSphere;
    double radius = 10.0;
    double t0 = 0.0, t1 = 1.0;   // retarded tau window or coordinate window
    Vec center_spatial;          // Sphere/TimeSlab; defaults to the origin
    double r_inner = 1.0;        // TimeSlab only
    SurfaceQuadrature quad{};
};

FluxResult flux_energy_momentum(const Worldline& w, const Charge& q,
                                const FluxSurface& surface, int dim,
                                FieldPart part = FieldPart::Full);

// Energy-momentum radiated through the retarded tube (radius R) for the
// given retarded interval, with an error estimate.
FluxResult flux_energy_momentum(const Worldline& w, const Charge& q,
                                double radius, double tau0, double tau1,
                                int dim, FieldPart part = FieldPart::Full,
                                const SurfaceQuadrature& quad = {});

// Antisymmetric M^{mu nu} radiated through the retarded tube: quadrature of
// x^mu T^{nu l} - x^nu T^{mu l} over dSigma_l.
Mat flux_angular_momentum(const Worldline& w, const Charge& q, double radius,
                          double tau0, double tau1, int dim,
                          FieldPart part = FieldPart::Full,
                          const SurfaceQuadrature& quad = {});

struct BoundRadiativeSplit {
    Vec radiative;  // flux of the 1/rho^2 stress piece (R-independent)
    Vec bound;      // remainder, falls off as 1/R
};

BoundRadiativeSplit split_bound_radiative(const Worldline& w, const Charge& q,
                                          double radius, double tau0,
                                          double tau1,
                                          const SurfaceQuadrature& quad = {});

struct BalanceReport {
    Vec dP_particle;
    Vec P_flux;
    Vec W;
    Vec residual;
    Mat M_flux;
    double rel_residual = 0;

    std::string to_json() const;
};

struct LedgerOptions {
    double radius = 20.0;
    SurfaceQuadrature quad{};
    // stress provider for the self-field; defaults to the 4D EM field of the
    // trajectory itself
    StressProvider stress;
};

// W - dP_particle - P_radiated = residual, everything over the trajectory's
// proper-time span; relative residual is measured against the largest entry.
BalanceReport work_energy_ledger(const DenseTrajectory& traj, const Charge& q,
                                 const FieldMap& external, const LedgerOptions& opt);

}  // namespace sf
