#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "sf/numerics.hpp"
#include "sf/spacetime.hpp"

// Particle trajectories z(tau) parametrized by proper time, with velocity,
// acceleration and jerk, plus the retarded-time (light-cone) solver.

namespace sf {

struct WorldlineState {
    Vec z, u, a, jerk;
};

class Worldline {
  public:
    virtual ~Worldline() = default;
    virtual int dim() const = 0;
    virtual WorldlineState eval(double tau) const = 0;
    virtual double tau_min() const { return -std::numeric_limits<double>::infinity(); }
    virtual double tau_max() const { return std::numeric_limits<double>::infinity(); }

    // d^n z / dtau^n.  Orders 0..3 come from eval(); higher orders fall back
    // to central differences of order n-1 (analytic motions override).
    virtual Vec derivative(double tau, int order) const;

    void require_in_domain(double tau) const;
};

using WorldlinePtr = std::shared_ptr<const Worldline>;

// Analytic reference motions.
WorldlinePtr make_rest(int dim, const Vec& spatial_position);
WorldlinePtr make_uniform(int dim, const Vec& spatial_velocity, const Vec& spatial_position);
// Inertial line through a given event: z(tau) = z_anchor + (tau - tau_anchor) u.
WorldlinePtr make_inertial(const Vec& z_anchor, const Vec& u, double tau_anchor);
// Hyperbolic motion with proper acceleration g along spatial axis (1-based
// spacetime index); vertex at tau = 0 where u = (1,0,...), a = g * axis.
WorldlinePtr make_hyperbolic(int dim, double g, int axis = 1);
// Circular motion of radius R and lab angular velocity omega in the (1,2)
// spatial plane, centered at the origin; requires omega*R < 1.
WorldlinePtr make_circular(int dim, double radius, double omega);

// Cubic-spline worldline through samples (tau_i, z_i).  The spline velocity
// is renormalized to u.u = 1; the worst renormalization factor |N-1| over the
// samples is recorded.  Jerk is a finite difference of a (O(h) only).
class SplineWorldline : public Worldline {
  public:
    SplineWorldline(std::vector<double> taus, std::vector<Vec> positions);
    int dim() const override { return dim_; }
    WorldlineState eval(double tau) const override;
    double tau_min() const override { return splines_[0].xmin(); }
    double tau_max() const override { return splines_[0].xmax(); }
    double max_renormalization() const { return max_renorm_; }

  private:
    WorldlineState eval_raw(double tau) const;
    int dim_;
    std::vector<CubicSpline> splines_;
    double max_renorm_ = 0;
};

// CSV with header "tau,z0,...,z{d-1}".
std::shared_ptr<const SplineWorldline> load_worldline_csv(const std::string& path);

// Time-inversion t -> -t of a worldline (reparametrized so tau increases).
WorldlinePtr reflect(WorldlinePtr w);
Vec reflect_point(Vec x);

struct RetardedPoint {
    double tau = 0;          // proper time of emission/absorption
    WorldlineState state;    // worldline data at tau
    Vec k;                   // x - z(tau), null
    double rho = 0;          // k . u  (positive retarded, negative advanced)
    double residual = 0;     // |(x-z).(x-z)| achieved by the solver
};

// Solve (x - z(tau))^2 = 0 with z0(tau) < x0 (retarded) via certified
// bracketing + bisection + Newton polish.  Throws NotFound when the backward
// cone does not intersect the domain and Singularity when x lies on the
// worldline.
RetardedPoint retarded_time(const Worldline& w, const Vec& x);
// Same with z0(tau) > x0.
RetardedPoint advanced_time(const Worldline& w, const Vec& x);

}  // namespace sf
