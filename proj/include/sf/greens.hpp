#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sf/errors.hpp"

// Retarded Green's functions of the d'Alembert operator in d-dimensional
// Minkowski space, static potentials, and pulse convolution (Huygens
// diagnostics).  Distributional light-cone terms are never evaluated
// pointwise; they are carried as (derivative order, amplitude, radial power)
// descriptors consumed by the convolution.

namespace sf {

// amp * r^{-rpow} * delta^{(order)}(t - r)
struct ShellTerm {
    int order = 0;
    double amp = 0;
    int rpow = 0;

    double coefficient(double r) const;
};

class GreensKernel {
  public:
    GreensKernel(int dim, double mass);

    int dim() const { return d_; }
    double mass() const { return mass_; }
    // Sharp part present iff d even and mass = 0; tail iff d odd or mass > 0.
    bool has_sharp() const { return !sharp_.empty(); }
    bool has_tail() const { return d_ % 2 == 1 || mass_ > 0; }
    const std::vector<ShellTerm>& sharp_terms() const { return sharp_; }

    // Tail value at (t, r); exactly 0 outside the open cone t > r >= 0.
    double tail(double t, double r) const;

  private:
    int d_;
    double mass_;
    std::vector<ShellTerm> sharp_;
    double tail_c_ = 0;  // odd-d massless coefficient of (t^2-r^2)^{-(d-2)/2}
};

// Tail value of the retarded kernel; the sharp part is available through
// GreensKernel::sharp_terms().
double greens_retarded(int dim, double mass, double t, double r);

// Time-integrated retarded kernel times source_coupling(d) for a unit charge:
// 1/((d-3) r^{d-3}) for d >= 4, -ln(r/r0) for d = 3, e^{-m r}/r for massive 4D.
double static_potential(int dim, double mass, double r);

// Compactly supported source profile; profile(t) must return exactly 0
// outside [t_start, t_end].
struct SourcePulse {
    std::function<double(double)> profile;
    double t_start = 0;
    double t_end = 1;
    double total = 0;  // integral of the profile (optional, for asymptotics)
};

// Smooth bump proportional to exp(-1/(x(1-x))) on (t0, t1), normalized to
// unit time integral; identically zero outside.
SourcePulse bump_pulse(double t0, double t1);

// Retarded field of the pulse at radius r and time t:
// sharp-shell sampling of the profile plus adaptive quadrature of the tail.
double convolve_pulse(const GreensKernel& kernel, const SourcePulse& pulse,
                      double t, double r, double tol = 1e-10);

// CSV grid (t, r, tail) for plotting.
void tabulate_kernel(int dim, double mass, const std::vector<double>& ts,
                     const std::vector<double>& rs, const std::string& path);

}  // namespace sf
