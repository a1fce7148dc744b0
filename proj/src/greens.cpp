#include "sf/greens.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "sf/constants.hpp"
#include "sf/io.hpp"
#include "sf/numerics.hpp"

namespace sf {

double ShellTerm::coefficient(double r) const {
    return amp * std::pow(r, -rpow);
}

GreensKernel::GreensKernel(int dim, double mass) : d_(dim), mass_(mass) {
    if (dim < 3) throw InvalidInput("GreensKernel: d >= 3 required");
    if (mass < 0) throw InvalidInput("GreensKernel: mass >= 0 required");
    if (mass > 0 && dim != 4)
        throw InvalidInput("GreensKernel: massive kernel implemented for d = 4");

    if (dim % 2 == 0) {
        // Build the light-cone part from G_4 = delta(t-r)/(4 pi r) with the
        // dimensional recursion G_{d+2} = -(1/(2 pi r)) d/dr G_d.
        sharp_ = {ShellTerm{0, 1.0 / (4.0 * kPi), 1}};
        for (int dd = 4; dd < dim; dd += 2) {
            std::map<std::pair<int, int>, double> next;
            for (const ShellTerm& s : sharp_) {
                // -(1/2 pi r) * d/dr [amp r^-k delta^(n)] =
                //   amp k/(2 pi) r^{-k-2} delta^(n) + amp/(2 pi) r^{-k-1} delta^(n+1)
                next[{s.order, s.rpow + 2}] += s.amp * s.rpow / (2.0 * kPi);
                next[{s.order + 1, s.rpow + 1}] += s.amp / (2.0 * kPi);
            }
            sharp_.clear();
            for (const auto& [key, amp] : next)
                sharp_.push_back(ShellTerm{key.first, amp, key.second});
        }
    } else {
        // Odd d massless tail: C_d (t^2 - r^2)^{-(d-2)/2},
        // C_3 = 1/(2 pi), C_{d+2} = -(d-2) C_d / (2 pi).
        tail_c_ = 1.0 / (2.0 * kPi);
        for (int dd = 3; dd < dim; dd += 2) tail_c_ *= -(dd - 2) / (2.0 * kPi);
    }
}

double GreensKernel::tail(double t, double r) const {
    if (r < 0) throw InvalidInput("GreensKernel::tail: r >= 0 required");
    if (t <= r) return 0.0;  // causal and retarded: zero outside the open cone
    if (d_ % 2 == 1) {
        const double s2 = t * t - r * r;
        return tail_c_ * std::pow(s2, -0.5 * (d_ - 2));
    }
    if (mass_ > 0) {
        // - (m / 4 pi) J_1(m s) / s inside the cone (d = 4)
        const double s = std::sqrt(t * t - r * r);
        const double x = mass_ * s;
        const double j1_over_s =
            x < 1e-8 ? 0.5 * mass_ : std::cyl_bessel_j(1, x) / s;
        return -(mass_ / (4.0 * kPi)) * j1_over_s;
    }
    return 0.0;
}

double greens_retarded(int dim, double mass, double t, double r) {
    return GreensKernel(dim, mass).tail(t, r);
}

double static_potential(int dim, double mass, double r) {
    if (r <= 0) throw Singularity("static_potential: r > 0 required");
    if (dim < 3) throw InvalidInput("static_potential: d >= 3 required");
    if (mass > 0) {
        if (dim != 4)
            throw InvalidInput("static_potential: massive case implemented for d = 4");
        return std::exp(-mass * r) / r;
    }
    if (dim == 3) return -std::log(r / kLogPotentialR0);
    return 1.0 / ((dim - 3) * std::pow(r, dim - 3));
}

SourcePulse bump_pulse(double t0, double t1) {
    if (t1 <= t0) throw InvalidInput("bump_pulse: t1 > t0 required");
    const double width = t1 - t0;
    // integral of exp(-1/(x(1-x))) on (0,1)
    static const double norm = [] {
        return adaptive_simpson(
            [](double x) {
                if (x <= 0 || x >= 1) return 0.0;
                return std::exp(-1.0 / (x * (1.0 - x)));
            },
            0.0, 1.0, 1e-14);
    }();
    SourcePulse p;
    p.t_start = t0;
    p.t_end = t1;
    p.total = 1.0;
    p.profile = [t0, width](double t) {
        const double x = (t - t0) / width;
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::exp(-1.0 / (x * (1.0 - x))) / (norm * width);
    };
    return p;
}

namespace {

// n-th derivative of the profile by central differences (n <= 2 used by the
// shipped kernels up to d = 6).
double profile_derivative(const SourcePulse& p, double t, int order) {
    if (order == 0) return p.profile(t);
    const double h = 1e-5 * (p.t_end - p.t_start);
    if (order == 1)
        return (p.profile(t + h) - p.profile(t - h)) / (2 * h);
    if (order == 2)
        return (p.profile(t + h) - 2 * p.profile(t) + p.profile(t - h)) / (h * h);
    throw InvalidInput("convolve_pulse: shell derivative order > 2 unsupported");
}

}  // namespace

double convolve_pulse(const GreensKernel& kernel, const SourcePulse& pulse,
                      double t, double r, double tol) {
    if (r <= 0) throw InvalidInput("convolve_pulse: r > 0 required");
    double value = 0;

    for (const ShellTerm& s : kernel.sharp_terms())
        value += s.coefficient(r) * profile_derivative(pulse, t - r, s.order);

    if (kernel.has_tail()) {
        // field += Int q(t') tail(t - t', r) dt' over the region t - t' > r.
        if (kernel.dim() == 3 && kernel.mass() == 0) {
            // substitute u = sqrt((t-t')^2 - r^2): the 1/sqrt cone singularity
            // disappears and the integrand becomes q(t - sqrt(u^2+r^2)) / sqrt(u^2+r^2).
            const double reach = t - pulse.t_start;
            if (reach <= r) return value;
            const double u_hi = std::sqrt(reach * reach - r * r);
            const double past = t - pulse.t_end;
            const double u_lo =
                past > r ? std::sqrt(past * past - r * r) : 0.0;
            auto f = [&](double u) {
                const double root = std::sqrt(u * u + r * r);
                return pulse.profile(t - root) / root;
            };
            value += adaptive_simpson(f, u_lo, u_hi, tol) / (2.0 * kPi);
        } else {
            // massive 4D tail: smooth inside the cone, integrate directly.
            const double hi = std::min(pulse.t_end, t - r);
            if (hi > pulse.t_start) {
                auto f = [&](double tp) {
                    return pulse.profile(tp) * kernel.tail(t - tp, r);
                };
                value += adaptive_simpson(f, pulse.t_start, hi, tol);
            }
        }
    }
    return value;
}

void tabulate_kernel(int dim, double mass, const std::vector<double>& ts,
                     const std::vector<double>& rs, const std::string& path) {
    GreensKernel kernel(dim, mass);
    CsvWriter csv(path, {"t", "r", "tail_value"});
    for (double t : ts)
        for (double r : rs) csv.row({t, r, kernel.tail(t, r)});
}

}  // namespace sf
