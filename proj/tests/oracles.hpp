#pragma once

#include <cmath>
#include <vector>

#include "sf/constants.hpp"
#include "sf/numerics.hpp"

// Test-side oracles, independent of the implementation paths they check.

namespace sf::test {

// Abel-regularized oscillatory integral Int_0^inf f(k) dk: damp with
// exp(-eps k), integrate with per-oscillation Gauss blocks (no aliasing),
// extrapolate eps -> 0 with a Neville table (the damped integral is analytic
// in eps).  `block` should be at most a period of the fastest oscillation.
inline double abel_integral(const std::function<double(double)>& f,
                            double eps0, double block, int levels = 5) {
    std::vector<double> eps(levels), val(levels);
    for (int i = 0; i < levels; ++i) {
        const double e = eps0 / std::pow(2.0, i);
        const double k_max = 30.0 / e;
        double sum = 0;
        for (double lo = 0.0; lo < k_max; lo += block) {
            const double hi = std::min(lo + block, k_max);
            sum += gauss_integrate(
                [&](double k) { return std::exp(-e * k) * f(k); }, lo, hi, 16);
        }
        eps[i] = e;
        val[i] = sum;
    }
    // Neville extrapolation to eps = 0
    for (int m = 1; m < levels; ++m)
        for (int i = levels - 1; i >= m; --i)
            val[i] = val[i] + (val[i] - val[i - 1]) * eps[i] / (eps[i - m] - eps[i]);
    return val[levels - 1];
}

// Inverse-Fourier oracle for the d=3 retarded kernel:
// G(t,r) = (1/2pi) Int_0^inf J0(k r) sin(k t) dk
inline double oracle_tail_3d(double t, double r) {
    auto f = [=](double k) { return std::cyl_bessel_j(0, k * r) * std::sin(k * t); };
    // analyticity scale of the damped closed form is (t^2-r^2)/(2t)
    const double eps0 = std::min(0.4 / std::max(t, r),
                                 0.2 * (t * t - r * r) / t);
    return abel_integral(f, eps0, kPi / (t + r)) / (2.0 * kPi);
}

// Massive 4D tail oracle: subtracted inverse-Fourier radial integral
// tail(t,r) = (1/(2 pi^2 r)) Int_0^inf sin(k r) [k sin(w t)/w - sin(k t)] dk
inline double oracle_tail_massive(double m, double t, double r) {
    auto f = [=](double k) {
        const double w = std::sqrt(k * k + m * m);
        return std::sin(k * r) * (k * std::sin(w * t) / w - std::sin(k * t));
    };
    const double eps0 = std::min(0.4 / std::max(t, r),
                                 0.2 * (t * t - r * r) / t);
    return abel_integral(f, eps0, kPi / (t + r + m)) / (2.0 * kPi * kPi * r);
}

}  // namespace sf::test
