#pragma once

#include <cmath>

// Unit conventions for the whole toolkit, fixed in one place:
//
//   * Gaussian units with c = 1.  The 4D self-force coefficient is 2e^2/3
//     and the static potential of a unit charge is 1/r.
//   * Metric signature (+,-,...,-), index 0 = time.
//   * In d spacetime dimensions the wave equation reads
//         box A^mu = source_coupling(d) * j^mu,
//     with source_coupling(4) = 4*pi.  The coupling is anchored so that the
//     static potential of a unit charge satisfies the Gauss law in d-1
//     space dimensions (flux of E through any enclosing sphere equals
//     source_coupling(d) * e).
//   * The stress-energy tensor carries the matching 1/source_coupling(d)
//     prefactor, so that T^00 = (E^2 + B^2)/(8*pi) in 4D.

namespace sf {

inline constexpr double kPi = 3.14159265358979323846;

// Surface area of the unit n-sphere S^n embedded in R^{n+1}.
inline double unit_sphere_area(int n) {
    // Omega_n = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

// Coupling between field and source in d spacetime dimensions (4*pi in 4D).
inline double source_coupling(int d) { return unit_sphere_area(d - 2); }

// IR reference radius for the logarithmic d=3 static potential.  Only
// potential differences are physical in 2+1; V(r) = -e ln(r / kLogPotentialR0).
inline constexpr double kLogPotentialR0 = 1.0;

// Renormalization scale of the 2+1 tail subtraction.  The near-coincidence
// divergence of the 2+1 self-field is proportional to the acceleration and is
// absorbed into the particle mass; the leftover finite part depends on one
// scale, isolated here.  Changing it is equivalent to shifting the
// renormalized mass by (e^2/2) * log-ratio.
inline constexpr double kTailRenormScale = 1.0;

inline constexpr const char* kUnitConventionLine = "Gaussian, c=1";

inline constexpr const char* kToolVersion = "selfforce 0.1.0";

}  // namespace sf
