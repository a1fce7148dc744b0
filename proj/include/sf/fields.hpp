#pragma once

#include "sf/worldline.hpp"

// Lienard-Wiechert potentials and fields (4D exact, 6D potential with a
// finite-difference field, 2+1 tail field), field-tensor algebra, exact
// motion in constant fields, and stress-energy tensors.

namespace sf {

struct Charge {
    double e = 1.0;  // electric charge (Gaussian)
    double m = 1.0;  // rest mass, > 0
};

struct ElectromagneticPotential {
    int d = 4;
    Vec A;
};

// Antisymmetric field strength, stored contravariant: F^{mu nu}.
// 4D: E^i = F^{i0}, F^{ij} = -eps^{ijk} B^k.
// 3D (2+1): E^i = F^{i0} (two components), scalar B = -F^{12}.
struct FieldTensor {
    int d = 4;
    Mat F;

    FieldTensor() : F(4) {}
    explicit FieldTensor(int dim) : d(dim), F(dim) {}

    double antisymmetry_defect() const {
        double m = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j)
                m = std::max(m, std::abs(F(i, j) + F(j, i)));
        return m;
    }
};

FieldTensor field_from_eb(const Vec& e_field, const Vec& b_field);  // 4D
Vec electric_field(const FieldTensor& f);   // d-1 components
Vec magnetic_field_3(const FieldTensor& f); // 4D only, 3 components

// Mixed tensor F^mu_nu = F^{mu alpha} eta_{alpha nu}.
Mat mixed_from_contravariant(const Mat& f_upper, int d);

// Lambda F Lambda^T on the contravariant components.
FieldTensor transform(const FieldTensor& f, const LorentzTransform& lt);

struct StressEnergy {
    int d = 4;
    Mat T;  // contravariant T^{mu nu}

    double symmetry_defect() const {
        double m = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < i; ++j) m = std::max(m, std::abs(T(i, j) - T(j, i)));
        return m;
    }
    double trace() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += metric_sign(i) * T(i, i);
        return s;
    }
};

// T^{mu nu} = (-F^{mu a} F^{nu}_{ a} + eta^{mu nu} F.F / 4) / coupling(d);
// T^00 = (E^2+B^2)/8pi and T^{0i} = (E x B)^i / 4pi in 4D.
StressEnergy stress_energy(const FieldTensor& f);

// --- Lienard-Wiechert, 4D ---------------------------------------------------

// A^mu = e u^mu / rho at the retarded point, rho = (x - z).u.
ElectromagneticPotential lw_potential_4d(const Worldline& w, double e, const Vec& x);

struct LwField {
    FieldTensor velocity;      // ~ 1/rho^2 along outgoing null rays
    FieldTensor acceleration;  // ~ 1/rho (the radiation part)
    RetardedPoint at;

    FieldTensor total() const {
        FieldTensor f(velocity.d);
        f.F = velocity.F + acceleration.F;
        return f;
    }
};

LwField lw_field_4d_split(const Worldline& w, double e, const Vec& x);
FieldTensor lw_field_4d(const Worldline& w, double e, const Vec& x);
// Advanced-branch field; exposed for the time-inversion checks only.
FieldTensor lw_field_4d_advanced(const Worldline& w, double e, const Vec& x);

// --- Lienard-Wiechert, 6D ---------------------------------------------------

// A^mu = (e/3) [ a^mu / rho^2 + (1 - k.a) u^mu / rho^3 ]; the static limit
// reproduces static_potential(d=6) = e / (3 r^3).
ElectromagneticPotential lw_potential_6d(const Worldline& w, double e, const Vec& x);

// F = dA (curl) by Richardson-extrapolated central differences of the 6D
// potential; step h is relative to the retarded distance.
FieldTensor lw_field_6d(const Worldline& w, double e, const Vec& x, double h = 1e-4);

// --- Lienard-Wiechert, 2+1 (tail field) -------------------------------------

struct PastIntegralOptions {
    double near_width = 0.25;  // tau-width of the endpoint-substituted panel
    int gauss_order = 32;
    int mid_panels = 10;       // geometric panels out to the far region
    double far_start = 64.0;   // where the mapped infinite panel begins
};

// Retarded field of a point charge in 2+1: integral over the past worldline,
// F(x) = e * Int_{-inf}^{tau_ret} dtau [ K^a/(K.u)^2 + (1-K.a) K^u/(K.u)^3 ] / sqrt(S)
// with K = x - z(tau), S = K.K; wedge shorthands K^a = K wedge a etc.
// The integrable endpoint singularity is removed by the sqrt substitution.
FieldTensor lw_field_2plus1(const Worldline& w, double e, const Vec& x,
                            const PastIntegralOptions& opt = {});

// --- scalar Lienard-Wiechert (massless, 4D) ---------------------------------

// phi = g / rho; gradient at x, either the full gradient or only the 1/rho
// (radiative) part.
Vec scalar_lw_gradient_4d(const Worldline& w, double g, const Vec& x,
                          bool radiative_only = false);
double scalar_lw_potential_4d(const Worldline& w, double g, const Vec& x);

// T^{mu nu} = (d^mu phi d^nu phi - eta^{mu nu} (d phi)^2 / 2) / coupling(d)
StressEnergy scalar_stress_energy(const Vec& grad, int d);

// --- field-tensor algebra ----------------------------------------------------

// I1 = F_{mu nu} F^{mu nu} = 2 (B^2 - E^2); I2 = -4 E.B  (4D only).
std::pair<double, double> invariants(const FieldTensor& f);

struct FieldEigensystem {
    // eigenvalues of F^mu_nu come as +-lambda (real) and +-i mu (imaginary)
    double lambda = 0;
    double mu = 0;
    bool degenerate = false;  // null field: I1 = I2 = 0 with F != 0
    Mat timelike_projector;   // onto the invariant plane of the real pair
    Mat spacelike_projector;  // onto the invariant plane of the imaginary pair
};

FieldEigensystem field_eigensystem(const FieldTensor& f);

// Exact solution u(tau) = exp((e/m) F tau) u(0) in a constant field,
// returned as an analytic worldline (z via the augmented-matrix integral).
WorldlinePtr constant_field_motion(const FieldTensor& f, const Charge& q,
                                   const Vec& u0, const Vec& z0);

// Uniform external field as a field map.
using FieldMap = std::function<FieldTensor(const Vec& x)>;
FieldMap uniform_field_map(const FieldTensor& f);

}  // namespace sf
