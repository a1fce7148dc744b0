#pragma once

#include "sf/errors.hpp"
#include "sf/linalg.hpp"

// Flat-spacetime tensor algebra in arbitrary dimension d >= 3, signature
// (+,-,...,-), index 0 = time.  All operations are pure; values are immutable
// after construction and safe to share across threads.

namespace sf {

inline double metric_sign(int mu) { return mu == 0 ? 1.0 : -1.0; }

inline Mat minkowski_metric(int d) {
    Mat eta(d);
    for (int i = 0; i < d; ++i) eta(i, i) = metric_sign(i);
    return eta;
}

// u^mu eta_{mu nu} v^nu = u0 v0 - sum_i ui vi
inline double dot(const Vec& u, const Vec& v) {
    if (u.d != v.d) throw InvalidInput("minkowski_dot: dimension mismatch");
    double s = u[0] * v[0];
    for (int i = 1; i < u.d; ++i) s -= u[i] * v[i];
    return s;
}

// Flip the variance of a vector: spatial components change sign.  Involution.
inline Vec raise_lower(Vec v) {
    for (int i = 1; i < v.d; ++i) v[i] = -v[i];
    return v;
}

// Spatial part of a four-vector as a (d-1)-vector.
inline Vec spatial(const Vec& v) {
    Vec r(v.d - 1);
    for (int i = 1; i < v.d; ++i) r[i - 1] = v[i];
    return r;
}

struct LorentzTransform {
    int d = 4;
    Mat matrix;

    Vec apply(const Vec& v) const {
        if (v.d != d) throw InvalidInput("LorentzTransform: dimension mismatch");
        return matrix * v;
    }
    LorentzTransform inverse() const;

    // max |Lambda^T eta Lambda - eta| entry; zero for an exact transform.
    double metric_defect() const;
};

// Pure boost along a unit spatial direction with given rapidity.
// boost(n, 0) = identity; an x-boost maps (1,0,...) -> (cosh chi, sinh chi, 0...).
LorentzTransform boost(const Vec& direction, double rapidity);

// Spatial rotation in the plane of two spatial axes (1-based spatial indexing
// not used: axes are full spacetime indices >= 1).
LorentzTransform rotation(int d, int axis_a, int axis_b, double angle);

}  // namespace sf
