#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

// Small dense vector/matrix types with run-time dimension and fixed storage.
// Dimension is a run-time value so one code path serves d = 3, 4, 6 and the
// arbitrary-d Green's-function work; capacity is fixed to keep everything on
// the stack.

namespace sf {

inline constexpr int kMaxDim = 8;

struct Vec {
    int d = 0;
    std::array<double, kMaxDim> c{};

    Vec() = default;
    explicit Vec(int dim) : d(dim) { assert(dim >= 0 && dim <= kMaxDim); }
    Vec(std::initializer_list<double> xs) : d(static_cast<int>(xs.size())) {
        assert(d <= kMaxDim);
        int i = 0;
        for (double x : xs) c[i++] = x;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < d; ++i) c[i] *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) {
    for (int i = 0; i < a.d; ++i) a.c[i] = -a.c[i];
    return a;
}

inline Vec zero_vec(int d) { return Vec(d); }

// Euclidean helpers (used for spatial sub-vectors and error norms).
inline double edot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.d; ++i) s += a.c[i] * b.c[i];
    return s;
}
inline double enorm(const Vec& a) { return std::sqrt(edot(a, a)); }
inline double max_abs(const Vec& a) {
    double m = 0;
    for (int i = 0; i < a.d; ++i) m = std::max(m, std::abs(a.c[i]));
    return m;
}

struct Mat {
    int d = 0;
    std::array<double, kMaxDim * kMaxDim> m{};

    Mat() = default;
    explicit Mat(int dim) : d(dim) { assert(dim >= 0 && dim <= kMaxDim); }

    double& operator()(int i, int j) { return m[i * d + j]; }
    double operator()(int i, int j) const { return m[i * d + j]; }

    static Mat identity(int dim) {
        Mat r(dim);
        for (int i = 0; i < dim; ++i) r(i, i) = 1.0;
        return r;
    }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) m[i] += o.m[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) m[i] -= o.m[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < d * d; ++i) m[i] *= s;
        return *this;
    }
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(double s, Mat a) { return a *= s; }

inline Mat operator*(const Mat& a, const Mat& b) {
    Mat r(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int k = 0; k < a.d; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < a.d; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline Vec operator*(const Mat& a, const Vec& v) {
    Vec r(a.d);
    for (int i = 0; i < a.d; ++i) {
        double s = 0;
        for (int j = 0; j < a.d; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline Mat transpose(const Mat& a) {
    Mat r(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) r(j, i) = a(i, j);
    return r;
}

inline double max_abs(const Mat& a) {
    double m = 0;
    for (int i = 0; i < a.d * a.d; ++i) m = std::max(m, std::abs(a.m[i]));
    return m;
}

inline double mat_inf_norm(const Mat& a) {
    double n = 0;
    for (int i = 0; i < a.d; ++i) {
        double row = 0;
        for (int j = 0; j < a.d; ++j) row += std::abs(a(i, j));
        n = std::max(n, row);
    }
    return n;
}

// Gaussian elimination with partial pivoting; throws on singular input.
Vec solve(Mat a, Vec b);
double determinant(Mat a);

// Matrix exponential by scaling-and-squaring with a diagonal Pade(6,6)
// approximant; handles the mixed real/imaginary spectra of field tensors.
Mat expm(const Mat& a);

}  // namespace sf
