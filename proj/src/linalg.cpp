#include "sf/linalg.hpp"

#include <algorithm>

namespace sf {

Vec solve(Mat a, Vec b) {
    const int n = a.d;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300)
            throw std::runtime_error("solve: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

double determinant(Mat a) {
    const int n = a.d;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            det = -det;
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

Mat expm(const Mat& a) {
    const int n = a.d;
    // Scale so the norm is below 0.5, apply Pade(6,6), square back.
    const double norm = mat_inf_norm(a);
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        squarings = std::min(squarings, 60);
    }
    Mat as = a;
    as *= std::pow(0.5, squarings);

    // Pade(6,6): N = sum c_k A^k, D = sum (-1)^k c_k A^k.
    static const double c[7] = {1.0,         1.0 / 2.0,   5.0 / 44.0,
                                1.0 / 66.0,  1.0 / 792.0, 1.0 / 15840.0,
                                1.0 / 665280.0};
    Mat power = Mat::identity(n);
    Mat num(n), den(n);
    for (int k = 0; k <= 6; ++k) {
        if (k > 0) power = power * as;
        Mat term = power;
        term *= c[k];
        num += term;
        if (k % 2 == 0)
            den += term;
        else
            den -= term;
    }
    // R = D^{-1} N, column by column.
    Mat r(n);
    for (int j = 0; j < n; ++j) {
        Vec col(n);
        for (int i = 0; i < n; ++i) col[i] = num(i, j);
        Vec x = solve(den, col);
        for (int i = 0; i < n; ++i) r(i, j) = x[i];
    }
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

}  // namespace sf
