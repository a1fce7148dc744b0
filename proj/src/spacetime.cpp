#include "sf/spacetime.hpp"

#include <cmath>

namespace sf {

LorentzTransform LorentzTransform::inverse() const {
    // Lambda^{-1} = eta Lambda^T eta
    Mat eta = minkowski_metric(d);
    LorentzTransform inv;
    inv.d = d;
    inv.matrix = eta * transpose(matrix) * eta;
    return inv;
}

double LorentzTransform::metric_defect() const {
    Mat eta = minkowski_metric(d);
    Mat defect = transpose(matrix) * eta * matrix - eta;
    return max_abs(defect);
}

LorentzTransform boost(const Vec& direction, double rapidity) {
    const int d = direction.d + 1;
    if (d < 3 || d > kMaxDim) throw InvalidInput("boost: unsupported dimension");
    const double norm = enorm(direction);
    if (std::abs(norm - 1.0) > 1e-12)
        throw InvalidInput("boost: direction must be a unit spatial vector");

    const double ch = std::cosh(rapidity);
    const double sh = std::sinh(rapidity);
    LorentzTransform lt;
    lt.d = d;
    lt.matrix = Mat::identity(d);
    lt.matrix(0, 0) = ch;
    for (int i = 1; i < d; ++i) {
        const double ni = direction[i - 1];
        lt.matrix(0, i) = sh * ni;
        lt.matrix(i, 0) = sh * ni;
        for (int j = 1; j < d; ++j)
            lt.matrix(i, j) += (ch - 1.0) * ni * direction[j - 1];
    }
    return lt;
}

LorentzTransform rotation(int d, int axis_a, int axis_b, double angle) {
    if (axis_a < 1 || axis_b < 1 || axis_a >= d || axis_b >= d || axis_a == axis_b)
        throw InvalidInput("rotation: axes must be distinct spatial indices");
    LorentzTransform lt;
    lt.d = d;
    lt.matrix = Mat::identity(d);
    const double c = std::cos(angle), s = std::sin(angle);
    lt.matrix(axis_a, axis_a) = c;
    lt.matrix(axis_b, axis_b) = c;
    lt.matrix(axis_a, axis_b) = -s;
    lt.matrix(axis_b, axis_a) = s;
    return lt;
}

}  // namespace sf
