#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sf/errors.hpp"

namespace sf {

struct QuadNodes {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
const QuadNodes& gauss_legendre(int n);

// Integrate f on [a,b] with an n-point Gauss-Legendre rule.
double gauss_integrate(const std::function<double(double)>& f, double a,
                       double b, int n);

// Adaptive Simpson with absolute tolerance; throws AccuracyError when the
// recursion depth is exhausted before reaching tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

// Sum of an infinite oscillatory integral split into sign-alternating blocks:
// integrates f over [a, a+block), [a+block, a+2*block), ... and accelerates
// the sequence of partial sums with iterated Aitken extrapolation.
double oscillatory_integral(const std::function<double(double)>& f, double a,
                            double block, int max_blocks, double tol,
                            int gauss_order = 24);

// Least-squares straight-line fit; returns {slope, intercept}.
std::pair<double, double> line_fit(const std::vector<double>& x,
                                   const std::vector<double>& y);

// Natural cubic spline through (x_i, y_i), strictly increasing x.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double value(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;
    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

  private:
    int interval(double t) const;
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at nodes
};

}  // namespace sf
