#include "sf/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "sf/constants.hpp"

namespace sf {

static QuadNodes compute_gauss_legendre(int n) {
    QuadNodes q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            const double dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
        }
        const double dp = n * (x * p0 - p1) / (x * x - 1.0);
        q.x[i] = x;
        q.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

const QuadNodes& gauss_legendre(int n) {
    static std::map<int, QuadNodes> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a,
                       double b, int n) {
    const QuadNodes& q = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += q.w[i] * f(mid + half * q.x[i]);
    return s * half;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double err = left + right - whole;
    if (std::abs(err) < 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0)
        throw AccuracyError("adaptive_simpson: depth exhausted", std::abs(err));
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double oscillatory_integral(const std::function<double(double)>& f, double a,
                            double block, int max_blocks, double tol,
                            int gauss_order) {
    // Partial sums over consecutive blocks, then iterated Aitken on the tail.
    std::vector<double> partial;
    partial.reserve(max_blocks);
    double sum = 0;
    double prev_accel = std::nan("");
    const int window = 12;
    for (int k = 0; k < max_blocks; ++k) {
        sum += gauss_integrate(f, a + k * block, a + (k + 1) * block, gauss_order);
        partial.push_back(sum);
        if (static_cast<int>(partial.size()) < window) continue;
        std::vector<double> s(partial.end() - window, partial.end());
        while (s.size() >= 3) {
            std::vector<double> t;
            for (size_t i = 0; i + 2 < s.size(); ++i) {
                const double d1 = s[i + 2] - s[i + 1];
                const double d2 = d1 - (s[i + 1] - s[i]);
                t.push_back(std::abs(d2) > 1e-300 ? s[i + 2] - d1 * d1 / d2
                                                  : s[i + 2]);
            }
            s = std::move(t);
        }
        const double accel = s.back();
        if (!std::isnan(prev_accel) && std::abs(accel - prev_accel) < tol)
            return accel;
        prev_accel = accel;
    }
    throw AccuracyError("oscillatory_integral: no convergence", 0.0);
}

std::pair<double, double> line_fit(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 3) throw InvalidInput("CubicSpline: need at least 3 samples");
    for (int i = 1; i < n; ++i)
        if (x_[i] <= x_[i - 1])
            throw InvalidInput("CubicSpline: abscissae must increase");
    // Tridiagonal solve for natural boundary conditions.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        sub[i] = h0;
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (int i = 2; i < n - 1; ++i) {
        const double f = sub[i] / diag[i - 1];
        diag[i] -= f * (x_[i] - x_[i - 1]);
        rhs[i] -= f * rhs[i - 1];
    }
    for (int i = n - 2; i >= 1; --i)
        m_[i] = (rhs[i] - (x_[i + 1] - x_[i]) * m_[i + 1]) / diag[i];
}

int CubicSpline::interval(double t) const {
    if (t < x_.front() || t > x_.back())
        throw OutOfDomain("CubicSpline: abscissa outside sampled range");
    int lo = 0, hi = static_cast<int>(x_.size()) - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (x_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
}

double CubicSpline::value(double t) const {
    const int i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double t) const {
    const int i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h -
           (3.0 * a * a - 1.0) / 6.0 * h * m_[i] +
           (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
}

double CubicSpline::deriv2(double t) const {
    const int i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

}  // namespace sf
