#include "sf/ode.hpp"

#include <algorithm>
#include <cmath>

namespace sf {

void DenseOutput::eval(double t, std::vector<double>& y) const {
    segment(t).eval(t, y);
}

void DenseOutput::eval_derivative(double t, std::vector<double>& dy) const {
    segment(t).eval_derivative(t, dy);
}

const DenseStep& DenseOutput::segment(double t) const {
    if (steps_.empty()) throw OutOfDomain("DenseOutput: empty");
    if (t <= steps_.front().t0) return steps_.front();
    if (t >= steps_.back().t0) return steps_.back();
    size_t lo = 0, hi = steps_.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        (steps_[mid].t0 <= t ? lo : hi) = mid;
    }
    return steps_[lo];
}

namespace dopri5 {
// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// e_i = b5_i - b4_i (error estimator)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;
}  // namespace dopri5

OdeDiagnostics integrate_ode(const OdeRhs& f, std::vector<double> y0,
                             double t0, double t1, const OdeOptions& opt,
                             DenseOutput* out, std::vector<double>* y_final) {
    using namespace dopri5;
    const size_t n = y0.size();
    OdeDiagnostics diag;
    std::vector<double> y = std::move(y0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n);

    double t = t0;
    double h = opt.adaptive ? std::min(opt.initial_step, opt.max_step)
                            : opt.max_step;
    f(t, y, k1);

    auto finite = [&](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };

    while (t < t1) {
        if (diag.n_steps + diag.n_rejected > opt.max_steps) {
            // step-control failure: return the partial trajectory
            diag.truncated = true;
            diag.t_reached = t;
            if (y_final) *y_final = y;
            return diag;
        }
        h = std::min(h, t1 - t);

        auto stage = [&](std::vector<double>& dst, double ci,
                         std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
            for (size_t i = 0; i < n; ++i) {
                double acc = y[i];
                for (const auto& [kvec, aij] : terms) acc += h * aij * (*kvec)[i];
                ytmp[i] = acc;
            }
            f(t + ci * h, ytmp, dst);
        };

        stage(k2, c2, {{&k1, a21}});
        stage(k3, c3, {{&k1, a31}, {&k2, a32}});
        stage(k4, c4, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
        stage(k5, c5, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
        stage(k6, 1.0, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
        for (size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
        f(t + h, ynew, k7);

        // scaled error norm
        double err = 0;
        for (size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);

        if (!finite(ynew)) {
            if (!opt.adaptive || h < 1e-14 * std::max(1.0, std::abs(t))) {
                diag.truncated = true;
                diag.t_reached = t;
                if (y_final) *y_final = y;
                return diag;
            }
            h *= 0.25;
            ++diag.n_rejected;
            continue;
        }

        if (opt.adaptive && err > 1.0) {
            ++diag.n_rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-15 * std::max(1.0, std::abs(t))) {
                diag.truncated = true;
                diag.t_reached = t;
                if (y_final) *y_final = y;
                return diag;
            }
            continue;
        }

        // accepted: dense coefficients
        DenseStep ds;
        ds.t0 = t;
        ds.h = h;
        ds.r1.resize(n);
        ds.r2.resize(n);
        ds.r3.resize(n);
        ds.r4.resize(n);
        ds.r5.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            ds.r1[i] = y[i];
            ds.r2[i] = ydiff;
            ds.r3[i] = bspl;
            ds.r4[i] = ydiff - h * k7[i] - bspl;
            ds.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                            d6 * k6[i] + d7 * k7[i]);
        }

        t += h;
        y = ynew;
        if (opt.project) {
            const double drift = opt.project(t, y);
            diag.max_projection_drift = std::max(diag.max_projection_drift, drift);
        }
        ++diag.n_steps;
        if (out) out->append(ds);
        if (opt.on_step) opt.on_step(ds);

        // FSAL would reuse k7; recompute to keep the projected state consistent.
        f(t, y, k1);
        if (opt.adaptive) {
            const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
            h = std::min(h, opt.max_step);
        }
    }
    diag.t_reached = t;
    if (y_final) *y_final = y;
    return diag;
}

}  // namespace sf
