#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "sf/errors.hpp"

// Explicit adaptive Runge-Kutta, Dormand-Prince 5(4), with the standard
// 4th-order continuous extension.  Dense output is what makes the
// history-dependent (tail) forces integrable: every accepted step stores its
// interpolation polynomial.

namespace sf {

using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dydt)>;

struct DenseStep {
    double t0 = 0, h = 0;
    // contd5 coefficients per component
    std::vector<double> r1, r2, r3, r4, r5;

    void eval(double t, std::vector<double>& y) const {
        const double theta = (t - t0) / h;
        const double th1 = 1.0 - theta;
        const size_t n = r1.size();
        y.resize(n);
        for (size_t i = 0; i < n; ++i)
            y[i] = r1[i] +
                   theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
    }

    // dy/dt of the interpolant (one order less accurate than eval).
    void eval_derivative(double t, std::vector<double>& dy) const {
        const double th = (t - t0) / h;
        const size_t n = r1.size();
        dy.resize(n);
        for (size_t i = 0; i < n; ++i)
            dy[i] = (r2[i] + (1 - 2 * th) * r3[i] + th * (2 - 3 * th) * r4[i] +
                     2 * th * (1 - th) * (1 - 2 * th) * r5[i]) /
                    h;
    }
};

// Piecewise-polynomial trajectory record.  Evaluation outside the covered
// range extrapolates with the nearest segment (needed while a step is in
// flight); callers that must not extrapolate check covered() first.
class DenseOutput {
  public:
    void append(DenseStep s) { steps_.push_back(std::move(s)); }
    bool empty() const { return steps_.empty(); }
    double t_front() const { return steps_.front().t0; }
    double t_back() const { return steps_.back().t0 + steps_.back().h; }
    bool covered(double t) const {
        return !steps_.empty() && t >= t_front() && t <= t_back();
    }
    void eval(double t, std::vector<double>& y) const;
    void eval_derivative(double t, std::vector<double>& dy) const;
    const std::vector<DenseStep>& steps() const { return steps_; }

  private:
    const DenseStep& segment(double t) const;
    std::vector<DenseStep> steps_;
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 1e-3;
    bool adaptive = true;  // false: fixed step = max_step
    // Applied to y after each accepted step (e.g. velocity re-normalization);
    // returns a drift measure that is max-accumulated into the diagnostics.
    std::function<double(double t, std::vector<double>& y)> project;
    // Called after each accepted step with the dense segment just produced.
    std::function<void(const DenseStep&)> on_step;
    long max_steps = 2000000;
};

struct OdeDiagnostics {
    long n_steps = 0;
    long n_rejected = 0;
    double max_projection_drift = 0;
    bool truncated = false;  // stopped early (overflow guard)
    double t_reached = 0;
};

// Integrate y' = f(t,y) from t0 to t1 (t1 > t0).  Appends dense segments to
// `out` when non-null.  On step-control failure or loss of finiteness the
// result is truncated: diagnostics.truncated is set, integration ends at
// t_reached, and the dense output holds the partial trajectory (runaway
// studies rely on this).
OdeDiagnostics integrate_ode(const OdeRhs& f, std::vector<double> y0,
                             double t0, double t1, const OdeOptions& opt,
                             DenseOutput* out, std::vector<double>* y_final);

}  // namespace sf
