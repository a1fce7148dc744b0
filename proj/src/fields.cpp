#include "sf/fields.hpp"

#include <cmath>

#include "sf/constants.hpp"

namespace sf {

namespace {

// p wedge q on contravariant components
Mat wedge(const Vec& p, const Vec& q) {
    Mat w(p.d);
    for (int i = 0; i < p.d; ++i)
        for (int j = 0; j < p.d; ++j) w(i, j) = p[i] * q[j] - p[j] * q[i];
    return w;
}

}  // namespace

FieldTensor field_from_eb(const Vec& e_field, const Vec& b_field) {
    FieldTensor f(4);
    for (int i = 0; i < 3; ++i) {
        f.F(i + 1, 0) = e_field[i];
        f.F(0, i + 1) = -e_field[i];
    }
    f.F(1, 2) = -b_field[2];
    f.F(2, 1) = b_field[2];
    f.F(2, 3) = -b_field[0];
    f.F(3, 2) = b_field[0];
    f.F(3, 1) = -b_field[1];
    f.F(1, 3) = b_field[1];
    return f;
}

Vec electric_field(const FieldTensor& f) {
    Vec e(f.d - 1);
    for (int i = 1; i < f.d; ++i) e[i - 1] = f.F(i, 0);
    return e;
}

Vec magnetic_field_3(const FieldTensor& f) {
    if (f.d != 4) throw InvalidInput("magnetic_field_3: 4D only");
    Vec b(3);
    b[0] = -f.F(2, 3);
    b[1] = -f.F(3, 1);
    b[2] = -f.F(1, 2);
    return b;
}

Mat mixed_from_contravariant(const Mat& f_upper, int d) {
    Mat m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = f_upper(i, j) * metric_sign(j);
    return m;
}

FieldTensor transform(const FieldTensor& f, const LorentzTransform& lt) {
    if (lt.d != f.d) throw InvalidInput("transform: dimension mismatch");
    FieldTensor out(f.d);
    out.F = lt.matrix * f.F * transpose(lt.matrix);
    return out;
}

StressEnergy stress_energy(const FieldTensor& f) {
    const int d = f.d;
    const double coupling = source_coupling(d);
    double f2 = 0;  // F_{ab} F^{ab}
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            f2 += metric_sign(a) * metric_sign(b) * f.F(a, b) * f.F(a, b);

    StressEnergy t;
    t.d = d;
    t.T = Mat(d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
            double s = 0;
            for (int a = 0; a < d; ++a)
                s -= f.F(mu, a) * f.F(nu, a) * metric_sign(a);
            if (mu == nu) s += 0.25 * metric_sign(mu) * f2;
            t.T(mu, nu) = s / coupling;
        }
    return t;
}

ElectromagneticPotential lw_potential_4d(const Worldline& w, double e, const Vec& x) {
    RetardedPoint rp = retarded_time(w, x);
    ElectromagneticPotential pot;
    pot.d = w.dim();
    pot.A = (e / rp.rho) * rp.state.u;
    return pot;
}

namespace {

LwField lw_field_from_point(const RetardedPoint& rp, double e, int d) {
    const Vec& k = rp.k;
    const Vec& u = rp.state.u;
    const Vec& a = rp.state.a;
    const double rho = rp.rho;
    const double ka = dot(k, a);

    LwField out;
    out.at = rp;
    out.velocity = FieldTensor(d);
    out.acceleration = FieldTensor(d);
    out.velocity.F = (e / (rho * rho * rho)) * wedge(k, u);
    out.acceleration.F = (e / (rho * rho)) * wedge(k, a) -
                         (e * ka / (rho * rho * rho)) * wedge(k, u);
    return out;
}

}  // namespace

LwField lw_field_4d_split(const Worldline& w, double e, const Vec& x) {
    return lw_field_from_point(retarded_time(w, x), e, w.dim());
}

FieldTensor lw_field_4d(const Worldline& w, double e, const Vec& x) {
    return lw_field_4d_split(w, e, x).total();
}

FieldTensor lw_field_4d_advanced(const Worldline& w, double e, const Vec& x) {
    return lw_field_from_point(advanced_time(w, x), e, w.dim()).total();
}

ElectromagneticPotential lw_potential_6d(const Worldline& w, double e, const Vec& x) {
    if (w.dim() != 6) throw InvalidInput("lw_potential_6d: dim 6 worldline required");
    RetardedPoint rp = retarded_time(w, x);
    const double rho = rp.rho;
    const double ka = dot(rp.k, rp.state.a);
    ElectromagneticPotential pot;
    pot.d = 6;
    pot.A = (e / 3.0) * ((1.0 / (rho * rho)) * rp.state.a +
                         ((1.0 - ka) / (rho * rho * rho)) * rp.state.u);
    return pot;
}

FieldTensor lw_field_6d(const Worldline& w, double e, const Vec& x, double h) {
    const int d = 6;
    RetardedPoint rp = retarded_time(w, x);
    const double step = h * std::max(1.0, std::abs(rp.rho));

    // dA[alpha][nu] = d_alpha A^nu, Richardson-extrapolated central difference
    auto grad_at = [&](double hh) {
        Mat g(d);
        for (int alpha = 0; alpha < d; ++alpha) {
            Vec xp = x, xm = x;
            xp[alpha] += hh;
            xm[alpha] -= hh;
            Vec ap = lw_potential_6d(w, e, xp).A;
            Vec am = lw_potential_6d(w, e, xm).A;
            for (int nu = 0; nu < d; ++nu) g(alpha, nu) = (ap[nu] - am[nu]) / (2 * hh);
        }
        return g;
    };
    Mat g1 = grad_at(step), g2 = grad_at(0.5 * step);
    Mat dA(d);
    for (int i = 0; i < d * d; ++i) dA.m[i] = (4.0 * g2.m[i] - g1.m[i]) / 3.0;

    FieldTensor f(d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
            f.F(mu, nu) = metric_sign(mu) * dA(mu, nu) - metric_sign(nu) * dA(nu, mu);
    return f;
}

FieldTensor lw_field_2plus1(const Worldline& w, double e, const Vec& x,
                            const PastIntegralOptions& opt) {
    if (w.dim() != 3) throw InvalidInput("lw_field_2plus1: dim 3 worldline required");
    const int d = 3;
    RetardedPoint rp = retarded_time(w, x);
    const double tau_ret = rp.tau;

    // h(tau) = K^a/(K.u) + (1 - K.a) K^u/(K.u)^2, integrated against 1/sqrt(S)
    auto integrand = [&](double tau) {
        WorldlineState s = w.eval(tau);
        Vec k = x - s.z;
        const double ku = dot(k, s.u);
        const double ka = dot(k, s.a);
        Mat h = (1.0 / ku) * wedge(k, s.a) +
                ((1.0 - ka) / (ku * ku)) * wedge(k, s.u);
        const double sqrt_s = std::sqrt(dot(k, k));
        h *= 1.0 / sqrt_s;
        return h;
    };

    Mat total(d);
    const QuadNodes& q = gauss_legendre(opt.gauss_order);

    // Near panel: tau = tau_ret - sigma^2 removes the endpoint 1/sqrt.
    {
        const double smax = std::sqrt(opt.near_width);
        for (int i = 0; i < opt.gauss_order; ++i) {
            const double sigma = 0.5 * smax * (q.x[i] + 1.0);
            const double wgt = 0.5 * smax * q.w[i] * 2.0 * sigma;
            if (sigma == 0.0) continue;
            Mat h = integrand(tau_ret - sigma * sigma);
            h *= wgt;
            total += h;
        }
    }
    // Geometric panels out to the far region.
    double lo = opt.near_width;
    const double ratio = std::pow(opt.far_start / opt.near_width,
                                  1.0 / std::max(1, opt.mid_panels));
    for (int p = 0; p < opt.mid_panels; ++p) {
        const double hi = lo * ratio;
        for (int i = 0; i < opt.gauss_order; ++i) {
            const double delta = 0.5 * (lo + hi) + 0.5 * (hi - lo) * q.x[i];
            Mat h = integrand(tau_ret - delta);
            h *= 0.5 * (hi - lo) * q.w[i];
            total += h;
        }
        lo = hi;
    }
    // Mapped infinite panel: delta = far_start / (1 - t), t in [0,1).
    for (int i = 0; i < opt.gauss_order; ++i) {
        const double t = 0.5 * (q.x[i] + 1.0);
        if (t >= 1.0) continue;
        const double delta = opt.far_start / (1.0 - t);
        const double jac = opt.far_start / ((1.0 - t) * (1.0 - t));
        Mat h = integrand(tau_ret - delta);
        h *= 0.5 * q.w[i] * jac;
        total += h;
    }

    FieldTensor f(d);
    f.F = total;
    f.F *= e;
    return f;
}

double scalar_lw_potential_4d(const Worldline& w, double g, const Vec& x) {
    RetardedPoint rp = retarded_time(w, x);
    return g / rp.rho;
}

Vec scalar_lw_gradient_4d(const Worldline& w, double g, const Vec& x,
                          bool radiative_only) {
    RetardedPoint rp = retarded_time(w, x);
    const double rho = rp.rho;
    const double ka = dot(rp.k, rp.state.a);
    if (radiative_only) return (-g * ka / (rho * rho * rho)) * rp.k;
    return (-g / (rho * rho)) *
           (rp.state.u + ((ka - 1.0) / rho) * rp.k);
}

StressEnergy scalar_stress_energy(const Vec& grad, int d) {
    const double coupling = source_coupling(d);
    const double g2 = dot(grad, grad);
    StressEnergy t;
    t.d = d;
    t.T = Mat(d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
            double s = grad[mu] * grad[nu];
            if (mu == nu) s -= 0.5 * metric_sign(mu) * g2;
            t.T(mu, nu) = s / coupling;
        }
    return t;
}

std::pair<double, double> invariants(const FieldTensor& f) {
    if (f.d != 4) throw InvalidInput("invariants: 4D only");
    double i1 = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            i1 += metric_sign(a) * metric_sign(b) * f.F(a, b) * f.F(a, b);
    Vec e = electric_field(f), b = magnetic_field_3(f);
    const double i2 = -4.0 * edot(e, b);
    return {i1, i2};
}

FieldEigensystem field_eigensystem(const FieldTensor& f) {
    if (f.d != 4) throw InvalidInput("field_eigensystem: 4D only");
    auto [i1, i2] = invariants(f);
    const double p = -0.5 * i1;   // E^2 - B^2
    const double qq = -0.25 * i2; // E.B
    const double disc = std::sqrt(p * p + 4.0 * qq * qq);

    FieldEigensystem out;
    out.lambda = std::sqrt(std::max(0.0, 0.5 * (disc + p)));
    out.mu = std::sqrt(std::max(0.0, 0.5 * (disc - p)));

    const double scale = max_abs(f.F);
    if (disc <= 1e-12 * scale * scale) {
        out.degenerate = scale > 0;
        return out;
    }

    // F^2 (mixed) has eigenvalues {lambda^2, lambda^2, -mu^2, -mu^2}; the
    // invariant planes are its eigenspaces.
    Mat fm = mixed_from_contravariant(f.F, 4);
    Mat f2 = fm * fm;
    const double s1 = out.lambda * out.lambda;
    const double s2 = -out.mu * out.mu;
    Mat id = Mat::identity(4);
    out.timelike_projector = (1.0 / (s1 - s2)) * (f2 - s2 * id);
    out.spacelike_projector = (1.0 / (s2 - s1)) * (f2 - s1 * id);
    return out;
}

namespace {

class ConstantFieldWorldline : public Worldline {
  public:
    ConstantFieldWorldline(Mat m_mixed, Vec u0, Vec z0)
        : d_(u0.d), m_(std::move(m_mixed)), u0_(std::move(u0)), z0_(std::move(z0)) {}
    int dim() const override { return d_; }

    WorldlineState eval(double tau) const override {
        // exp(tau [[M, u0],[0,0]]) = [[exp(tau M), Int exp(s M) ds u0],[0,1]]
        Mat aug(d_ + 1);
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) aug(i, j) = tau * m_(i, j);
            aug(i, d_) = tau * u0_[i];
        }
        Mat ex = expm(aug);
        WorldlineState s;
        s.z = Vec(d_);
        s.u = Vec(d_);
        for (int i = 0; i < d_; ++i) {
            s.z[i] = z0_[i] + ex(i, d_);
            double ui = 0;
            for (int j = 0; j < d_; ++j) ui += ex(i, j) * u0_[j];
            s.u[i] = ui;
        }
        s.a = m_ * s.u;
        s.jerk = m_ * s.a;
        return s;
    }

    Vec derivative(double tau, int order) const override {
        WorldlineState s = eval(tau);
        if (order == 0) return s.z;
        Vec v = s.u;
        for (int k = 1; k < order; ++k) v = m_ * v;
        return v;
    }

  private:
    int d_;
    Mat m_;
    Vec u0_, z0_;
};

}  // namespace

WorldlinePtr constant_field_motion(const FieldTensor& f, const Charge& q,
                                   const Vec& u0, const Vec& z0) {
    if (q.m <= 0) throw InvalidInput("constant_field_motion: mass must be > 0");
    if (std::abs(dot(u0, u0) - 1.0) > 1e-10)
        throw InvalidInput("constant_field_motion: u0 must be normalized");
    Mat m = mixed_from_contravariant(f.F, f.d);
    m *= q.e / q.m;
    return std::make_shared<ConstantFieldWorldline>(std::move(m), u0, z0);
}

FieldMap uniform_field_map(const FieldTensor& f) {
    return [f](const Vec&) { return f; };
}

}  // namespace sf
