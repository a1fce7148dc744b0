#include "sf/worldline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sf/constants.hpp"

namespace sf {

void Worldline::require_in_domain(double tau) const {
    if (tau < tau_min() || tau > tau_max())
        throw OutOfDomain("worldline: tau outside domain");
}

Vec Worldline::derivative(double tau, int order) const {
    switch (order) {
        case 0: return eval(tau).z;
        case 1: return eval(tau).u;
        case 2: return eval(tau).a;
        case 3: return eval(tau).jerk;
        default: break;
    }
    const double h = 1e-4;
    Vec fwd = derivative(tau + h, order - 1);
    Vec bwd = derivative(tau - h, order - 1);
    return (1.0 / (2.0 * h)) * (fwd - bwd);
}

namespace {

class RestWorldline : public Worldline {
  public:
    RestWorldline(int dim, const Vec& spatial_position) : d_(dim) {
        z0_ = Vec(dim);
        for (int i = 1; i < dim; ++i) z0_[i] = spatial_position[i - 1];
    }
    int dim() const override { return d_; }
    WorldlineState eval(double tau) const override {
        WorldlineState s{z0_, Vec(d_), Vec(d_), Vec(d_)};
        s.z[0] = tau;
        s.u[0] = 1.0;
        return s;
    }
    Vec derivative(double tau, int order) const override {
        if (order <= 3) return Worldline::derivative(tau, order);
        return Vec(d_);
    }

  private:
    int d_;
    Vec z0_;
};

class UniformWorldline : public Worldline {
  public:
    UniformWorldline(int dim, const Vec& v, const Vec& x0) : d_(dim) {
        double v2 = edot(v, v);
        if (v2 >= 1.0) throw InvalidInput("uniform worldline: |v| must be < 1");
        const double gamma = 1.0 / std::sqrt(1.0 - v2);
        u_ = Vec(dim);
        u_[0] = gamma;
        for (int i = 1; i < dim; ++i) u_[i] = gamma * v[i - 1];
        z0_ = Vec(dim);
        for (int i = 1; i < dim; ++i) z0_[i] = x0[i - 1];
    }
    int dim() const override { return d_; }
    WorldlineState eval(double tau) const override {
        return {z0_ + tau * u_, u_, Vec(d_), Vec(d_)};
    }
    Vec derivative(double tau, int order) const override {
        if (order <= 3) return Worldline::derivative(tau, order);
        return Vec(d_);
    }

  private:
    int d_;
    Vec u_, z0_;
};

class InertialWorldline : public Worldline {
  public:
    InertialWorldline(Vec z_anchor, Vec u, double tau_anchor)
        : d_(u.d), z0_(std::move(z_anchor)), u_(std::move(u)), tau0_(tau_anchor) {
        if (std::abs(dot(u_, u_) - 1.0) > 1e-10)
            throw InvalidInput("inertial worldline: u must be normalized");
    }
    int dim() const override { return d_; }
    WorldlineState eval(double tau) const override {
        return {z0_ + (tau - tau0_) * u_, u_, Vec(d_), Vec(d_)};
    }
    Vec derivative(double tau, int order) const override {
        if (order == 0) return eval(tau).z;
        if (order == 1) return u_;
        return Vec(d_);
    }

  private:
    int d_;
    Vec z0_, u_;
    double tau0_;
};

class HyperbolicWorldline : public Worldline {
  public:
    HyperbolicWorldline(int dim, double g, int axis) : d_(dim), g_(g), ax_(axis) {
        if (g <= 0) throw InvalidInput("hyperbolic worldline: g must be > 0");
        if (axis < 1 || axis >= dim) throw InvalidInput("hyperbolic worldline: bad axis");
    }
    int dim() const override { return d_; }
    WorldlineState eval(double tau) const override {
        return {derivative(tau, 0), derivative(tau, 1), derivative(tau, 2),
                derivative(tau, 3)};
    }
    // z0 = sinh(g tau)/g, z_ax = (cosh(g tau) - 1)/g; every derivative swaps
    // sinh <-> cosh and multiplies by g.
    Vec derivative(double tau, int order) const override {
        Vec r(d_);
        const double sh = std::sinh(g_ * tau), ch = std::cosh(g_ * tau);
        const double p = std::pow(g_, order - 1);
        if (order == 0) {
            r[0] = sh / g_;
            r[ax_] = (ch - 1.0) / g_;
        } else if (order % 2 == 1) {
            r[0] = p * ch;
            r[ax_] = p * sh;
        } else {
            r[0] = p * sh;
            r[ax_] = p * ch;
        }
        return r;
    }

  private:
    int d_;
    double g_;
    int ax_;
};

class CircularWorldline : public Worldline {
  public:
    CircularWorldline(int dim, double radius, double omega)
        : d_(dim), r_(radius), w_(omega) {
        const double v = std::abs(omega * radius);
        if (v >= 1.0) throw InvalidInput("circular worldline: omega*R must be < 1");
        gamma_ = 1.0 / std::sqrt(1.0 - v * v);
        cap_omega_ = omega * gamma_;  // proper-time angular frequency
    }
    int dim() const override { return d_; }
    WorldlineState eval(double tau) const override {
        return {derivative(tau, 0), derivative(tau, 1), derivative(tau, 2),
                derivative(tau, 3)};
    }
    Vec derivative(double tau, int order) const override {
        Vec r(d_);
        const double phase = cap_omega_ * tau + 0.5 * kPi * order;
        r[1] = r_ * std::pow(cap_omega_, order) * std::cos(phase);
        r[2] = r_ * std::pow(cap_omega_, order) * std::sin(phase);
        if (order == 0)
            r[0] = gamma_ * tau;
        else if (order == 1)
            r[0] = gamma_;
        return r;
    }

  private:
    int d_;
    double r_, w_, gamma_, cap_omega_;
};

class ReflectedWorldline : public Worldline {
  public:
    explicit ReflectedWorldline(WorldlinePtr w) : w_(std::move(w)) {}
    int dim() const override { return w_->dim(); }
    double tau_min() const override { return -w_->tau_max(); }
    double tau_max() const override { return -w_->tau_min(); }
    WorldlineState eval(double tau) const override {
        return {derivative(tau, 0), derivative(tau, 1), derivative(tau, 2),
                derivative(tau, 3)};
    }
    Vec derivative(double tau, int order) const override {
        Vec v = w_->derivative(-tau, order);
        // z~(tau) = T z(-tau), T = diag(-1, 1, ..., 1)
        v[0] = -v[0];
        if (order % 2 == 1) v = -v;
        return v;
    }

  private:
    WorldlinePtr w_;
};

}  // namespace

WorldlinePtr make_rest(int dim, const Vec& spatial_position) {
    return std::make_shared<RestWorldline>(dim, spatial_position);
}
WorldlinePtr make_uniform(int dim, const Vec& v, const Vec& x0) {
    return std::make_shared<UniformWorldline>(dim, v, x0);
}
WorldlinePtr make_inertial(const Vec& z_anchor, const Vec& u, double tau_anchor) {
    return std::make_shared<InertialWorldline>(z_anchor, u, tau_anchor);
}
WorldlinePtr make_hyperbolic(int dim, double g, int axis) {
    return std::make_shared<HyperbolicWorldline>(dim, g, axis);
}
WorldlinePtr make_circular(int dim, double radius, double omega) {
    return std::make_shared<CircularWorldline>(dim, radius, omega);
}
WorldlinePtr reflect(WorldlinePtr w) {
    return std::make_shared<ReflectedWorldline>(std::move(w));
}
Vec reflect_point(Vec x) {
    x[0] = -x[0];
    return x;
}

SplineWorldline::SplineWorldline(std::vector<double> taus, std::vector<Vec> positions) {
    if (taus.size() != positions.size() || taus.size() < 4)
        throw InvalidInput("SplineWorldline: need >= 4 samples");
    dim_ = positions.front().d;
    for (int mu = 0; mu < dim_; ++mu) {
        std::vector<double> comp(taus.size());
        for (size_t i = 0; i < taus.size(); ++i) comp[i] = positions[i][mu];
        splines_.emplace_back(taus, std::move(comp));
    }
    for (double t : taus) {
        WorldlineState raw = eval_raw(t);
        const double n2 = dot(raw.u, raw.u);
        if (n2 <= 0) throw InvalidInput("SplineWorldline: spacelike or null segment");
        max_renorm_ = std::max(max_renorm_, std::abs(std::sqrt(n2) - 1.0));
    }
}

WorldlineState SplineWorldline::eval_raw(double tau) const {
    WorldlineState s;
    s.z = Vec(dim_);
    s.u = Vec(dim_);
    s.a = Vec(dim_);
    s.jerk = Vec(dim_);
    for (int mu = 0; mu < dim_; ++mu) {
        s.z[mu] = splines_[mu].value(tau);
        s.u[mu] = splines_[mu].deriv(tau);
        s.a[mu] = splines_[mu].deriv2(tau);
    }
    return s;
}

WorldlineState SplineWorldline::eval(double tau) const {
    require_in_domain(tau);
    WorldlineState raw = eval_raw(tau);
    // u = u_raw / N with N = sqrt(u_raw.u_raw); then
    // a = (a_raw - (u.a_raw) u) / N is exactly orthogonal to u.
    const double n2 = dot(raw.u, raw.u);
    if (n2 <= 0) throw InvalidInput("SplineWorldline: spacelike or null segment");
    const double n = std::sqrt(n2);
    WorldlineState s;
    s.z = raw.z;
    s.u = (1.0 / n) * raw.u;
    s.a = (1.0 / n) * (raw.a - dot(s.u, raw.a) * s.u);
    // jerk by central difference of a (one-sided at the ends)
    const double h = std::min(1e-4, 0.25 * (tau_max() - tau_min()));
    const double lo = tau_min(), hi = tau_max();
    auto accel = [this, n](double t) {
        WorldlineState r = eval_raw(t);
        const double nn = std::sqrt(dot(r.u, r.u));
        Vec uu = (1.0 / nn) * r.u;
        return (1.0 / nn) * (r.a - dot(uu, r.a) * uu);
    };
    if (tau - h >= lo && tau + h <= hi)
        s.jerk = (1.0 / (2 * h)) * (accel(tau + h) - accel(tau - h));
    else if (tau + h <= hi)
        s.jerk = (1.0 / h) * (accel(tau + h) - s.a);
    else
        s.jerk = (1.0 / h) * (s.a - accel(tau - h));
    return s;
}

std::shared_ptr<const SplineWorldline> load_worldline_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_worldline_csv: cannot open " + path);
    std::string line;
    std::vector<double> taus;
    std::vector<Vec> pts;
    bool header_seen = false;
    int dim = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            if (cells.empty() || cells[0].find("tau") == std::string::npos)
                throw InvalidInput("load_worldline_csv: header row with tau,z0,... required");
            dim = static_cast<int>(cells.size()) - 1;
            if (dim < 3 || dim > kMaxDim)
                throw InvalidInput("load_worldline_csv: unsupported dimension");
            header_seen = true;
            continue;
        }
        if (static_cast<int>(cells.size()) != dim + 1)
            throw InvalidInput("load_worldline_csv: ragged row");
        taus.push_back(std::stod(cells[0]));
        Vec z(dim);
        for (int mu = 0; mu < dim; ++mu) z[mu] = std::stod(cells[mu + 1]);
        pts.push_back(z);
    }
    return std::make_shared<SplineWorldline>(std::move(taus), std::move(pts));
}

namespace {

enum class ConeBranch { Retarded, Advanced };

// Proper time at which z0(tau) = x0 (z0 is strictly increasing).
double coordinate_time_root(const Worldline& w, double x0, double tol = 1e-14) {
    const double lo_dom = w.tau_min(), hi_dom = w.tau_max();
    double a = 0.0;
    if (std::isfinite(lo_dom) && std::isfinite(hi_dom))
        a = 0.5 * (lo_dom + hi_dom);
    else if (std::isfinite(lo_dom))
        a = std::max(a, lo_dom);
    else if (std::isfinite(hi_dom))
        a = std::min(a, hi_dom);
    double step = 1.0;
    double ga = w.eval(a).z[0] - x0;
    double b = a, gb = ga;
    for (int it = 0; it < 200 && ga > 0; ++it) {
        b = a;
        a = std::max(a - step, lo_dom);
        step *= 2;
        ga = w.eval(a).z[0] - x0;
        if (a == lo_dom && ga > 0)
            throw NotFound("worldline starts after the requested coordinate time");
    }
    step = 1.0;
    for (int it = 0; it < 200 && gb < 0; ++it) {
        b = std::min(b + step, hi_dom);
        step *= 2;
        gb = w.eval(b).z[0] - x0;
        if (b == hi_dom && gb < 0)
            throw NotFound("worldline ends before the requested coordinate time");
    }
    if (ga > 0 || gb < 0)
        throw NotFound("coordinate_time_root: bracket expansion failed");
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = w.eval(m).z[0] - x0;
        (gm < 0 ? a : b) = m;
        if (b - a < tol * std::max(1.0, std::abs(m))) break;
    }
    return 0.5 * (a + b);
}

RetardedPoint cone_intersection(const Worldline& w, const Vec& x, ConeBranch branch) {
    if (x.d != w.dim()) throw InvalidInput("cone_intersection: dimension mismatch");
    const double scale2 = std::max(1.0, edot(x, x));

    const double tau_top = coordinate_time_root(w, x[0]);
    WorldlineState top = w.eval(tau_top);
    Vec sep = x - top.z;
    const double spatial_dist2 = -dot(sep, sep);  // = |x_s - z_s|^2 here
    if (spatial_dist2 < 1e-24 * scale2)
        throw Singularity("cone_intersection: field point on the worldline");

    auto f = [&](double tau) {
        Vec k = x - w.eval(tau).z;
        return dot(k, k);
    };

    // Expand a bracket away from tau_top (into the past for retarded, the
    // future for advanced); f < 0 at tau_top, f > 0 far along a timelike line.
    // The look-back is doubled in coordinate time, not proper time: for
    // asymptotically null worldlines a proper-time ladder overshoots to where
    // (x-z)^2 is pure cancellation noise.
    const double sign = branch == ConeBranch::Retarded ? -1.0 : 1.0;
    const double lo_dom = w.tau_min(), hi_dom = w.tau_max();
    double near = tau_top, f_near = f(near);
    double lookback = 0.5 * std::sqrt(spatial_dist2);
    if (lookback <= 0 || !std::isfinite(lookback)) lookback = 1.0;
    double far = near;
    bool bracketed = false;
    for (int it = 0; it < 200; ++it) {
        double cand;
        try {
            cand = coordinate_time_root(w, x[0] + sign * lookback, 1e-3);
        } catch (const NotFound&) {
            // ran out of the domain: check the domain wall itself
            cand = branch == ConeBranch::Retarded ? lo_dom : hi_dom;
            if (!std::isfinite(cand))
                throw NotFound("cone_intersection: bracket expansion failed");
        }
        cand = std::clamp(cand, lo_dom, hi_dom);
        const double fc = f(cand);
        if (fc > 0) {
            far = cand;
            bracketed = true;
            break;
        }
        near = cand;
        f_near = fc;
        far = cand;
        lookback *= 2;
        if (cand == lo_dom || cand == hi_dom)
            throw NotFound("cone_intersection: no intersection in worldline domain");
    }
    if (!bracketed) throw NotFound("cone_intersection: bracket expansion failed");

    // Certified sign change between near (f<0) and far (f>0): bisect.
    double a = near, b = far;
    for (int it = 0; it < 120; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
            a = b = m;
            break;
        }
        if ((fm < 0) == (f_near < 0))
            a = m;
        else
            b = m;
        if (std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(m))) break;
    }

    // Newton polish; f'(tau) = -2 u.(x - z)
    double tau = 0.5 * (a + b);
    for (int it = 0; it < 8; ++it) {
        WorldlineState s = w.eval(tau);
        Vec k = x - s.z;
        const double val = dot(k, k);
        const double deriv = -2.0 * dot(s.u, k);
        if (deriv == 0.0) break;
        double next = tau - val / deriv;
        next = std::clamp(next, std::min(a, b), std::max(a, b));
        if (next == tau) break;
        tau = next;
        if (std::abs(val) < 1e-14 * scale2) break;
    }

    RetardedPoint rp;
    rp.tau = tau;
    rp.state = w.eval(tau);
    rp.k = x - rp.state.z;
    rp.rho = dot(rp.k, rp.state.u);
    rp.residual = std::abs(dot(rp.k, rp.k));
    return rp;
}

}  // namespace

RetardedPoint retarded_time(const Worldline& w, const Vec& x) {
    return cone_intersection(w, x, ConeBranch::Retarded);
}

RetardedPoint advanced_time(const Worldline& w, const Vec& x) {
    return cone_intersection(w, x, ConeBranch::Advanced);
}

}  // namespace sf
