#include "sf/balance.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "json.hpp"
#include "sf/constants.hpp"
#include "sf/numerics.hpp"

namespace sf {

namespace {

// Unit vector on S^{n-1} in n space dimensions; angles[0..n-3] polar in
// [0,pi], angles[n-2] azimuth in [0,2pi).
Vec hyperspherical(int n, const std::vector<double>& angles) {
    Vec s(n);
    double prod = 1.0;
    for (int i = 0; i < n - 1; ++i) {
        s[i] = prod * std::cos(angles[i]);
        prod *= std::sin(angles[i]);
    }
    s[n - 1] = prod;
    return s;
}

Vec hyperspherical_partial(int n, const std::vector<double>& angles, int j) {
    // s_i = (prod_{k<i} sin a_k) cos a_i for i < n-1; s_{n-1} = prod sin a_k.
    Vec ds(n);
    for (int i = 0; i < n; ++i) {
        const int nsin = (i < n - 1) ? i : n - 1;
        const bool has_cos = i < n - 1;
        if (j >= nsin + (has_cos ? 1 : 0)) continue;  // angle j absent
        double v = 1.0;
        for (int k = 0; k < nsin; ++k)
            v *= (k == j) ? std::cos(angles[k]) : std::sin(angles[k]);
        if (has_cos) v *= (i == j) ? -std::sin(angles[i]) : std::cos(angles[i]);
        ds[i] = v;
    }
    return ds;
}

// Spacelike orthonormal frame orthogonal to u (Minkowski Gram-Schmidt of the
// lab spatial axes).
std::vector<Vec> spatial_frame(const Vec& u) {
    const int d = u.d;
    std::vector<Vec> frame;
    for (int k = 1; k < d && static_cast<int>(frame.size()) < d - 1; ++k) {
        Vec v(d);
        v[k] = 1.0;
        v -= dot(v, u) * u;
        for (const Vec& e : frame) v += dot(v, e) * e;
        const double n2 = -dot(v, v);
        if (n2 < 1e-20) continue;
        frame.push_back((1.0 / std::sqrt(n2)) * v);
    }
    if (static_cast<int>(frame.size()) != d - 1)
        throw InvalidInput("spatial_frame: degenerate frame");
    return frame;
}

// Covariant surface element of d-1 ordered tangent vectors (cofactor dual).
// The sign is fixed once by the chart orientation (tau/t first, then polar
// angles, azimuth last), which makes the element outward for small tube
// radii; it is NOT re-oriented per node, because past the retarded-chart
// caustic (R ~ 1/|a|) the signed Jacobian legitimately changes sign and the
// flux identity needs those contributions with their analytic sign.
Vec surface_element(const std::vector<Vec>& tangents) {
    const int d = tangents[0].d;
    Vec dual(d);
    Mat minor(d - 1);
    for (int mu = 0; mu < d; ++mu) {
        for (int r = 0; r < d - 1; ++r) {
            int cc = 0;
            for (int c = 0; c < d; ++c) {
                if (c == mu) continue;
                minor(r, cc++) = tangents[r][c];
            }
        }
        dual[mu] = ((mu % 2 == 0) ? -1.0 : 1.0) * determinant(minor);
    }
    return dual;
}

struct AngularGrid {
    std::vector<std::vector<double>> angles;  // node angle tuples
    std::vector<double> weights;              // chart weights (no sin factors)
};

AngularGrid angular_grid(int dim, int polar_order, int azimuth_order) {
    const int n = dim - 1;          // space dimensions
    const int n_polar = n - 2;      // number of polar angles
    AngularGrid g;
    std::vector<std::vector<double>> polar_nodes(n_polar), polar_w(n_polar);
    const QuadNodes& gl = gauss_legendre(polar_order);
    for (int k = 0; k < n_polar; ++k) {
        for (int i = 0; i < polar_order; ++i) {
            polar_nodes[k].push_back(0.5 * kPi * (gl.x[i] + 1.0));
            polar_w[k].push_back(0.5 * kPi * gl.w[i]);
        }
    }
    // trapezoid in azimuth (periodic: equal weights)
    std::vector<double> az_nodes, az_w;
    for (int i = 0; i < azimuth_order; ++i) {
        az_nodes.push_back(2.0 * kPi * i / azimuth_order);
        az_w.push_back(2.0 * kPi / azimuth_order);
    }
    // cartesian product
    std::vector<int> idx(n_polar, 0);
    while (true) {
        for (int a = 0; a < azimuth_order; ++a) {
            std::vector<double> tuple;
            double w = az_w[a];
            for (int k = 0; k < n_polar; ++k) {
                tuple.push_back(polar_nodes[k][idx[k]]);
                w *= polar_w[k][idx[k]];
            }
            tuple.push_back(az_nodes[a]);
            g.angles.push_back(tuple);
            g.weights.push_back(w);
        }
        int k = n_polar - 1;
        for (; k >= 0; --k) {
            if (++idx[k] < polar_order) break;
            idx[k] = 0;
        }
        if (k < 0) break;
        if (n_polar == 0) break;
    }
    if (n_polar == 0 && g.angles.empty()) {
        for (int a = 0; a < azimuth_order; ++a) {
            g.angles.push_back({az_nodes[a]});
            g.weights.push_back(az_w[a]);
        }
    }
    return g;
}

struct FluxAccumulator {
    Vec p;
    Mat m;
    explicit FluxAccumulator(int d) : p(d), m(d) {}
    void add(const Vec& x, const Mat& t, const Vec& dsigma, double w) {
        const int d = x.d;
        for (int mu = 0; mu < d; ++mu) {
            double flux_mu = 0;
            for (int nu = 0; nu < d; ++nu) flux_mu += t(mu, nu) * dsigma[nu];
            p[mu] += w * flux_mu;
        }
        for (int mu = 0; mu < d; ++mu)
            for (int nu = 0; nu < mu; ++nu) {
                double s = 0;
                for (int l = 0; l < d; ++l)
                    s += (x[mu] * t(nu, l) - x[nu] * t(mu, l)) * dsigma[l];
                m(mu, nu) += w * s;
                m(nu, mu) -= w * s;
            }
    }
    void merge(const FluxAccumulator& o) {
        p += o.p;
        m += o.m;
    }
};

// Deterministic ordered parallel reduction over tau-panel indices.
template <typename Fn>
FluxAccumulator reduce_panels(int dim, int n_panels, int threads, Fn&& panel_fn) {
    FluxAccumulator total(dim);
    if (threads <= 1) {
        for (int p = 0; p < n_panels; ++p) total.merge(panel_fn(p));
        return total;
    }
    std::vector<std::future<FluxAccumulator>> futs;
    for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&, t] {
            FluxAccumulator acc(dim);
            for (int p = t; p < n_panels; p += threads) acc.merge(panel_fn(p));
            return acc;
        }));
    for (auto& f : futs) total.merge(f.get());
    return total;
}

FluxResult tube_flux_at_order(const Worldline& w, double radius, double tau0,
                              double tau1, const StressProvider& stress,
                              int dim, const SurfaceQuadrature& q) {
    AngularGrid grid = angular_grid(dim, q.polar_order, q.azimuth_order);
    const QuadNodes& gl = gauss_legendre(q.tau_order);
    const double panel_len = (tau1 - tau0) / q.tau_panels;
    const int n_space = dim - 1;

    auto surface_point = [&](double tau, const std::vector<double>& ang) {
        WorldlineState s = w.eval(tau);
        std::vector<Vec> frame = spatial_frame(s.u);
        Vec sdir = hyperspherical(n_space, ang);
        Vec m(dim);
        for (int i = 0; i < n_space; ++i) m += sdir[i] * frame[i];
        Vec n = s.u + m;
        return std::pair<Vec, Vec>(s.z + radius * n, n);
    };

    auto panel_fn = [&](int p) {
        FluxAccumulator acc(dim);
        const double a = tau0 + p * panel_len;
        for (int it = 0; it < q.tau_order; ++it) {
            const double tau = a + 0.5 * panel_len * (gl.x[it] + 1.0);
            const double wt = 0.5 * panel_len * gl.w[it];
            WorldlineState s = w.eval(tau);
            std::vector<Vec> frame = spatial_frame(s.u);
            for (size_t ia = 0; ia < grid.angles.size(); ++ia) {
                const auto& ang = grid.angles[ia];
                Vec sdir = hyperspherical(n_space, ang);
                Vec m(dim);
                for (int i = 0; i < n_space; ++i) m += sdir[i] * frame[i];
                Vec n = s.u + m;
                Vec x = s.z + radius * n;

                std::vector<Vec> tangents;
                // tau tangent: Richardson-extrapolated central difference
                const double h = 1e-4;
                Vec d1 = (1.0 / (2 * h)) * (surface_point(tau + h, ang).first -
                                            surface_point(tau - h, ang).first);
                Vec d2 = (1.0 / h) * (surface_point(tau + h / 2, ang).first -
                                      surface_point(tau - h / 2, ang).first);
                tangents.push_back((1.0 / 3.0) * (4.0 * d2 - d1));
                // angle tangents: analytic via the frame
                for (size_t j = 0; j < ang.size(); ++j) {
                    Vec ds = hyperspherical_partial(n_space, ang, static_cast<int>(j));
                    Vec tj(dim);
                    for (int i = 0; i < n_space; ++i) tj += ds[i] * frame[i];
                    tangents.push_back(radius * tj);
                }
                Vec dsigma = surface_element(tangents);
                acc.add(x, stress(x), dsigma, wt * grid.weights[ia]);
            }
        }
        return acc;
    };

    FluxAccumulator total = reduce_panels(dim, q.tau_panels, q.threads, panel_fn);
    FluxResult r;
    r.momentum = total.p;
    r.angular = total.m;
    return r;
}

}  // namespace

FluxResult flux_through_retarded_tube(const Worldline& w, double radius,
                                      double tau0, double tau1,
                                      const StressProvider& stress, int dim,
                                      const SurfaceQuadrature& q) {
    FluxResult full = tube_flux_at_order(w, radius, tau0, tau1, stress, dim, q);
    SurfaceQuadrature half = q;
    half.polar_order = std::max(2, q.polar_order / 2);
    half.azimuth_order = std::max(4, q.azimuth_order / 2);
    half.tau_order = std::max(2, q.tau_order / 2);
    FluxResult coarse = tube_flux_at_order(w, radius, tau0, tau1, stress, dim, half);
    full.error_estimate = max_abs(full.momentum - coarse.momentum);
    return full;
}

FluxResult flux_through_static_sphere(const Vec& center_spatial, double radius,
                                      double t0, double t1,
                                      const StressProvider& stress, int dim,
                                      const SurfaceQuadrature& q) {
    AngularGrid grid = angular_grid(dim, q.polar_order, q.azimuth_order);
    const QuadNodes& gl = gauss_legendre(q.tau_order);
    const double panel_len = (t1 - t0) / q.tau_panels;
    const int n_space = dim - 1;

    auto panel_fn = [&](int p) {
        FluxAccumulator acc(dim);
        const double a = t0 + p * panel_len;
        for (int it = 0; it < q.tau_order; ++it) {
            const double t = a + 0.5 * panel_len * (gl.x[it] + 1.0);
            const double wt = 0.5 * panel_len * gl.w[it];
            for (size_t ia = 0; ia < grid.angles.size(); ++ia) {
                const auto& ang = grid.angles[ia];
                Vec sdir = hyperspherical(n_space, ang);
                Vec x(dim);
                x[0] = t;
                for (int i = 0; i < n_space; ++i)
                    x[i + 1] = center_spatial[i] + radius * sdir[i];

                std::vector<Vec> tangents;
                Vec tt(dim);
                tt[0] = 1.0;
                tangents.push_back(tt);
                for (size_t j = 0; j < ang.size(); ++j) {
                    Vec ds = hyperspherical_partial(n_space, ang, static_cast<int>(j));
                    Vec tj(dim);
                    for (int i = 0; i < n_space; ++i) tj[i + 1] = radius * ds[i];
                    tangents.push_back(tj);
                }
                Vec dsigma = surface_element(tangents);
                acc.add(x, stress(x), dsigma, wt * grid.weights[ia]);
            }
        }
        return acc;
    };

    FluxAccumulator total = reduce_panels(dim, q.tau_panels, q.threads, panel_fn);
    FluxResult r;
    r.momentum = total.p;
    r.angular = total.m;
    return r;
}

Vec field_momentum_in_annulus(const Vec& center_spatial, double r_in,
                              double r_out, double t,
                              const StressProvider& stress, int dim,
                              const SurfaceQuadrature& q) {
    AngularGrid grid = angular_grid(dim, q.polar_order, q.azimuth_order);
    const QuadNodes& gl = gauss_legendre(q.tau_order);
    const int n_space = dim - 1;
    // angular chart measure on S^{n-1}: prod_k sin^{n-2-k}(alpha_k)
    auto measure = [&](const std::vector<double>& ang) {
        double m = 1.0;
        for (size_t k = 0; k + 1 < ang.size(); ++k)
            m *= std::pow(std::sin(ang[k]), n_space - 2 - static_cast<int>(k));
        return m;
    };

    Vec p(dim);
    const double panel_len = (r_out - r_in) / q.tau_panels;
    for (int pn = 0; pn < q.tau_panels; ++pn) {
        const double a = r_in + pn * panel_len;
        for (int ir = 0; ir < q.tau_order; ++ir) {
            const double r = a + 0.5 * panel_len * (gl.x[ir] + 1.0);
            const double wr = 0.5 * panel_len * gl.w[ir] * std::pow(r, n_space - 1);
            for (size_t ia = 0; ia < grid.angles.size(); ++ia) {
                Vec sdir = hyperspherical(n_space, grid.angles[ia]);
                Vec x(dim);
                x[0] = t;
                for (int i = 0; i < n_space; ++i)
                    x[i + 1] = center_spatial[i] + r * sdir[i];
                Mat tt = stress(x);
                const double w = wr * grid.weights[ia] * measure(grid.angles[ia]);
                for (int mu = 0; mu < dim; ++mu) p[mu] += w * tt(mu, 0);
            }
        }
    }
    return p;
}

// --- stress providers --------------------------------------------------------

StressProvider em_stress_provider(WorldlinePtr w, double e, FieldPart part,
                                  bool advanced) {
    return [w, e, part, advanced](const Vec& x) {
        FieldTensor f(w->dim());
        if (advanced) {
            f = lw_field_4d_advanced(*w, e, x);
        } else {
            LwField split = lw_field_4d_split(*w, e, x);
            switch (part) {
                case FieldPart::Full: f = split.total(); break;
                case FieldPart::Radiative: f = split.acceleration; break;
                case FieldPart::Velocity: f = split.velocity; break;
            }
        }
        return stress_energy(f).T;
    };
}

StressProvider em_stress_provider_6d(WorldlinePtr w, double e) {
    return [w, e](const Vec& x) { return stress_energy(lw_field_6d(*w, e, x)).T; };
}

StressProvider em_stress_provider_2plus1(WorldlinePtr w, double e,
                                         const PastIntegralOptions& opt) {
    return [w, e, opt](const Vec& x) {
        return stress_energy(lw_field_2plus1(*w, e, x, opt)).T;
    };
}

StressProvider scalar_stress_provider(WorldlinePtr w, double g, FieldPart part) {
    return [w, g, part](const Vec& x) {
        Vec grad = scalar_lw_gradient_4d(*w, g, x, part == FieldPart::Radiative);
        if (part == FieldPart::Velocity) {
            Vec full = scalar_lw_gradient_4d(*w, g, x, false);
            Vec rad = scalar_lw_gradient_4d(*w, g, x, true);
            grad = full - rad;
        }
        return scalar_stress_energy(grad, w->dim()).T;
    };
}

// --- high-level operations --------------------------------------------------

FluxResult flux_energy_momentum(const Worldline& w, const Charge& q,
                                double radius, double tau0, double tau1,
                                int dim, FieldPart part,
                                const SurfaceQuadrature& quad) {
    WorldlinePtr wp(&w, [](const Worldline*) {});  // non-owning alias
    StressProvider sp;
    if (dim == 4)
        sp = em_stress_provider(wp, q.e, part);
    else if (dim == 6)
        sp = em_stress_provider_6d(wp, q.e);
    else if (dim == 3)
        sp = em_stress_provider_2plus1(wp, q.e);
    else
        throw InvalidInput("flux_energy_momentum: dim must be 3, 4 or 6");
    return flux_through_retarded_tube(w, radius, tau0, tau1, sp, dim, quad);
}

Mat flux_angular_momentum(const Worldline& w, const Charge& q, double radius,
                          double tau0, double tau1, int dim, FieldPart part,
                          const SurfaceQuadrature& quad) {
    return flux_energy_momentum(w, q, radius, tau0, tau1, dim, part, quad).angular;
}

FluxResult flux_energy_momentum(const Worldline& w, const Charge& q,
                                const FluxSurface& surface, int dim,
                                FieldPart part) {
    if (surface.kind == FluxSurface::Kind::RetardedSphere)
        return flux_energy_momentum(w, q, surface.radius, surface.t0, surface.t1,
                                    dim, part, surface.quad);

    WorldlinePtr alias(&w, [](const Worldline*) {});
    StressProvider sp;
    if (dim == 4)
        sp = em_stress_provider(alias, q.e, part);
    else if (dim == 6)
        sp = em_stress_provider_6d(alias, q.e);
    else if (dim == 3)
        sp = em_stress_provider_2plus1(alias, q.e);
    else
        throw InvalidInput("flux_energy_momentum: dim must be 3, 4 or 6");

    Vec center = surface.center_spatial.d == dim - 1 ? surface.center_spatial
                                                     : Vec(dim - 1);
    if (surface.kind == FluxSurface::Kind::Sphere)
        return flux_through_static_sphere(center, surface.radius, surface.t0,
                                          surface.t1, sp, dim, surface.quad);

    // TimeSlab: momentum content change of the annulus between the two times
    FluxResult r;
    Vec p1 = field_momentum_in_annulus(center, surface.r_inner, surface.radius,
                                       surface.t1, sp, dim, surface.quad);
    Vec p0 = field_momentum_in_annulus(center, surface.r_inner, surface.radius,
                                       surface.t0, sp, dim, surface.quad);
    r.momentum = p1 - p0;
    r.angular = Mat(dim);
    return r;
}

BoundRadiativeSplit split_bound_radiative(const Worldline& w, const Charge& q,
                                          double radius, double tau0,
                                          double tau1,
                                          const SurfaceQuadrature& quad) {
    FluxResult full =
        flux_energy_momentum(w, q, radius, tau0, tau1, 4, FieldPart::Full, quad);
    FluxResult rad = flux_energy_momentum(w, q, radius, tau0, tau1, 4,
                                          FieldPart::Radiative, quad);
    BoundRadiativeSplit s;
    s.radiative = rad.momentum;
    s.bound = full.momentum - rad.momentum;
    return s;
}

std::string BalanceReport::to_json() const {
    nlohmann::json j;
    auto vec_to_json = [](const Vec& v) {
        std::vector<double> out(v.c.begin(), v.c.begin() + v.d);
        return out;
    };
    j["dP_particle"] = vec_to_json(dP_particle);
    j["P_flux"] = vec_to_json(P_flux);
    j["W"] = vec_to_json(W);
    j["residual"] = vec_to_json(residual);
    std::vector<std::vector<double>> m;
    for (int i = 0; i < M_flux.d; ++i) {
        std::vector<double> row;
        for (int k = 0; k < M_flux.d; ++k) row.push_back(M_flux(i, k));
        m.push_back(row);
    }
    j["M_flux"] = m;
    j["rel_residual"] = rel_residual;
    return j.dump(2);
}

BalanceReport work_energy_ledger(const DenseTrajectory& traj, const Charge& q,
                                 const FieldMap& external,
                                 const LedgerOptions& opt) {
    const int d = traj.dim();
    const double tau0 = traj.tau_start(), tau1 = traj.tau_data_end();

    // external four-work along the trajectory
    Vec w_ext(d);
    const int n_panels = 256;
    const QuadNodes& gl = gauss_legendre(8);
    for (int p = 0; p < n_panels; ++p) {
        const double a = tau0 + (tau1 - tau0) * p / n_panels;
        const double b = tau0 + (tau1 - tau0) * (p + 1) / n_panels;
        for (size_t i = 0; i < gl.x.size(); ++i) {
            const double tau = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            WorldlineState s = traj.eval(tau);
            Vec f = q.e * (mixed_from_contravariant(external(s.z).F, d) * s.u);
            w_ext += (0.5 * (b - a) * gl.w[i]) * f;
        }
    }

    Vec dp = q.m * (traj.eval(tau1).u - traj.eval(tau0).u);

    StressProvider sp = opt.stress;
    if (!sp) {
        WorldlinePtr alias(&traj, [](const Worldline*) {});
        if (d == 4)
            sp = em_stress_provider(alias, q.e);
        else if (d == 3)
            sp = em_stress_provider_2plus1(alias, q.e);
        else
            throw InvalidInput("work_energy_ledger: no stress provider for dim");
    }
    FluxResult flux = flux_through_retarded_tube(traj, opt.radius, tau0, tau1,
                                                 sp, d, opt.quad);

    BalanceReport rep;
    rep.dP_particle = dp;
    rep.P_flux = flux.momentum;
    rep.W = w_ext;
    rep.residual = w_ext - dp - flux.momentum;
    rep.M_flux = flux.angular;
    double scale = 0;
    scale = std::max(scale, max_abs(w_ext));
    scale = std::max(scale, max_abs(dp));
    scale = std::max(scale, max_abs(flux.momentum));
    // an empty ledger (inertial motion) has nothing to compare against
    rep.rel_residual =
        scale > 1e-12 * q.m ? max_abs(rep.residual) / scale : 0.0;
    return rep;
}

}  // namespace sf
