#include "sf/accept.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>

#include "sf/balance.hpp"
#include "sf/constants.hpp"
#include "sf/greens.hpp"
#include "sf/numerics.hpp"
#include "sf/selfforce.hpp"

// The acceptance suite: every criterion pinned here with its tolerance.
// One row per criterion; subconditions fold into `pass`.

namespace sf {

namespace {

using Clock = std::chrono::steady_clock;

struct Harness {
    std::vector<CheckResult> rows;
    int threads = 1;

    void run(const std::string& id, const std::string& name,
             const std::string& suite,
             const std::function<void(CheckResult&)>& body) {
        CheckResult r;
        r.id = id;
        r.name = name;
        r.suite = suite;
        const auto t0 = Clock::now();
        try {
            body(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.name += std::string(" [exception: ") + e.what() + "]";
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        rows.push_back(r);
    }
};

std::mt19937& acc_rng() {
    static std::mt19937 gen(0xacce97);
    return gen;
}
double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(acc_rng());
}
Vec rand_unit_spatial(int d) {
    Vec v(d - 1);
    double n = 0;
    do {
        for (int i = 0; i < d - 1; ++i) v[i] = uni(-1, 1);
        n = enorm(v);
    } while (n < 1e-3);
    return (1.0 / n) * v;
}

// --- criterion 1: Larmor balance --------------------------------------------

void ac1_larmor(CheckResult& r, int threads) {
    const Charge q{1.0, 1.0};
    const double amp = 0.001, omega = 10.0;  // A*omega = 0.01
    auto w = make_circular(4, amp, omega);
    WorldlineState s = w->eval(0.0);
    const double rate = larmor_rate(s.a, q);
    const double gamma = s.u[0];
    const double period = 2.0 * kPi / (omega * gamma);
    SurfaceQuadrature quad;
    quad.polar_order = 16;
    quad.azimuth_order = 24;
    quad.tau_order = 8;
    quad.tau_panels = 4;
    quad.threads = threads;
    FluxResult f = flux_energy_momentum(*w, q, 3.0, 0.0, period, 4,
                                        FieldPart::Full, quad);
    const double measured = f.momentum[0] / (period * gamma);
    r.expected = rate;
    r.got = measured;
    r.tol = 0.01;
    r.pass = std::abs(measured - rate) < r.tol * rate;
}

// --- criterion 2: 6D static scaling ------------------------------------------

void ac2_six_d_slope(CheckResult& r) {
    std::vector<double> lr, lv;
    for (double radius = 1.0; radius <= 100.0; radius *= 1.25) {
        lr.push_back(std::log(radius));
        lv.push_back(std::log(static_potential(6, 0.0, radius)));
    }
    auto [slope, icpt] = line_fit(lr, lv);
    (void)icpt;
    r.expected = -3.0;
    r.got = slope;
    r.tol = 0.01;
    r.pass = std::abs(slope + 3.0) < r.tol;
}

// --- criterion 3: retarded-time residual -------------------------------------

void ac3_retarded_residual(CheckResult& r) {
    std::vector<WorldlinePtr> lines = {
        make_rest(4, Vec{0.1, -0.2, 0.3}),
        make_uniform(4, Vec{0.4, -0.1, 0.2}, Vec{0.0, 0.0, 0.0}),
        make_hyperbolic(4, 0.8),
        make_circular(4, 1.2, 0.35),
    };
    double worst = 0;
    const int per_line = 2500;  // 10^4 pairs total
    for (const auto& w : lines) {
        for (int i = 0; i < per_line; ++i) {
            const double tau_star = uni(-4.0, 4.0);
            const double radius = uni(0.5, 10.0);
            Vec n = rand_unit_spatial(4);
            Vec k(4);
            k[0] = radius;
            for (int c = 1; c < 4; ++c) k[c] = radius * n[c - 1];
            Vec x = w->eval(tau_star).z + k;
            RetardedPoint rp = retarded_time(*w, x);
            worst = std::max(worst, rp.residual / std::max(1.0, edot(x, x)));
        }
    }
    r.expected = 0.0;
    r.got = worst;
    r.tol = 1e-12;
    r.pass = worst < r.tol;
}

// --- criterion 4: runaway control --------------------------------------------

void ac4_runaway(CheckResult& r) {
    const Charge q{1.0, 1.0};
    const double tau0 = runaway_timescale(q);
    FieldMap no_field = uniform_field_map(FieldTensor(4));
    Vec z0(4), u0{1, 0, 0, 0}, a0(4);
    a0[1] = 1e-6;
    auto raw =
        integrate_lorentz_dirac_raw(q, no_field, z0, u0, a0, 0.0, 10.0 * tau0);
    const double fitted = raw.efold_time.value_or(0.0);

    auto reduced = integrate_reduced_order(q, no_field, z0, u0, 0.0, 10.0 * tau0);
    double max_a = 0;
    for (double tau = 0; tau <= 10.0 * tau0; tau += tau0)
        max_a = std::max(max_a, max_abs(reduced.trajectory->eval(tau).a));

    r.expected = tau0;
    r.got = fitted;
    r.tol = 0.01;
    r.pass = std::abs(fitted - tau0) < r.tol * tau0 && max_a < 1e-12;
}

// --- criterion 5: hyperbolic identity ----------------------------------------

void ac5_hyperbolic(CheckResult& r, int threads) {
    const Charge q{1.0, 1.0};
    const double g = 0.02;  // keeps g*R below the chart caustic at R <= 40
    auto w = make_hyperbolic(4, g);

    double max_force = 0;
    for (double tau : {-3.0, -1.0, 0.0, 0.4, 2.0}) {
        WorldlineState s = w->eval(tau);
        max_force = std::max(max_force,
                             max_abs(lorentz_dirac_force(s.u, s.a, s.jerk, q)));
    }

    SurfaceQuadrature quad;
    quad.polar_order = 16;
    quad.azimuth_order = 24;
    quad.tau_order = 8;
    quad.tau_panels = 2;
    quad.threads = threads;
    const double win = 0.1;
    const double expect = 2.0 / 3.0 * q.e * q.e * g * g;
    bool flux_ok = true;
    std::vector<double> lr, lb;
    for (double radius : {10.0, 20.0, 40.0}) {
        BoundRadiativeSplit split =
            split_bound_radiative(*w, q, radius, -win / 2, win / 2, quad);
        const double rate = split.radiative[0] / win;
        flux_ok = flux_ok && std::abs(rate - expect) < 0.01 * expect;
        lr.push_back(std::log(radius));
        lb.push_back(std::log(std::abs(split.bound[1])));
    }
    auto [slope, icpt] = line_fit(lr, lb);
    (void)icpt;

    r.expected = expect;
    r.got = max_force;  // binding metric: the identity itself
    r.tol = 1e-10;
    r.pass = max_force < 1e-10 && flux_ok && std::abs(slope + 1.0) < 0.1;
}

// --- criterion 6: constant-field exact motion --------------------------------

void ac6_constant_field(CheckResult& r) {
    const double b0 = 0.9, v = 0.6;
    const Charge q{1.0, 1.3};
    FieldTensor f = field_from_eb(Vec(3), Vec{0.0, 0.0, b0});
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    Vec u0{gamma, gamma * v, 0.0, 0.0}, z0(4);
    auto w = constant_field_motion(f, q, u0, z0);

    const double tau_end = 10.0 * 2.0 * kPi * q.m / (q.e * b0);
    Mat fm = mixed_from_contravariant(f.F, 4);
    fm *= q.e / q.m;
    std::array<Vec, 2> y = {z0, u0};
    const int steps = 50000;
    const double h = tau_end / steps;
    auto deriv = [&](const std::array<Vec, 2>& s) {
        return std::array<Vec, 2>{s[1], fm * s[1]};
    };
    for (int i = 0; i < steps; ++i) {
        auto k1 = deriv(y);
        auto k2 = deriv({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        auto k3 = deriv({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        auto k4 = deriv({y[0] + h * k3[0], y[1] + h * k3[1]});
        y[0] += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    WorldlineState s = w->eval(tau_end);
    const double dev = std::max(max_abs(s.z - y[0]), max_abs(s.u - y[1]));
    r.expected = 0.0;
    r.got = dev;
    r.tol = 1e-8;
    r.pass = dev < r.tol;
}

// --- criterion 7: Green's function causality and dichotomy --------------------

// Independent inverse-Fourier oracle for the d=3 kernel: Abel-regularized
// radial frequency integral, per-oscillation Gauss blocks, Neville
// extrapolation of the damping to zero.
double oracle_tail_3d(double t, double radius) {
    auto f = [=](double k) {
        return std::cyl_bessel_j(0, k * radius) * std::sin(k * t);
    };
    const double eps0 = std::min(0.4 / std::max(t, radius),
                                 0.2 * (t * t - radius * radius) / t);
    const double block = kPi / (t + radius);
    const int levels = 5;
    std::vector<double> eps(levels), val(levels);
    for (int i = 0; i < levels; ++i) {
        const double e = eps0 / std::pow(2.0, i);
        const double k_max = 30.0 / e;
        double sum = 0;
        for (double lo = 0.0; lo < k_max; lo += block) {
            const double hi = std::min(lo + block, k_max);
            sum += gauss_integrate(
                [&](double k) { return std::exp(-e * k) * f(k); }, lo, hi, 16);
        }
        eps[i] = e;
        val[i] = sum;
    }
    for (int m = 1; m < levels; ++m)
        for (int i = levels - 1; i >= m; --i)
            val[i] = val[i] + (val[i] - val[i - 1]) * eps[i] / (eps[i - m] - eps[i]);
    return val[levels - 1] / (2.0 * kPi);
}

void ac7_greens(CheckResult& r) {
    // exact zero outside the cone at 10^4 random points
    bool causal = true;
    for (int i = 0; i < 10000; ++i) {
        const int d = 3 + i % 5;
        const double mass = (d == 4 && i % 9 == 0) ? uni(0.2, 2.0) : 0.0;
        const double radius = uni(0.0, 8.0);
        const double t = radius - uni(0.0, 8.0);
        if (greens_retarded(d, mass, t, radius) != 0.0) causal = false;
    }
    // dichotomy
    bool dichotomy = true;
    for (int d = 3; d <= 8; ++d) {
        GreensKernel k(d, 0.0);
        dichotomy = dichotomy && (k.has_sharp() == (d % 2 == 0)) &&
                    (k.has_tail() == (d % 2 == 1));
    }
    dichotomy = dichotomy && GreensKernel(4, 0.7).has_tail();

    // d=3 tail against the inverse-Fourier oracle at 100 points
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double t = uni(0.8, 2.5);
        const double radius = uni(0.15, 0.8) * t;
        const double got = greens_retarded(3, 0.0, t, radius);
        const double want = oracle_tail_3d(t, radius);
        worst = std::max(worst, std::abs(got - want));
    }
    r.expected = 0.0;
    r.got = worst;
    r.tol = 1e-6;
    r.pass = causal && dichotomy && worst < r.tol;
}

// --- criterion 8: Huygens violation demo --------------------------------------

void ac8_huygens(CheckResult& r) {
    SourcePulse pulse = bump_pulse(0.0, 1.0);
    GreensKernel k4(4, 0.0), k3(3, 0.0);
    const double radius = 2.0;

    bool sharp_zero = true;
    for (double t : {3.2, 6.0, 30.0, 500.0})
        sharp_zero = sharp_zero && convolve_pulse(k4, pulse, t, radius) == 0.0;

    bool tail_positive = true, monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {3.5, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0}) {
        const double v = convolve_pulse(k3, pulse, t, radius);
        tail_positive = tail_positive && v > 0.0;
        monotone = monotone && v < prev;
        prev = v;
    }

    std::vector<double> lt, lv;
    for (double t = 100.0; t <= 1000.0; t *= 1.5) {
        lt.push_back(std::log(t));
        lv.push_back(std::log(convolve_pulse(k3, pulse, t, radius)));
    }
    auto [slope, icpt] = line_fit(lt, lv);
    (void)icpt;

    r.expected = -1.0;
    r.got = slope;
    r.tol = 0.05;
    r.pass = sharp_zero && tail_positive && monotone &&
             std::abs(slope + 1.0) < r.tol;
}

// --- criterion 9: Lorentz invariance suite ------------------------------------

void ac9_invariance(CheckResult& r) {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        LorentzTransform lam = boost(rand_unit_spatial(4), uni(-1.5, 1.5));

        Vec u(4), v(4);
        for (int c = 0; c < 4; ++c) {
            u[c] = uni(-2, 2);
            v[c] = uni(-2, 2);
        }
        worst = std::max(worst,
                         std::abs(dot(lam.apply(u), lam.apply(v)) - dot(u, v)));

        Vec e(3), b(3);
        for (int c = 0; c < 3; ++c) {
            e[c] = uni(-1, 1);
            b[c] = uni(-1, 1);
        }
        FieldTensor f = field_from_eb(e, b);
        auto [i1a, i2a] = invariants(f);
        auto [i1b, i2b] = invariants(transform(f, lam));
        worst = std::max(worst, std::abs(i1a - i1b));
        worst = std::max(worst, std::abs(i2a - i2b));

        Mat direct = stress_energy(transform(f, lam)).T;
        Mat moved = lam.matrix * stress_energy(f).T * transpose(lam.matrix);
        worst = std::max(worst, max_abs(direct - moved));
    }
    r.expected = 0.0;
    r.got = worst;
    r.tol = 1e-10;
    r.pass = worst < r.tol;
}

// --- criterion 10: 2+1 tail self-consistency ----------------------------------

void ac10_tail(CheckResult& r, int threads) {
    // coupling chosen so the 2+1 bound-cloud rearrangement (log-ranged in
    // this dimension) stays inside the ledger budget
    const Charge q{0.2, 1.0};
    FieldTensor f(3);
    f.F(1, 0) = 0.5;
    f.F(0, 1) = -0.5;
    Vec z0(3), u0{1, 0, 0};
    const double tau_end = 5.0;

    TailOptions base;
    base.integrator.max_step = 0.04;
    auto run = [&](const TailOptions& opt) {
        return integrate_tail_2plus1(q, uniform_field_map(f), z0, u0, 0.0,
                                     tau_end, opt);
    };
    auto res = run(base);

    TailOptions halved = base;
    halved.integrator.max_step = 0.02;
    auto res_h = run(halved);

    TailOptions hor1 = base, hor2 = base;
    hor1.horizon = 150.0;
    hor1.horizon_tolerance = 1.0;
    hor2.horizon = 300.0;
    hor2.horizon_tolerance = 1.0;
    auto res_1 = run(hor1);
    auto res_2 = run(hor2);

    auto rel_diff = [&](const IntegrationResult& a, const IntegrationResult& b) {
        double worst = 0;
        for (double tau = 0.5; tau <= tau_end; tau += 0.5) {
            Vec ua = a.trajectory->eval(tau).u;
            Vec ub = b.trajectory->eval(tau).u;
            worst = std::max(worst, max_abs(ua - ub) / max_abs(ub));
        }
        return worst;
    };
    const double step_change = rel_diff(res, res_h);
    const double horizon_change = rel_diff(res_1, res_2);

    LedgerOptions lopt;
    lopt.radius = 8.0;
    lopt.quad.azimuth_order = 48;
    lopt.quad.tau_order = 12;
    lopt.quad.tau_panels = 6;
    lopt.quad.threads = threads;
    BalanceReport rep =
        work_energy_ledger(*res_h.trajectory, q, uniform_field_map(f), lopt);

    r.expected = 0.0;
    r.got = std::max(step_change, horizon_change);
    r.tol = 0.01;
    r.pass = step_change < 0.01 && horizon_change < 0.01 &&
             rep.rel_residual < 0.02;
}

// --- criterion 11: scalar sector ----------------------------------------------

void ac11_scalar(CheckResult& r, int threads) {
    const double g = 0.8;
    auto w = make_circular(4, 1.0, 0.3);
    WorldlineState s = w->eval(0.0);
    const double rate = scalar_radiated_rate(s.a, g);
    const double win = 0.3;
    SurfaceQuadrature quad;
    quad.threads = threads;
    auto provider = scalar_stress_provider(w, g, FieldPart::Radiative);
    FluxResult f = flux_through_retarded_tube(*w, 10.0, 0.0, win, provider, 4, quad);
    const double measured = f.momentum[0] / (win * s.u[0]);

    // massive -> massless limit at m = 1e-3
    Vec local = scalar_self_force(s.u, s.a, s.jerk, g);
    Vec massive = scalar_self_force_massive(*w, 0.0, g, 1e-3);
    const double limit_gap = max_abs(massive - local);

    r.expected = rate;
    r.got = measured;
    r.tol = 1e-6;
    r.pass = std::abs(measured - rate) < 1e-6 * rate && limit_gap < 1e-8;
}

// --- criterion 12: end-to-end ledger ------------------------------------------

void ac12_ledger(CheckResult& r, int threads) {
    const Charge q{0.15, 1.0};
    const double b0 = 1.0, v = 0.6;
    FieldTensor f = field_from_eb(Vec(3), Vec{0.0, 0.0, b0});
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    Vec u0{gamma, gamma * v, 0.0, 0.0}, z0(4);
    const double period = 2.0 * kPi * q.m / (q.e * b0);
    IntegratorOptions opt;
    opt.max_step = 0.2;
    auto res = integrate_reduced_order(q, uniform_field_map(f), z0, u0, 0.0,
                                       10.0 * period, opt);
    LedgerOptions lopt;
    lopt.radius = 20.0;
    lopt.quad.polar_order = 16;
    lopt.quad.azimuth_order = 24;
    lopt.quad.tau_order = 8;
    lopt.quad.tau_panels = 40;
    lopt.quad.threads = threads;
    BalanceReport rep =
        work_energy_ledger(*res.trajectory, q, uniform_field_map(f), lopt);
    r.expected = 0.0;
    r.got = rep.rel_residual;
    r.tol = 0.005;
    r.pass = rep.rel_residual < r.tol;
}

}  // namespace

std::vector<CheckResult> run_acceptance(const std::string& suite, int threads) {
    if (suite != "all" && suite != "invariants" && suite != "greens" &&
        suite != "selfforce" && suite != "balance")
        throw InvalidInput("unknown acceptance suite '" + suite + "'");

    Harness h;
    h.threads = threads;
    auto want = [&](const std::string& s) { return suite == "all" || suite == s; };

    if (want("balance"))
        h.run("AC1", "Larmor balance, nonrelativistic oscillator", "balance",
              [&](CheckResult& r) { ac1_larmor(r, threads); });
    if (want("greens"))
        h.run("AC2", "6D static slope -3.00 +- 0.01", "greens",
              [&](CheckResult& r) { ac2_six_d_slope(r); });
    if (want("invariants"))
        h.run("AC3", "retarded-time residual over 10^4 pairs", "invariants",
              [&](CheckResult& r) { ac3_retarded_residual(r); });
    if (want("selfforce"))
        h.run("AC4", "runaway e-folding time tau0 and reduced-order control",
              "selfforce", [&](CheckResult& r) { ac4_runaway(r); });
    if (want("balance"))
        h.run("AC5", "hyperbolic identity and bound/radiative reconciliation",
              "balance", [&](CheckResult& r) { ac5_hyperbolic(r, threads); });
    if (want("selfforce"))
        h.run("AC6", "constant-field exact motion vs RK4 oracle", "selfforce",
              [&](CheckResult& r) { ac6_constant_field(r); });
    if (want("greens"))
        h.run("AC7", "Green's function causality, dichotomy, d=3 oracle",
              "greens", [&](CheckResult& r) { ac7_greens(r); });
    if (want("greens"))
        h.run("AC8", "Huygens principle: 4D sharp, 2+1 tail with 1/t decay",
              "greens", [&](CheckResult& r) { ac8_huygens(r); });
    if (want("invariants"))
        h.run("AC9", "Lorentz invariance of dot, invariants, stress", "invariants",
              [&](CheckResult& r) { ac9_invariance(r); });
    if (want("selfforce"))
        h.run("AC10", "2+1 tail equation self-consistency and ledger",
              "selfforce", [&](CheckResult& r) { ac10_tail(r, threads); });
    if (want("balance"))
        h.run("AC11", "scalar flux matches the scalar rate; massive limit",
              "balance", [&](CheckResult& r) { ac11_scalar(r, threads); });
    if (want("balance"))
        h.run("AC12", "work-energy ledger for a decaying orbit in constant B",
              "balance", [&](CheckResult& r) { ac12_ledger(r, threads); });
    return h.rows;
}

void print_check_table(const std::vector<CheckResult>& rows, std::ostream& os) {
    os << std::left << std::setw(6) << "check" << std::setw(58) << "name"
       << std::setw(14) << "expected" << std::setw(14) << "got" << std::setw(11)
       << "tol" << std::setw(7) << "status" << "time\n";
    for (const CheckResult& r : rows) {
        os << std::left << std::setw(6) << r.id << std::setw(58)
           << r.name.substr(0, 56) << std::setw(14) << std::setprecision(6)
           << r.expected << std::setw(14) << r.got << std::setw(11)
           << std::setprecision(2) << r.tol << std::setw(7)
           << (r.pass ? "PASS" : "FAIL") << std::setprecision(2) << r.seconds
           << " s\n";
    }
}

}  // namespace sf
