#include "sf/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sf/balance.hpp"
#include "sf/constants.hpp"
#include "sf/greens.hpp"
#include "sf/io.hpp"

namespace fs = std::filesystem;

namespace sf {

double ConfigValue::number(const std::string& field) const {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ScenarioError("field '" + field + "' must be a number");
}
bool ConfigValue::boolean(const std::string& field) const {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw ScenarioError("field '" + field + "' must be a boolean");
}
const std::string& ConfigValue::text(const std::string& field) const {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ScenarioError("field '" + field + "' must be a string");
}
std::vector<double> ConfigValue::numbers(const std::string& field) const {
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (const double* d = std::get_if<double>(&v)) return {*d};
    throw ScenarioError("field '" + field + "' must be an array of numbers");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
    std::string s = trim(raw);
    if (s.empty()) throw ScenarioError(where + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ScenarioError(where + ": unterminated string");
        return {s.substr(1, s.size() - 2)};
    }
    if (s == "true") return {true};
    if (s == "false") return {false};
    if (s.front() == '[') {
        if (s.back() != ']') throw ScenarioError(where + ": unterminated array");
        std::string body = s.substr(1, s.size() - 2);
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool is_string = false;
        std::string cell;
        std::stringstream ss(body);
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            if (cell.front() == '"') {
                is_string = true;
                strs.push_back(cell.substr(1, cell.size() - 2));
            } else {
                try {
                    size_t used = 0;
                    nums.push_back(std::stod(cell, &used));
                    if (used != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw ScenarioError(where + ": bad array element '" + cell + "'");
                }
            }
        }
        if (is_string) return {strs};
        return {nums};
    }
    try {
        size_t used = 0;
        double d = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return {d};
    } catch (const std::exception&) {
        throw ScenarioError(where + ": cannot parse value '" + s + "'");
    }
}

}  // namespace

ConfigTable ConfigTable::parse_string(const std::string& text,
                                      const std::string& origin) {
    ConfigTable t;
    std::stringstream ss(text);
    std::string line;
    std::string section;  // top-level keys live in ""
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ScenarioError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ScenarioError(where + ": empty key");
        t.sections_[section][key] = parse_value(line.substr(eq + 1), where);
    }
    return t;
}

ConfigTable ConfigTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

bool ConfigTable::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

const ConfigValue& ConfigTable::at(const std::string& section,
                                   const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw ScenarioError("missing field '" +
                            (section.empty() ? key : section + "." + key) + "'");
    return it->second.at(key);
}

double ConfigTable::number_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? at(section, key).number(section + "." + key)
                             : fallback;
}
std::string ConfigTable::text_or(const std::string& section,
                                 const std::string& key,
                                 const std::string& fallback) const {
    return has(section, key) ? at(section, key).text(section + "." + key)
                             : fallback;
}
bool ConfigTable::bool_or(const std::string& section, const std::string& key,
                          bool fallback) const {
    return has(section, key) ? at(section, key).boolean(section + "." + key)
                             : fallback;
}

namespace {

struct LoadedScenario {
    std::string name;
    int dimension = 4;
    std::string model;
    Charge charge{1.0, 1.0};
    ConfigTable cfg;
    std::string source_path;
};

WorldlinePtr build_worldline(const LoadedScenario& sc) {
    const ConfigTable& cfg = sc.cfg;
    const int d = sc.dimension;
    const std::string kind = cfg.at("worldline", "kind").text("worldline.kind");
    if (kind == "rest") {
        Vec pos(d - 1);
        if (cfg.has("worldline", "position")) {
            auto p = cfg.at("worldline", "position").numbers("worldline.position");
            for (int i = 0; i < d - 1 && i < (int)p.size(); ++i) pos[i] = p[i];
        }
        return make_rest(d, pos);
    }
    if (kind == "uniform") {
        Vec v(d - 1), pos(d - 1);
        auto vv = cfg.at("worldline", "velocity").numbers("worldline.velocity");
        for (int i = 0; i < d - 1 && i < (int)vv.size(); ++i) v[i] = vv[i];
        return make_uniform(d, v, pos);
    }
    if (kind == "hyperbolic")
        return make_hyperbolic(d, cfg.at("worldline", "g").number("worldline.g"));
    if (kind == "circular")
        return make_circular(d, cfg.at("worldline", "radius").number("worldline.radius"),
                             cfg.at("worldline", "omega").number("worldline.omega"));
    if (kind == "csv")
        return load_worldline_csv(cfg.at("worldline", "path").text("worldline.path"));
    throw ScenarioError("field 'worldline.kind': unknown kind '" + kind + "'");
}

FieldTensor build_external_field(const LoadedScenario& sc) {
    const int d = sc.dimension;
    FieldTensor f(d);
    if (!sc.cfg.sections().count("external_field")) return f;
    if (d == 4) {
        Vec e(3), b(3);
        if (sc.cfg.has("external_field", "e")) {
            auto ev = sc.cfg.at("external_field", "e").numbers("external_field.e");
            for (int i = 0; i < 3 && i < (int)ev.size(); ++i) e[i] = ev[i];
        }
        if (sc.cfg.has("external_field", "b")) {
            auto bv = sc.cfg.at("external_field", "b").numbers("external_field.b");
            for (int i = 0; i < 3 && i < (int)bv.size(); ++i) b[i] = bv[i];
        }
        return field_from_eb(e, b);
    }
    // generic: electric components only
    if (sc.cfg.has("external_field", "e")) {
        auto ev = sc.cfg.at("external_field", "e").numbers("external_field.e");
        for (int i = 1; i < d && i - 1 < (int)ev.size(); ++i) {
            f.F(i, 0) = ev[i - 1];
            f.F(0, i) = -ev[i - 1];
        }
    }
    return f;
}

SurfaceQuadrature build_quadrature(const ConfigTable& cfg, int threads) {
    SurfaceQuadrature q;
    q.polar_order = (int)cfg.number_or("surface", "polar_order", q.polar_order);
    q.azimuth_order = (int)cfg.number_or("surface", "azimuth_order", q.azimuth_order);
    q.tau_order = (int)cfg.number_or("surface", "tau_order", q.tau_order);
    q.tau_panels = (int)cfg.number_or("surface", "tau_panels", q.tau_panels);
    q.threads = threads;
    return q;
}

std::vector<std::string> scenario_metadata(const LoadedScenario& sc) {
    return {"scenario: " + sc.name, "hash: " + file_hash_hex(sc.source_path)};
}

void write_json_report(const BalanceReport& rep, const LoadedScenario& sc,
                       const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(rep.to_json());
    j["_meta"] = {{"tool", kToolVersion},
                  {"units", kUnitConventionLine},
                  {"scenario", sc.name},
                  {"hash", file_hash_hex(sc.source_path)}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void export_field_grid(const LoadedScenario& sc, const WorldlinePtr& w,
                       const std::string& path) {
    const ConfigTable& cfg = sc.cfg;
    const double t = cfg.number_or("grid", "t", 0.0);
    const double r_min = cfg.number_or("grid", "r_min", 1.0);
    const double r_max = cfg.number_or("grid", "r_max", 10.0);
    const int n = (int)cfg.number_or("grid", "n", 50);
    const int axis = (int)cfg.number_or("grid", "axis", 1);
    if (axis < 1 || axis > 3)
        throw ScenarioError("field 'grid.axis' must be 1..3");

    CsvWriter csv(path,
                  {"x0", "x1", "x2", "x3", "E1", "E2", "E3", "B1", "B2", "B3",
                   "T00", "S1", "S2", "S3"},
                  scenario_metadata(sc));
    for (int i = 0; i < n; ++i) {
        const double r = r_min + (r_max - r_min) * i / std::max(1, n - 1);
        Vec x(4);
        x[0] = t;
        x[axis] = r;
        FieldTensor f = lw_field_4d(*w, sc.charge.e, x);
        StressEnergy st = stress_energy(f);
        Vec e = electric_field(f), b = magnetic_field_3(f);
        csv.row({x[0], x[1], x[2], x[3], e[0], e[1], e[2], b[0], b[1], b[2],
                 st.T(0, 0), st.T(0, 1), st.T(0, 2), st.T(0, 3)});
    }
}

}  // namespace

RunOutcome run_scenario(const std::string& path, const std::string& out_root,
                        bool force, int threads) {
    RunOutcome outcome;

    LoadedScenario sc;
    sc.cfg = ConfigTable::parse_file(path);
    sc.source_path = path;
    sc.name = sc.cfg.text_or("", "name", fs::path(path).stem().string());
    sc.dimension = (int)sc.cfg.number_or("", "dimension", 4);
    sc.model = sc.cfg.text_or("model", "kind", "fields_only");
    sc.charge.e = sc.cfg.number_or("model", "charge", 1.0);
    sc.charge.m = sc.cfg.number_or("model", "mass", 1.0);

    // validation
    if (sc.dimension < 3 || sc.dimension > 6 || sc.dimension == 5)
        throw ScenarioError("field 'dimension' must be 3, 4 or 6, got " +
                            std::to_string(sc.dimension));
    if ((sc.model == "larmor_check" || sc.model == "reduced_order" ||
         sc.model == "lorentz_dirac_raw") &&
        sc.dimension != 4)
        throw ScenarioError("field 'dimension': model '" + sc.model +
                            "' requires dimension = 4");
    if (sc.model == "tail_2plus1" && sc.dimension != 3)
        throw ScenarioError(
            "field 'dimension': model 'tail_2plus1' requires dimension = 3");
    if (sc.charge.m <= 0) throw ScenarioError("field 'model.mass' must be > 0");

    const fs::path dir = fs::path(out_root) / sc.name;
    if (fs::exists(dir) && !force && !fs::is_empty(dir))
        throw ScenarioError("output directory " + dir.string() +
                            " exists; pass --force to overwrite");
    fs::create_directories(dir);

    auto artifact = [&](const std::string& file) {
        std::string p = (dir / file).string();
        outcome.artifacts.push_back(p);
        return p;
    };

    if (sc.model == "fields_only") {
        WorldlinePtr w = build_worldline(sc);
        if (sc.cfg.sections().count("grid"))
            export_field_grid(sc, w, artifact("field_grid.csv"));
        if (sc.cfg.sections().count("kernel")) {
            std::vector<double> ts = sc.cfg.at("kernel", "t").numbers("kernel.t");
            std::vector<double> rs = sc.cfg.at("kernel", "r").numbers("kernel.r");
            tabulate_kernel((int)sc.cfg.number_or("kernel", "dimension", 3),
                            sc.cfg.number_or("kernel", "mass", 0.0), ts, rs,
                            artifact("kernel_table.csv"));
        }
        outcome.message = "fields scenario complete";
        return outcome;
    }

    if (sc.model == "larmor_check") {
        WorldlinePtr w = build_worldline(sc);
        if (sc.cfg.at("worldline", "kind").text("worldline.kind") != "circular")
            throw ScenarioError(
                "field 'worldline.kind': larmor_check needs a circular worldline");
        WorldlineState s0 = w->eval(0.0);
        const double gamma = s0.u[0];
        const double omega = sc.cfg.at("worldline", "omega").number("worldline.omega");
        const double period = 2.0 * kPi / (omega * gamma);
        const double radius = sc.cfg.number_or("surface", "radius", 3.0);
        FluxResult flux =
            flux_energy_momentum(*w, sc.charge, radius, 0.0, period, 4,
                                 FieldPart::Full, build_quadrature(sc.cfg, threads));
        const double larmor = larmor_rate(s0.a, sc.charge);
        BalanceReport rep;
        rep.dP_particle = Vec(4);
        rep.P_flux = flux.momentum;
        rep.W = Vec(4);
        rep.W[0] = larmor * gamma * period;  // analytic radiated energy
        rep.residual = rep.W - rep.P_flux;
        rep.M_flux = flux.angular;
        rep.rel_residual = std::abs(rep.residual[0]) / std::abs(rep.W[0]);
        write_json_report(rep, sc, artifact("balance.json"));
        const double tol = sc.cfg.number_or("tolerances", "larmor_rel", 0.01);
        if (rep.rel_residual > tol) {
            outcome.exit_code = 3;
            outcome.message = "accuracy failure: larmor residual " +
                              format_double(rep.rel_residual) + " > " +
                              format_double(tol);
        }
        return outcome;
    }

    if (sc.model == "reduced_order" || sc.model == "lorentz_dirac_raw" ||
        sc.model == "tail_2plus1") {
        const int d = sc.dimension;
        FieldTensor f_ext = build_external_field(sc);
        const double tau0 = sc.cfg.number_or("integration", "tau0", 0.0);
        const double tau1 = sc.cfg.number_or("integration", "tau1", 10.0);
        Vec z0(d), u0(d);
        u0[0] = 1.0;
        if (sc.cfg.has("integration", "u0")) {
            auto uu = sc.cfg.at("integration", "u0").numbers("integration.u0");
            for (int i = 0; i < d && i < (int)uu.size(); ++i) u0[i] = uu[i];
        }

        IntegrationResult res;
        if (sc.model == "reduced_order") {
            IntegratorOptions opt;
            opt.max_step = sc.cfg.number_or("integration", "max_step", 0.05);
            res = integrate_reduced_order(sc.charge, uniform_field_map(f_ext), z0,
                                          u0, tau0, tau1, opt);
        } else if (sc.model == "lorentz_dirac_raw") {
            Vec a0(d);
            if (sc.cfg.has("integration", "a0")) {
                auto aa = sc.cfg.at("integration", "a0").numbers("integration.a0");
                for (int i = 0; i < d && i < (int)aa.size(); ++i) a0[i] = aa[i];
            }
            res = integrate_lorentz_dirac_raw(sc.charge, uniform_field_map(f_ext),
                                              z0, u0, a0, tau0, tau1);
        } else {
            TailOptions opt;
            opt.integrator.max_step =
                sc.cfg.number_or("integration", "max_step", 0.02);
            res = integrate_tail_2plus1(sc.charge, uniform_field_map(f_ext), z0,
                                        u0, tau0, tau1, opt);
        }

        export_trajectory(*res.trajectory, sc.charge, uniform_field_map(f_ext),
                          (int)sc.cfg.number_or("output", "samples", 400),
                          artifact("trajectory.csv"));

        if (sc.cfg.bool_or("output", "balance_report", true)) {
            LedgerOptions lopt;
            lopt.radius = sc.cfg.number_or("surface", "radius", 20.0);
            lopt.quad = build_quadrature(sc.cfg, threads);
            BalanceReport rep = work_energy_ledger(*res.trajectory, sc.charge,
                                                   uniform_field_map(f_ext), lopt);
            write_json_report(rep, sc, artifact("balance.json"));
            const double tol = sc.cfg.number_or("tolerances", "ledger_rel", 1.0);
            if (rep.rel_residual > tol) {
                outcome.exit_code = 3;
                outcome.message = "accuracy failure: ledger residual " +
                                  format_double(rep.rel_residual) + " > " +
                                  format_double(tol);
                return outcome;
            }
        }
        if (res.efold_time) {
            std::ofstream diag((dir / "runaway.json"));
            nlohmann::json j;
            j["efold_time"] = *res.efold_time;
            j["runaway_timescale"] = runaway_timescale(sc.charge);
            diag << j.dump(2) << "\n";
            outcome.artifacts.push_back((dir / "runaway.json").string());
        }
        outcome.message = "integration scenario complete";
        return outcome;
    }

    throw ScenarioError("field 'model.kind': unknown model '" + sc.model + "'");
}

}  // namespace sf
