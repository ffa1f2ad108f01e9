#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>

#include "config.hpp"
#include "output.hpp"

#include "grafluid/closure.hpp"
#include "grafluid/field_solvers.hpp"
#include "grafluid/reduced_models.hpp"
#include "grafluid/special_functions.hpp"

namespace grafluid::cli {

namespace fs = std::filesystem;
namespace cls = grafluid::closure;
namespace fld = grafluid::fields;
namespace red = grafluid::reduced;

namespace {

// --------------------------------------------------------------------------
// shared plumbing
// --------------------------------------------------------------------------

PhysicalScales scales_from(const Config& cfg) {
    PhysicalScales s;
    s.c = cfg.get_real("scales.c");
    s.k_B_T = cfg.get_real("scales.k_B_T");
    s.hbar = cfg.get_real("scales.hbar");
    s.validate();
    return s;
}

void add_scales_schema(Schema& s) {
    s["scales.c"] = {ValueType::real, false, "1.0", {}};
    s["scales.k_B_T"] = {ValueType::real, false, "1.0", {}};
    s["scales.hbar"] = {ValueType::real, false, "1.0", {}};
}

std::vector<std::string> unit_comments(const PhysicalScales& s) {
    return {
        "grafluid output",
        "units: c = " + CsvWriter::format(s.c) + ", k_B_T = " + CsvWriter::format(s.k_B_T) +
            ", hbar = " + CsvWriter::format(s.hbar),
        "thermal density n_T = " + CsvWriter::format(s.thermal_density()),
    };
}

fld::GridShape grid_from(const Config& cfg) {
    fld::GridShape g;
    g.dim = static_cast<int>(cfg.get_integer("grid.dim"));
    g.nx = static_cast<int>(cfg.get_integer("grid.nx"));
    g.ny = g.dim == 2 ? static_cast<int>(cfg.get_integer("grid.ny")) : 1;
    g.dx = cfg.get_real("grid.length") / g.nx;
    g.validate();
    return g;
}

void add_grid_schema(Schema& s) {
    s["grid.dim"] = {ValueType::integer, false, "1", {}};
    s["grid.nx"] = {ValueType::integer, true, "", {}};
    s["grid.ny"] = {ValueType::integer, false, "1", {}};
    s["grid.length"] = {ValueType::real, false, "1.0", {}};
}

std::vector<double> external_potential(const Config& cfg, const fld::GridShape& g) {
    const std::string kind = cfg.get_text("potential.kind");
    const double amp = cfg.get_real("potential.amplitude");
    const double width = cfg.get_real("potential.width");
    const long long mode = cfg.get_integer("potential.mode");
    std::vector<double> v(g.cells(), 0.0);
    if (kind == "none") return v;
    const double lx = g.length_x();
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = (i + 0.5) * g.dx;
            double val = 0.0;
            if (kind == "sine") {
                val = amp * std::sin(2.0 * pi * mode * x / lx);
            } else if (kind == "tanh_step") {
                // periodic-compatible double step: up at lx/4, down at 3lx/4
                val = amp * 0.5 *
                      (std::tanh(2.0 * (x - 0.25 * lx) / width) -
                       std::tanh(2.0 * (x - 0.75 * lx) / width));
            } else if (kind == "gaussian") {
                const double r = x - 0.5 * lx;
                val = amp * std::exp(-r * r / (2.0 * width * width));
            }
            v[g.index(i, j)] = val;
        }
    }
    return v;
}

void add_potential_schema(Schema& s) {
    s["potential.kind"] = {ValueType::text, false, "none", {"none", "sine", "tanh_step", "gaussian"}};
    s["potential.amplitude"] = {ValueType::real, false, "0.0", {}};
    s["potential.width"] = {ValueType::real, false, "0.05", {}};
    s["potential.mode"] = {ValueType::integer, false, "1", {}};
}

void write_snapshot(const std::string& path, const fld::FieldGrid& g,
                    const PhysicalScales& scales) {
    std::vector<std::string> cols;
    if (g.shape.dim == 1)
        cols = {"x", "n_plus", "ux_plus", "uy_plus", "n_minus", "ux_minus", "uy_minus", "V"};
    else
        cols = {"x", "y", "n_plus", "ux_plus", "uy_plus", "n_minus", "ux_minus", "uy_minus", "V"};
    CsvWriter csv(path, unit_comments(scales), cols);
    for (int j = 0; j < g.shape.ny; ++j) {
        for (int i = 0; i < g.shape.nx; ++i) {
            const int c = g.shape.index(i, j);
            std::vector<double> row;
            row.push_back((i + 0.5) * g.shape.dx);
            if (g.shape.dim == 2) row.push_back((j + 0.5) * g.shape.dx);
            const auto& e = g.electrons;
            const auto& h = g.holes;
            row.insert(row.end(), {e.n[c], e.mx[c] / e.n[c], e.my[c] / e.n[c], h.n[c],
                                   h.mx[c] / h.n[c], h.my[c] / h.n[c], g.potential(c)});
            csv.row(row);
        }
    }
}

struct CommandContext {
    Config cfg;
    RunOptions opts;
    RunManifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void check(const std::string& name, bool pass, const std::string& detail) {
        manifest.checks.push_back({name, pass, detail});
        std::printf("%s  %s (%s)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    }

    int finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest.write_atomic(opts.out_dir);
        return manifest.all_checks_pass() ? exit_ok : exit_numerical;
    }
};

CommandContext make_context(const std::string& command, const RunOptions& opts,
                            Schema schema) {
    add_scales_schema(schema);
    CommandContext ctx;
    ctx.opts = opts;
    ctx.cfg = opts.config_path.empty() ? Config::parse_text("schema_version = 1\n")
                                       : Config::parse_file(opts.config_path);
    ctx.cfg.validate(schema);
    ctx.manifest.command = command;
    ctx.manifest.config = ctx.cfg.entries();
    ctx.manifest.seed = opts.seed;
    fs::create_directories(opts.out_dir);
    return ctx;
}

// --------------------------------------------------------------------------
// tabulate
// --------------------------------------------------------------------------

int cmd_tabulate(const RunOptions& opts) {
    Schema schema;
    schema["map.a_min"] = {ValueType::real, false, "-40.0", {}};
    schema["map.a_max"] = {ValueType::real, false, "20.0", {}};
    schema["map.a_samples"] = {ValueType::integer, false, "61", {}};
    schema["map.b_max"] = {ValueType::real, false, "30.0", {}};
    schema["map.b_samples"] = {ValueType::integer, false, "31", {}};
    schema["curves.u_samples"] = {ValueType::integer, false, "101", {}};
    schema["curves.u_max"] = {ValueType::real, false, "0.995", {}};
    auto ctx = make_context("tabulate", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);

    // (A, B) -> (n, u) map
    const double a0 = ctx.cfg.get_real("map.a_min"), a1 = ctx.cfg.get_real("map.a_max");
    const int na = static_cast<int>(ctx.cfg.get_integer("map.a_samples"));
    const double b1 = ctx.cfg.get_real("map.b_max");
    const int nb = static_cast<int>(ctx.cfg.get_integer("map.b_samples"));
    {
        CsvWriter csv(ctx.opts.out_dir + "/map_grid.csv", unit_comments(scales),
                      {"A", "B", "n_over_nT", "u", "below_critical_line"});
        for (int ib = 0; ib < nb; ++ib) {
            const double b = b1 * ib / (nb - 1.0);
            for (int ia = 0; ia < na; ++ia) {
                const double a = a0 + (a1 - a0) * ia / (na - 1.0);
                const auto st = cls::forward_map({a, b, 0.0}, scales);
                csv.row({{a, b, st.n / scales.thermal_density(), st.u_abs(),
                          a < -b ? 1.0 : 0.0}});
            }
        }
    }

    // regime curves
    const int nu = static_cast<int>(ctx.cfg.get_integer("curves.u_samples"));
    const double u_max = ctx.cfg.get_real("curves.u_max");
    std::vector<double> us(nu), xs(nu);
    {
        CsvWriter csv(ctx.opts.out_dir + "/regime_curves.csv", unit_comments(scales),
                      {"u", "X", "Y", "Z", "Z_perp"});
        for (int i = 0; i < nu; ++i) {
            const double u = u_max * i / (nu - 1.0);
            const double x = cls::regime_x(u);
            const auto yz = cls::regime_yz(u);
            us[i] = u;
            xs[i] = x;
            csv.row({{u, x, yz.y, yz.z, yz.z_perp}});
        }
    }

    // inline checks: monotone X with the proven endpoints, level-line
    // geometry on the two sides of the critical line A = -B
    bool monotone = true;
    for (int i = 1; i < nu; ++i) monotone = monotone && xs[i] > xs[i - 1];
    ctx.check("x_monotone_endpoints",
              monotone && std::abs(xs[0] - 0.5) < 1e-12 && xs[nu - 1] > 0.9 && xs[nu - 1] < 1.0,
              "X(0)=" + CsvWriter::format(xs[0]) +
                  ", X(u_max)=" + CsvWriter::format(xs[nu - 1]));
    {
        double worst = 0.0;  // u level lines parallel to the A axis deep below A = -B
        for (double b : {1.0, 2.0, 4.0}) {
            const double ua = cls::forward_map({-45.0, b, 0.0}, scales).u_abs();
            const double ub = cls::forward_map({-38.0, b, 0.0}, scales).u_abs();
            worst = std::max(worst, std::abs(ua - ub));
        }
        ctx.check("u_isolines_parallel_below_critical", worst < 1e-8,
                  "max |u(A1,B)-u(A2,B)| = " + CsvWriter::format(worst));
    }
    {
        double worst = 0.0;  // u constant along rays from the origin above A = -B
        for (double psi : {0.3, 1.0, 2.0}) {
            const double r1 = 2e4, r2 = 6e4;
            const double u1 =
                cls::forward_map({r1 * std::cos(psi), r1 * std::sin(psi), 0.0}, scales).u_abs();
            const double u2 =
                cls::forward_map({r2 * std::cos(psi), r2 * std::sin(psi), 0.0}, scales).u_abs();
            worst = std::max(worst, std::abs(u1 - u2));
        }
        ctx.check("u_isolines_radial_above_critical", worst < 1e-6,
                  "max |u(R1,psi)-u(R2,psi)| = " + CsvWriter::format(worst));
    }
    {
        const auto yz0 = cls::regime_yz(0.0);
        const auto yz1 = cls::regime_yz(0.9995);
        const bool pass = std::abs(yz0.y - 0.5) < 1e-10 && std::abs(yz0.z - 0.5) < 1e-10 &&
                          std::abs(yz0.z_perp - 0.5) < 1e-10 &&
                          std::abs(yz1.y - (2 * 0.9995 - 1)) < 1e-4 && yz1.z < 1e-3 &&
                          yz1.z_perp < 0.2;
        ctx.check("yz_endpoints", pass,
                  "Y,Z,Zp(0) = 1/2; Y(1-) -> 2u-1, Z -> 0, Z_perp -> 0");
    }
    return ctx.finish();
}

// --------------------------------------------------------------------------
// invert / regimes
// --------------------------------------------------------------------------

int cmd_invert(const RunOptions& opts) {
    Schema schema;
    schema["state.n_over_nT"] = {ValueType::real, true, "", {}};
    schema["state.ux"] = {ValueType::real, false, "0.0", {}};
    schema["state.uy"] = {ValueType::real, false, "0.0", {}};
    schema["tolerance"] = {ValueType::real, false, "1e-10", {}};
    auto ctx = make_context("invert", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);

    cls::MomentState st;
    st.n = ctx.cfg.get_real("state.n_over_nT") * scales.thermal_density();
    st.ux = ctx.cfg.get_real("state.ux");
    st.uy = ctx.cfg.get_real("state.uy");
    const double tol = ctx.cfg.get_real("tolerance");

    const auto m = cls::invert_constraints(st, scales, tol);
    const auto back = cls::forward_map(m, scales);
    const auto tens = cls::closure_tensors(st, m, scales);

    std::printf("A = %.17g\nB = %.17g\ntheta_B = %.17g\n", m.a, m.b, m.theta_b);
    CsvWriter csv(ctx.opts.out_dir + "/inversion.csv", unit_comments(scales),
                  {"A", "B", "theta_B", "P_par", "P_perp", "Q_par", "Q_perp"});
    csv.row({{m.a, m.b, m.theta_b, tens.p_par, tens.p_perp, tens.q_par, tens.q_perp}});

    const double err_n = std::abs(back.n - st.n) / st.n;
    const double err_u = std::hypot(back.ux - st.ux, back.uy - st.uy);
    ctx.check("round_trip", err_n <= tol && err_u <= tol,
              "rel n err = " + CsvWriter::format(err_n) +
                  ", u err = " + CsvWriter::format(err_u));
    return ctx.finish();
}

int cmd_regimes(const RunOptions& opts) {
    Schema schema;
    schema["curves.u_samples"] = {ValueType::integer, false, "101", {}};
    schema["curves.u_max"] = {ValueType::real, false, "0.995", {}};
    auto ctx = make_context("regimes", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);

    const int nu = static_cast<int>(ctx.cfg.get_integer("curves.u_samples"));
    const double u_max = ctx.cfg.get_real("curves.u_max");
    CsvWriter csv(ctx.opts.out_dir + "/regime_curves.csv", unit_comments(scales),
                  {"u", "X", "Y", "Z", "Z_perp"});
    bool monotone = true;
    double prev_x = -1.0, x0 = 0.0, y0 = 0.0;
    for (int i = 0; i < nu; ++i) {
        const double u = u_max * i / (nu - 1.0);
        const double x = cls::regime_x(u);
        const auto yz = cls::regime_yz(u);
        if (i == 0) {
            x0 = x;
            y0 = yz.y;
        }
        monotone = monotone && x > prev_x;
        prev_x = x;
        csv.row({{u, x, yz.y, yz.z, yz.z_perp}});
    }
    ctx.check("x_monotone", monotone, "X strictly increasing on the sample grid");
    ctx.check("endpoints", std::abs(x0 - 0.5) < 1e-12 && std::abs(y0 - 0.5) < 1e-10,
              "X(0) = Y(0) = 1/2");
    return ctx.finish();
}

// --------------------------------------------------------------------------
// solve-hydro
// --------------------------------------------------------------------------

int cmd_solve_hydro(const RunOptions& opts) {
    Schema schema;
    add_grid_schema(schema);
    add_potential_schema(schema);
    schema["init.n_plus"] = {ValueType::real, true, "", {}};
    schema["init.n_minus"] = {ValueType::real, true, "", {}};
    schema["init.perturb"] = {ValueType::text, false, "none", {"none", "sine_n", "gaussian_n"}};
    schema["init.amplitude"] = {ValueType::real, false, "0.0", {}};
    schema["init.mode"] = {ValueType::integer, false, "1", {}};
    schema["init.width"] = {ValueType::real, false, "0.05", {}};
    schema["cfl"] = {ValueType::real, false, "0.4", {}};
    schema["tau0"] = {ValueType::real, false, "inf", {}};
    schema["t_end"] = {ValueType::real, true, "", {}};
    schema["poisson.enabled"] = {ValueType::boolean, false, "false", {}};
    schema["poisson.gamma"] = {ValueType::real, false, "1.0", {}};
    schema["output.snapshots"] = {ValueType::integer, false, "2", {}};
    auto ctx = make_context("solve-hydro", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);
    const auto shape = grid_from(ctx.cfg);

    auto grid = fld::FieldGrid::uniform(shape, ctx.cfg.get_real("init.n_plus"),
                                        ctx.cfg.get_real("init.n_minus"));
    grid.v_ext = external_potential(ctx.cfg, shape);

    const std::string perturb = ctx.cfg.get_text("init.perturb");
    const double amp = ctx.cfg.get_real("init.amplitude");
    const long long mode = ctx.cfg.get_integer("init.mode");
    const double width = ctx.cfg.get_real("init.width");
    for (int j = 0; j < shape.ny; ++j) {
        for (int i = 0; i < shape.nx; ++i) {
            const double x = (i + 0.5) * shape.dx;
            double bump = 0.0;
            if (perturb == "sine_n")
                bump = amp * std::sin(2.0 * pi * mode * x / shape.length_x());
            else if (perturb == "gaussian_n") {
                const double r = x - 0.5 * shape.length_x();
                bump = amp * std::exp(-r * r / (2.0 * width * width));
            }
            grid.electrons.n[shape.index(i, j)] += bump;
        }
    }

    fld::SolverConfig solver;
    solver.cfl = ctx.cfg.get_real("cfl");
    solver.tau0 = ctx.cfg.get_real("tau0");
    solver.poisson = ctx.cfg.get_boolean("poisson.enabled");
    solver.gamma = ctx.cfg.get_real("poisson.gamma");
    solver.threads = ctx.opts.threads;
    if (solver.poisson) fld::poisson_solve(grid, solver.gamma);

    const double t_end = ctx.cfg.get_real("t_end");
    const double dt = fld::stable_dt(shape, solver, scales);
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    const int snapshots = std::max<int>(1, static_cast<int>(ctx.cfg.get_integer("output.snapshots")));

    const double mass0_e = fld::total_mass(grid, Species::electron);
    const double mass0_h = fld::total_mass(grid, Species::hole);
    std::vector<double> t_series, mass_e, mass_h, energy;
    bool energy_monotone = true;
    double prev_energy = std::numeric_limits<double>::infinity();
    const bool static_v = !solver.poisson;

    write_snapshot(ctx.opts.out_dir + "/snapshot_0000.csv", grid, scales);
    int snap_written = 1;
    for (int k = 0; k < steps; ++k) {
        const double h = std::min(dt, t_end - k * dt);
        fld::hyperbolic_step(grid, solver, scales, h);
        const double t = std::min(t_end, (k + 1) * dt);
        const auto rep = fld::free_energy_report(grid, solver, scales);
        t_series.push_back(t);
        mass_e.push_back(fld::total_mass(grid, Species::electron));
        mass_h.push_back(fld::total_mass(grid, Species::hole));
        energy.push_back(rep.total);
        if (static_v && std::isfinite(solver.tau0)) {
            energy_monotone = energy_monotone && rep.total <= prev_energy + 1e-10;
        }
        prev_energy = rep.total;
        if ((k + 1) % std::max(1, steps / snapshots) == 0 && snap_written <= snapshots) {
            char name[64];
            std::snprintf(name, sizeof name, "/snapshot_%04d.csv", snap_written++);
            write_snapshot(ctx.opts.out_dir + name, grid, scales);
        }
    }

    ctx.manifest.diagnostics = {{"t", t_series},
                                {"mass_plus", mass_e},
                                {"mass_minus", mass_h},
                                {"free_energy", energy}};
    const double drift_e = std::abs(mass_e.back() - mass0_e) / mass0_e;
    const double drift_h = std::abs(mass_h.back() - mass0_h) / mass0_h;
    ctx.check("mass_conservation", drift_e < 1e-12 && drift_h < 1e-12,
              "rel drift " + CsvWriter::format(std::max(drift_e, drift_h)));
    if (static_v && std::isfinite(solver.tau0))
        ctx.check("free_energy_non_increasing", energy_monotone,
                  "static potential, relaxation on");
    return ctx.finish();
}

// --------------------------------------------------------------------------
// solve-dd
// --------------------------------------------------------------------------

int cmd_solve_dd(const RunOptions& opts) {
    Schema schema;
    add_grid_schema(schema);
    add_potential_schema(schema);
    schema["regime"] = {ValueType::text, false, "general",
                        {"general", "maxwell_boltzmann", "degenerate"}};
    schema["species"] = {ValueType::text, false, "electron", {"electron", "hole"}};
    schema["tau0"] = {ValueType::real, false, "1.0", {}};
    schema["t_end"] = {ValueType::real, true, "", {}};
    schema["init.profile"] = {ValueType::text, false, "uniform",
                              {"uniform", "gaussian", "steady"}};
    schema["init.n0"] = {ValueType::real, true, "", {}};
    schema["init.amplitude"] = {ValueType::real, false, "0.0", {}};
    schema["init.width"] = {ValueType::real, false, "0.05", {}};
    auto ctx = make_context("solve-dd", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);
    const auto shape = grid_from(ctx.cfg);
    const auto v = external_potential(ctx.cfg, shape);

    red::DiffusionConfig dd;
    const std::string regime = ctx.cfg.get_text("regime");
    dd.regime = regime == "maxwell_boltzmann" ? red::DiffusionRegime::maxwell_boltzmann
                : regime == "degenerate"      ? red::DiffusionRegime::degenerate
                                              : red::DiffusionRegime::general;
    dd.species = ctx.cfg.get_text("species") == "hole" ? Species::hole : Species::electron;
    dd.tau0 = ctx.cfg.get_real("tau0");

    const double n0 = ctx.cfg.get_real("init.n0");
    const std::string profile = ctx.cfg.get_text("init.profile");
    std::vector<double> n(shape.cells(), n0);
    const double sign = species_sign(dd.species);
    for (int j = 0; j < shape.ny; ++j) {
        for (int i = 0; i < shape.nx; ++i) {
            const int c = shape.index(i, j);
            if (profile == "gaussian") {
                const double r = (i + 0.5) * shape.dx - 0.5 * shape.length_x();
                const double w = ctx.cfg.get_real("init.width");
                n[c] = n0 + ctx.cfg.get_real("init.amplitude") *
                                std::exp(-r * r / (2.0 * w * w));
            } else if (profile == "steady") {
                // zero-flux profile of the chosen regime
                if (dd.regime == red::DiffusionRegime::maxwell_boltzmann)
                    n[c] = n0 * std::exp(-sign * v[c] / scales.k_B_T);
                else if (dd.regime == red::DiffusionRegime::degenerate) {
                    const double root = std::sqrt(n0) -
                                        sign * v[c] / (2.0 * scales.c * scales.hbar *
                                                       std::sqrt(pi));
                    n[c] = root * root;
                } else {
                    n[c] = n0;
                }
            }
        }
    }

    const double t_end = ctx.cfg.get_real("t_end");
    const double dt = 0.9 * red::drift_diffusion_max_dt(shape, dd, scales);
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    const std::vector<double> n_init = n;
    double mass0 = 0.0;
    for (double x : n) mass0 += x;
    for (int k = 0; k < steps; ++k)
        red::drift_diffusion_step(n, shape, v, dd, scales, std::min(dt, t_end - k * dt));
    double mass1 = 0.0;
    for (double x : n) mass1 += x;

    {
        CsvWriter csv(ctx.opts.out_dir + "/density.csv", unit_comments(scales),
                      shape.dim == 1 ? std::vector<std::string>{"x", "n", "V"}
                                     : std::vector<std::string>{"x", "y", "n", "V"});
        for (int j = 0; j < shape.ny; ++j)
            for (int i = 0; i < shape.nx; ++i) {
                const int c = shape.index(i, j);
                if (shape.dim == 1)
                    csv.row({{(i + 0.5) * shape.dx, n[c], v[c]}});
                else
                    csv.row({{(i + 0.5) * shape.dx, (j + 0.5) * shape.dx, n[c], v[c]}});
            }
    }

    ctx.check("mass_conservation", std::abs(mass1 - mass0) / mass0 < 1e-12,
              "rel drift " + CsvWriter::format(std::abs(mass1 - mass0) / mass0));
    if (profile == "steady") {
        double resid = 0.0, scale = 0.0;
        for (int c = 0; c < shape.cells(); ++c) {
            resid = std::max(resid, std::abs(n[c] - n_init[c]));
            scale = std::max(scale, n_init[c]);
        }
        ctx.check("steady_state_residual", resid / scale <= 1e-10,
                  "rel residual " + CsvWriter::format(resid / scale));
    }
    return ctx.finish();
}

// --------------------------------------------------------------------------
// solve-wave
// --------------------------------------------------------------------------

int cmd_solve_wave(const RunOptions& opts) {
    Schema schema;
    add_grid_schema(schema);
    schema["init.n0"] = {ValueType::real, true, "", {}};
    schema["init.amplitude"] = {ValueType::real, true, "", {}};
    schema["init.mode"] = {ValueType::integer, false, "1", {}};
    schema["t_end"] = {ValueType::real, true, "", {}};
    auto ctx = make_context("solve-wave", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);
    const auto shape = grid_from(ctx.cfg);

    const double n0 = ctx.cfg.get_real("init.n0");
    const double amp = ctx.cfg.get_real("init.amplitude");
    const long long mode = ctx.cfg.get_integer("init.mode");
    const double k_wave = 2.0 * pi * mode / shape.length_x();

    red::WaveState w;
    w.background_n = n0;
    w.cur.resize(shape.cells());
    const double dt = 0.5 * red::wave_max_dt(shape, scales);
    // standing wave start: n(x, -dt) = n(x, 0) (cos(omega t) profile)
    for (int i = 0; i < shape.nx; ++i)
        w.cur[i] = n0 + amp * std::cos(k_wave * (i + 0.5) * shape.dx);
    w.prev = w.cur;
    const std::vector<double> v(shape.cells(), 0.0);

    const double t_end = ctx.cfg.get_real("t_end");
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    // projected mode amplitude; its sign flips measure the half period
    std::vector<double> t_series, amp_series;
    std::vector<double> flips;
    double prev_proj = 0.0;
    for (int k = 0; k < steps; ++k) {
        red::wave_step(w, shape, v, Species::electron, scales, dt);
        double proj = 0.0;
        for (int i = 0; i < shape.nx; ++i)
            proj += (w.cur[i] - n0) * std::cos(k_wave * (i + 0.5) * shape.dx);
        proj *= 2.0 * shape.dx / shape.length_x();
        const double t = (k + 1) * dt;
        t_series.push_back(t);
        amp_series.push_back(proj);
        if (k > 0 && proj * prev_proj < 0.0) {
            // linear interpolation of the crossing time
            flips.push_back(t - dt * proj / (proj - prev_proj));
        }
        prev_proj = proj;
    }
    CsvWriter csv(ctx.opts.out_dir + "/mode_amplitude.csv", unit_comments(scales),
                  {"t", "amplitude"});
    for (size_t i = 0; i < t_series.size(); ++i) csv.row({{t_series[i], amp_series[i]}});

    const double target = scales.c / std::sqrt(2.0);
    if (flips.size() >= 2) {
        const double half_period = (flips.back() - flips.front()) / (flips.size() - 1.0);
        const double speed = pi / half_period / k_wave;
        ctx.manifest.diagnostics["measured_speed"] = speed;
        ctx.check("wave_speed", std::abs(speed - target) / target < 0.01,
                  "measured " + CsvWriter::format(speed) + ", target " +
                      CsvWriter::format(target));
    } else {
        ctx.check("wave_speed", false, "run too short to measure the oscillation");
    }
    return ctx.finish();
}

// --------------------------------------------------------------------------
// solve-collimation
// --------------------------------------------------------------------------

int cmd_solve_collimation(const RunOptions& opts) {
    Schema schema;
    add_grid_schema(schema);
    add_potential_schema(schema);
    schema["mode"] = {ValueType::text, false, "field", {"field", "rays"}};
    schema["force"] = {ValueType::text, false, "maxwell_boltzmann",
                       {"maxwell_boltzmann", "none"}};
    schema["t_end"] = {ValueType::real, true, "", {}};
    schema["init.angle"] = {ValueType::real, false, "0.0", {}};
    schema["init.swirl"] = {ValueType::real, false, "0.0", {}};
    schema["rays.count"] = {ValueType::integer, false, "5", {}};
    schema["rays.angle"] = {ValueType::real, false, "0.5", {}};
    schema["step.height"] = {ValueType::real, false, "0.5", {}};
    schema["step.width"] = {ValueType::real, false, "0.02", {}};
    auto ctx = make_context("solve-collimation", opts, std::move(schema));
    const auto scales = scales_from(ctx.cfg);

    if (ctx.cfg.get_text("mode") == "rays") {
        const double height = ctx.cfg.get_real("step.height");
        const double width = ctx.cfg.get_real("step.width");
        const double angle = ctx.cfg.get_real("rays.angle");
        const int count = static_cast<int>(ctx.cfg.get_integer("rays.count"));
        const double t_end = ctx.cfg.get_real("t_end");
        const auto pot = red::tanh_step_potential(height, width);

        CsvWriter csv(ctx.opts.out_dir + "/rays.csv", unit_comments(scales),
                      {"ray", "t", "x", "y", "ux", "uy"});
        double worst = 0.0;
        for (int r = 0; r < count; ++r) {
            const double a = angle * (1.0 + 0.1 * r / std::max(1, count - 1));
            const auto path = red::trace_collimation_ray(-8.0 * width, 0.0, a, t_end,
                                                         t_end / 4096.0, pot,
                                                         Species::electron, scales);
            for (const auto& s : path) csv.row({{double(r), s.t, s.x, s.y, s.ux, s.uy}});
            const auto& last = path.back();
            const double ratio = std::sin(a) / last.uy;  // sin(phi_i) / sin(phi_r)
            // electrons crossing a step up: sin(phi_i)/sin(phi_r) = e^{-dV/k_B T}
            const double target = std::exp(-height / scales.k_B_T);
            worst = std::max(worst, std::abs(ratio / target - 1.0));
        }
        ctx.check("snell_law", worst < 0.01,
                  "max |ratio/target - 1| = " + CsvWriter::format(worst));
        return ctx.finish();
    }

    const auto shape = grid_from(ctx.cfg);
    const auto v = external_potential(ctx.cfg, shape);
    red::CollimationField field;
    field.ux.resize(shape.cells());
    field.uy.resize(shape.cells());
    const double angle0 = ctx.cfg.get_real("init.angle");
    const double swirl = ctx.cfg.get_real("init.swirl");
    for (int j = 0; j < shape.ny; ++j)
        for (int i = 0; i < shape.nx; ++i) {
            const double x = (i + 0.5) * shape.dx;
            const double a = angle0 + swirl * std::sin(2.0 * pi * x / shape.length_x());
            field.ux[shape.index(i, j)] = std::cos(a);
            field.uy[shape.index(i, j)] = std::sin(a);
        }

    const auto force = ctx.cfg.get_text("force") == "none" ? red::CollimationForce::none
                                                           : red::CollimationForce::maxwell_boltzmann;
    const double t_end = ctx.cfg.get_real("t_end");
    const double dt = 0.4 * red::collimation_max_dt(shape, scales);
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    double drift = 0.0;
    for (int k = 0; k < steps; ++k) {
        red::collimation_step(field, shape, v, Species::electron, scales,
                              std::min(dt, t_end - k * dt), force);
        drift = std::max(drift, red::max_norm_drift(field));
    }

    CsvWriter csv(ctx.opts.out_dir + "/direction_field.csv", unit_comments(scales),
                  shape.dim == 1 ? std::vector<std::string>{"x", "ux", "uy", "V"}
                                 : std::vector<std::string>{"x", "y", "ux", "uy", "V"});
    for (int j = 0; j < shape.ny; ++j)
        for (int i = 0; i < shape.nx; ++i) {
            const int c = shape.index(i, j);
            if (shape.dim == 1)
                csv.row({{(i + 0.5) * shape.dx, field.ux[c], field.uy[c], v[c]}});
            else
                csv.row({{(i + 0.5) * shape.dx, (j + 0.5) * shape.dx, field.ux[c], field.uy[c],
                          v[c]}});
        }
    ctx.manifest.diagnostics["max_norm_drift"] = drift;
    ctx.check("unit_norm_drift", drift <= 1e-3, "max ||u|-1| = " + CsvWriter::format(drift));
    return ctx.finish();
}

// --------------------------------------------------------------------------
// selftest
// --------------------------------------------------------------------------

int cmd_selftest(const RunOptions& opts) {
    auto ctx = make_context("selftest", opts, Schema{});
    const PhysicalScales scales;
    std::mt19937_64 rng(opts.seed);

    {
        const double e1 = std::abs(sf::fermi_phi(1.0, 0.0) - std::numbers::ln2);
        const double e2 = std::abs(sf::fermi_phi(2.0, 0.0) - pi * pi / 12.0);
        ctx.check("fermi_closed_forms", e1 < 1e-14 && e2 < 1e-14,
                  "phi_1(0), phi_2(0) against ln 2 and pi^2/12");
    }
    {
        std::uniform_real_distribution<double> da(-3.0, 3.0), db(0.0, 2.0);
        std::uniform_int_distribution<int> dn(0, 4), ds(1, 3);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const int n = dn(rng), s = ds(rng);
            const double a = da(rng), b = db(rng);
            const double q = kernels::kernel_quadrature(n, s, a, b, 1e-13);
            const double sr = kernels::kernel_series(n, s, a, b);
            worst = std::max(worst, std::abs(q - sr) / std::max(1.0, std::abs(q)));
        }
        ctx.check("kernel_cross_validation", worst < 1e-10,
                  "max quadrature-vs-series mismatch " + CsvWriter::format(worst));
    }
    {
        std::uniform_real_distribution<double> da(-10.0, 10.0), db(0.0, 10.0);
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            const double a = da(rng), b = db(rng);
            const auto st = cls::forward_map({a, b, 0.4}, scales);
            const auto m = cls::invert_constraints(st, scales, 1e-12);
            worst = std::max({worst, std::abs(m.a - a), std::abs(m.b - b)});
        }
        ctx.check("constraint_round_trip", worst < 1e-8,
                  "max multiplier recovery error " + CsvWriter::format(worst));
    }
    {
        std::uniform_real_distribution<double> da(-5.0, 5.0), db(0.0, 5.0);
        bool ok = true;
        for (int k = 0; k < 100; ++k) {
            const double a = da(rng), b = db(rng);
            const auto st = cls::forward_map({a, b, 0.0}, scales);
            const auto m = cls::invert_constraints(st, scales, 1e-11);
            const auto t = cls::closure_tensors(st, m, scales);
            ok = ok && t.p_par >= 0.5 && t.p_par < 1.0 && t.q_par > 0.0 && t.q_par < 0.5 &&
                 t.q_perp > 0.0 && t.q_perp < 1.0 - t.q_par;
        }
        ctx.check("closure_inequalities", ok, "100 random admissible states");
    }
    return ctx.finish();
}

}  // namespace

int run_command(const std::string& name, const RunOptions& opts) {
    try {
        if (name == "tabulate") return cmd_tabulate(opts);
        if (name == "invert") return cmd_invert(opts);
        if (name == "regimes") return cmd_regimes(opts);
        if (name == "solve-hydro") return cmd_solve_hydro(opts);
        if (name == "solve-dd") return cmd_solve_dd(opts);
        if (name == "solve-wave") return cmd_solve_wave(opts);
        if (name == "solve-collimation") return cmd_solve_collimation(opts);
        if (name == "selftest") return cmd_selftest(opts);
        std::fprintf(stderr, "unknown command '%s'\n", name.c_str());
        return exit_usage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        write_error_record(opts.out_dir, "config", e.what());
        return exit_usage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        write_error_record(opts.out_dir, "io", e.what());
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        write_error_record(opts.out_dir, "io", e.what());
        return exit_io;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        write_error_record(opts.out_dir, "numerical", e.what());
        return exit_numerical;
    }
}

}  // namespace grafluid::cli
