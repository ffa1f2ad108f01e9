#include "grafluid/field_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grafluid::fields {

namespace {

struct CellTensors {
    closure::Mat2 p{}, q{};
};

// Per-cell closure pass: invert the constraints (warm-started) and assemble
// the flux and force-coupling tensors.
void closure_pass(FieldGrid& g, Species sp, const SolverConfig& cfg,
                  const PhysicalScales& scales, std::vector<CellTensors>& out) {
    auto& f = g.species(sp);
    auto& warm = g.warm(sp);
    const int cells = g.shape.cells();
    out.resize(cells);
    parallel_for(cells, cfg.threads, [&](int b, int e) {
        for (int c = b; c < e; ++c) {
            const double n = f.n[c];
            const closure::MomentState st{n, f.mx[c] / n, f.my[c] / n};
            const auto m = closure::invert_constraints(st, scales, cfg.inversion_tol, warm[c]);
            warm[c] = m;
            const auto t = closure::closure_tensors(st, m, scales);
            out[c] = CellTensors{t.pressure, t.force_coupling};
        }
    });
}

struct Rates {
    std::vector<double> n, mx, my;
    void resize(int cells) {
        n.assign(cells, 0.0);
        mx.assign(cells, 0.0);
        my.assign(cells, 0.0);
    }
};

// Rusanov flux divergence plus force sources for one species.
void accumulate_rates(const FieldGrid& g, Species sp, const std::vector<CellTensors>& tens,
                      const PhysicalScales& scales, Rates& out) {
    const auto& f = g.species(sp);
    const GridShape& sh = g.shape;
    const double c = scales.c;
    const double inv_dx = 1.0 / sh.dx;
    const double sign = species_sign(sp);
    out.resize(sh.cells());

    const int nx = sh.nx, ny = sh.ny;
    auto idx = [&](int i, int j) {
        return sh.index((i + nx) % nx, (j + ny) % ny);
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int cl = idx(i, j);
            {
                const int cr = idx(i + 1, j);
                // x-face flux of (n, m_x, m_y): physical part c (m_x, P_xx, P_yx)
                const double fn = 0.5 * c * (f.mx[cl] + f.mx[cr]) - 0.5 * c * (f.n[cr] - f.n[cl]);
                const double fmx = 0.5 * c * (tens[cl].p[0][0] + tens[cr].p[0][0]) -
                                   0.5 * c * (f.mx[cr] - f.mx[cl]);
                const double fmy = 0.5 * c * (tens[cl].p[1][0] + tens[cr].p[1][0]) -
                                   0.5 * c * (f.my[cr] - f.my[cl]);
                out.n[cl] -= fn * inv_dx;
                out.n[cr] += fn * inv_dx;
                out.mx[cl] -= fmx * inv_dx;
                out.mx[cr] += fmx * inv_dx;
                out.my[cl] -= fmy * inv_dx;
                out.my[cr] += fmy * inv_dx;
            }
            if (sh.dim == 2) {
                const int ct = idx(i, j + 1);
                const double fn = 0.5 * c * (f.my[cl] + f.my[ct]) - 0.5 * c * (f.n[ct] - f.n[cl]);
                const double fmx = 0.5 * c * (tens[cl].p[0][1] + tens[ct].p[0][1]) -
                                   0.5 * c * (f.mx[ct] - f.mx[cl]);
                const double fmy = 0.5 * c * (tens[cl].p[1][1] + tens[ct].p[1][1]) -
                                   0.5 * c * (f.my[ct] - f.my[cl]);
                out.n[cl] -= fn * inv_dx;
                out.n[ct] += fn * inv_dx;
                out.mx[cl] -= fmx * inv_dx;
                out.mx[ct] += fmx * inv_dx;
                out.my[cl] -= fmy * inv_dx;
                out.my[ct] += fmy * inv_dx;
            }
        }
    }

    // Force source +- F_j Q_ij with F = -grad V by central differences.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int cc = idx(i, j);
            const double fx =
                -(g.potential(idx(i + 1, j)) - g.potential(idx(i - 1, j))) * 0.5 * inv_dx;
            const double fy = sh.dim == 2 ? -(g.potential(idx(i, j + 1)) -
                                              g.potential(idx(i, j - 1))) *
                                                0.5 * inv_dx
                                          : 0.0;
            out.mx[cc] += sign * (fx * tens[cc].q[0][0] + fy * tens[cc].q[0][1]);
            out.my[cc] += sign * (fx * tens[cc].q[1][0] + fy * tens[cc].q[1][1]);
        }
    }
}

int apply_density_floor(FieldGrid& g, double floor_rel) {
    int floored = 0;
    for (Species sp : {Species::electron, Species::hole}) {
        auto& f = g.species(sp);
        const double nmax = *std::max_element(f.n.begin(), f.n.end());
        const double floor = floor_rel * nmax;
        for (double& n : f.n) {
            if (n < floor) {
                n = floor;
                ++floored;
            }
        }
    }
    return floored;
}

void check_invariants(const FieldGrid& g) {
    for (Species sp : {Species::electron, Species::hole}) {
        const auto& f = g.species(sp);
        for (int c = 0; c < g.shape.cells(); ++c) {
            if (!(f.n[c] > 0.0))
                throw StepRejected("hyperbolic_step: density lost positivity in cell " +
                                   std::to_string(c));
            const double u = std::hypot(f.mx[c], f.my[c]) / f.n[c];
            if (!(u < 1.0))
                throw StepRejected("hyperbolic_step: |u| reached 1 in cell " +
                                   std::to_string(c));
        }
    }
}

}  // namespace

void GridShape::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridShape: dim must be 1 or 2");
    if (nx < 2 || (dim == 2 && ny < 2) || (dim == 1 && ny != 1))
        throw std::invalid_argument("GridShape: bad cell counts");
    if (!(dx > 0.0)) throw std::invalid_argument("GridShape: dx must be positive");
}

void SpeciesField::resize(int cells) {
    n.assign(cells, 0.0);
    mx.assign(cells, 0.0);
    my.assign(cells, 0.0);
}

FieldGrid FieldGrid::uniform(const GridShape& shape, double n_plus, double n_minus) {
    shape.validate();
    FieldGrid g;
    g.shape = shape;
    const int cells = shape.cells();
    g.electrons.resize(cells);
    g.holes.resize(cells);
    std::fill(g.electrons.n.begin(), g.electrons.n.end(), n_plus);
    std::fill(g.holes.n.begin(), g.holes.n.end(), n_minus);
    g.v_int.assign(cells, 0.0);
    g.v_ext.assign(cells, 0.0);
    g.warm_e.assign(cells, {});
    g.warm_h.assign(cells, {});
    return g;
}

double stable_dt(const GridShape& shape, const SolverConfig& cfg, const PhysicalScales& scales) {
    return cfg.cfl * shape.dx / (scales.c * shape.dim);
}

StepDiagnostics hyperbolic_step(FieldGrid& grid, const SolverConfig& cfg,
                                const PhysicalScales& scales, double dt) {
    grid.shape.validate();
    if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0))
        throw std::invalid_argument("hyperbolic_step: CFL must be in (0, 1)");
    if (dt > stable_dt(grid.shape, cfg, scales) * (1.0 + 1e-12))
        throw std::invalid_argument("hyperbolic_step: dt exceeds the CFL bound");

    StepDiagnostics diag;
    diag.floored_cells = apply_density_floor(grid, cfg.density_floor_rel);

    const SpeciesField elec0 = grid.electrons;
    const SpeciesField hole0 = grid.holes;
    const int cells = grid.shape.cells();

    std::vector<CellTensors> tens;
    Rates rate;
    auto advance = [&](SpeciesField& f, const SpeciesField& base, double weight_base,
                       const SpeciesField& ref, double weight_ref, const Rates& r, double h) {
        for (int c = 0; c < cells; ++c) {
            f.n[c] = weight_base * base.n[c] + weight_ref * ref.n[c] + h * r.n[c];
            f.mx[c] = weight_base * base.mx[c] + weight_ref * ref.mx[c] + h * r.mx[c];
            f.my[c] = weight_base * base.my[c] + weight_ref * ref.my[c] + h * r.my[c];
        }
    };

    // Stage 1: U1 = U0 + dt L(U0).
    Rates rate_e1, rate_h1;
    closure_pass(grid, Species::electron, cfg, scales, tens);
    accumulate_rates(grid, Species::electron, tens, scales, rate_e1);
    closure_pass(grid, Species::hole, cfg, scales, tens);
    accumulate_rates(grid, Species::hole, tens, scales, rate_h1);
    advance(grid.electrons, elec0, 1.0, elec0, 0.0, rate_e1, dt);
    advance(grid.holes, hole0, 1.0, hole0, 0.0, rate_h1, dt);
    if (cfg.poisson) poisson_solve(grid, cfg.gamma);

    // Stage 2: U = (U0 + U1 + dt L(U1)) / 2.
    const SpeciesField elec1 = grid.electrons;
    const SpeciesField hole1 = grid.holes;
    closure_pass(grid, Species::electron, cfg, scales, tens);
    accumulate_rates(grid, Species::electron, tens, scales, rate);
    advance(grid.electrons, elec0, 0.5, elec1, 0.5, rate, 0.5 * dt);
    closure_pass(grid, Species::hole, cfg, scales, tens);
    accumulate_rates(grid, Species::hole, tens, scales, rate);
    advance(grid.holes, hole0, 0.5, hole1, 0.5, rate, 0.5 * dt);

    // Relaxation: exact exponential decay of n u over the step.
    if (std::isfinite(cfg.tau0)) {
        if (!(cfg.tau0 > 0.0)) throw std::invalid_argument("hyperbolic_step: tau0 must be > 0");
        const double decay = std::exp(-dt / cfg.tau0);
        for (Species sp : {Species::electron, Species::hole}) {
            auto& f = grid.species(sp);
            for (int c = 0; c < cells; ++c) {
                f.mx[c] *= decay;
                f.my[c] *= decay;
            }
        }
    }

    check_invariants(grid);
    if (cfg.poisson) poisson_solve(grid, cfg.gamma);
    return diag;
}

double total_mass(const FieldGrid& grid, Species s) {
    const auto& f = grid.species(s);
    double sum = 0.0;
    for (double v : f.n) sum += v;
    return sum * grid.shape.cell_volume();
}

FreeEnergyReport free_energy_report(FieldGrid& grid, const SolverConfig& cfg,
                                    const PhysicalScales& scales,
                                    const std::vector<double>* v_prev, double dt) {
    FreeEnergyReport rep;
    const int cells = grid.shape.cells();
    const double dv = grid.shape.cell_volume();
    for (Species sp : {Species::electron, Species::hole}) {
        auto& f = grid.species(sp);
        auto& warm = grid.warm(sp);
        for (int c = 0; c < cells; ++c) {
            const closure::MomentState st{f.n[c], f.mx[c] / f.n[c], f.my[c] / f.n[c]};
            const auto m = closure::invert_constraints(st, scales, cfg.inversion_tol, warm[c]);
            warm[c] = m;
            rep.total += closure::free_energy_density(st, m, grid.potential(c), scales, sp) * dv;
        }
    }
    if (v_prev != nullptr && dt > 0.0) {
        for (int c = 0; c < cells; ++c) {
            const double dvdt = (grid.potential(c) - (*v_prev)[c]) / dt;
            rep.source += (grid.electrons.n[c] - grid.holes.n[c]) * dvdt * dv;
        }
    }
    return rep;
}

}  // namespace grafluid::fields
