#pragma once

#include <vector>

#include "grafluid/closure.hpp"
#include "grafluid/common.hpp"
#include "grafluid/scales.hpp"

// Time integration of the bipolar moment system
//
//   dt n  + c di (n u_i) = 0
//   dt (n u_i) + c dj P_ij = +- F_j Q_ij - n u_i / tau_0,   F = -grad V,
//
// on a uniform periodic grid (1D or 2D), with the self-consistent part of the
// potential solved from gamma (-Laplace)^{1/2} V_int = n_+ - n_- spectrally.
// The scheme is first-order Rusanov with wave-speed bound c (all signal
// speeds are below the Fermi speed) and SSP-RK2 in time; the relaxation term
// is linear in n u and is integrated exactly per step, so stiff tau_0 costs
// nothing.

namespace grafluid::fields {

struct GridShape {
    int dim = 1;
    int nx = 1, ny = 1;  // ny == 1 in 1D
    double dx = 1.0;

    int cells() const { return nx * ny; }
    double cell_volume() const { return dim == 1 ? dx : dx * dx; }
    double length_x() const { return nx * dx; }
    double length_y() const { return ny * dx; }
    int index(int i, int j) const { return j * nx + i; }
    void validate() const;
};

/// Conservative variables per cell: density n and momentum-direction density
/// (n u_x, n u_y).
struct SpeciesField {
    std::vector<double> n, mx, my;
    void resize(int cells);
};

struct FieldGrid {
    GridShape shape;
    SpeciesField electrons, holes;
    std::vector<double> v_int, v_ext;  // internal (Poisson) and external potential
    std::vector<closure::Multipliers> warm_e, warm_h;  // Newton warm starts per cell

    static FieldGrid uniform(const GridShape& shape, double n_plus, double n_minus);

    double potential(int cell) const { return v_int[cell] + v_ext[cell]; }
    SpeciesField& species(Species s) { return s == Species::electron ? electrons : holes; }
    const SpeciesField& species(Species s) const {
        return s == Species::electron ? electrons : holes;
    }
    std::vector<closure::Multipliers>& warm(Species s) {
        return s == Species::electron ? warm_e : warm_h;
    }
};

struct SolverConfig {
    double cfl = 0.4;
    double tau0 = relaxation_off;
    bool poisson = false;
    double gamma = 1.0;
    int threads = 1;
    double inversion_tol = 1e-11;
    double density_floor_rel = 1e-14;  // cells below this fraction of max(n) are floored
};

/// Thrown when a step leaves the admissible set (n <= 0 or |u| >= 1 in some
/// cell); carries the offending cell in the message.
struct StepRejected : NumericalError {
    using NumericalError::NumericalError;
};

struct StepDiagnostics {
    int floored_cells = 0;
};

/// Largest stable step, cfl * dx / (c * dim).
double stable_dt(const GridShape& shape, const SolverConfig& cfg, const PhysicalScales& scales);

/// One conservative SSP-RK2 step of size dt for both species, including the
/// force sources and (when enabled) the Poisson refresh per stage. Requires
/// dt <= stable_dt. Total density per species is conserved to round-off.
StepDiagnostics hyperbolic_step(FieldGrid& grid, const SolverConfig& cfg,
                                const PhysicalScales& scales, double dt);

/// Solves gamma (-Laplace)^{1/2} V_int = (n_+ - n_-) - mean on the periodic
/// grid through the spectral symbol |k| and stores the zero-mean result in
/// grid.v_int.
void poisson_solve(FieldGrid& grid, double gamma);

double total_mass(const FieldGrid& grid, Species s);

struct FreeEnergyReport {
    double total = 0.0;          // integral of <eps_+> + <eps_->
    double boundary_flux = 0.0;  // identically zero on periodic grids
    double source = 0.0;         // integral of (n_+ - n_-) dV/dt (time-differenced)
};

/// Free-energy diagnostic. When v_prev/dt are given, the source term of the
/// balance law is estimated by time differencing of the total potential.
/// Refreshes the per-cell multiplier caches as a side effect.
FreeEnergyReport free_energy_report(FieldGrid& grid, const SolverConfig& cfg,
                                    const PhysicalScales& scales,
                                    const std::vector<double>* v_prev = nullptr,
                                    double dt = 0.0);

}  // namespace grafluid::fields
