#pragma once

#include <functional>
#include <vector>

#include "grafluid/common.hpp"
#include "grafluid/field_solvers.hpp"
#include "grafluid/scales.hpp"

// Asymptotic models of the moment system: drift-diffusion in the general /
// high-temperature / zero-temperature regimes, the linear-response wave
// equation for the density, and the collimation dynamics (|u| = 1), whose
// stationary states behave like geometrical optics with refractive index
// e^{-+ V / k_B T}.

namespace grafluid::reduced {

using fields::GridShape;

enum class DiffusionRegime { general, maxwell_boltzmann, degenerate };

struct DiffusionConfig {
    DiffusionRegime regime = DiffusionRegime::general;
    double tau0 = 1.0;
    Species species = Species::electron;
};

/// Mobility factor mu(n) of the drift term dt n = D div(grad n +- mu grad V):
/// general (n_T / k_B T) phi_1(phi_2^{-1}(n / n_T)), Maxwell-Boltzmann
/// n / k_B T, degenerate sqrt(n) / (c hbar sqrt(pi)).
double mobility(DiffusionRegime regime, double n, const PhysicalScales& scales);

/// Diffusion coefficient D = tau_0 c^2 / 2 (temperature independent; the
/// carriers move at fixed speed c).
double diffusion_coefficient(double tau0, const PhysicalScales& scales);

/// Explicit stability bound dx^2 / (2 dim D).
double drift_diffusion_max_dt(const GridShape& shape, const DiffusionConfig& cfg,
                              const PhysicalScales& scales);

/// One conservative flux-form update. Face mobilities use the averaging that
/// makes the regime's zero-flux steady state an exact discrete fixed point
/// (logarithmic density mean for Maxwell-Boltzmann, sqrt-density mean for the
/// degenerate gas). Throws on stability violation or density loss.
void drift_diffusion_step(std::vector<double>& n, const GridShape& shape,
                          const std::vector<double>& v, const DiffusionConfig& cfg,
                          const PhysicalScales& scales, double dt);

/// Linear-response wave equation dtt n = (c^2/2) Lap n +- coeff Lap V with
/// the mobility factor frozen at the background density.
struct WaveState {
    std::vector<double> prev, cur;
    double background_n = 0.0;
};

double wave_max_dt(const GridShape& shape, const PhysicalScales& scales);

/// Leapfrog update; after the call `cur` holds the new level and `prev` the
/// old one.
void wave_step(WaveState& state, const GridShape& shape, const std::vector<double>& v,
               Species species, const PhysicalScales& scales, double dt);

/// Collimation direction field; |u| = 1 is preserved by the dynamics and is
/// monitored (not projected) under discretization drift.
struct CollimationField {
    std::vector<double> ux, uy;
};

/// The force coupling of the collimation equation: the Maxwell-Boltzmann
/// limit rotates u at rate +-(c/k_B T)(F . u_perp); in the degenerate limit
/// the force terms vanish identically and the field obeys the inviscid
/// Burgers transport alone.
enum class CollimationForce { maxwell_boltzmann, none };

double collimation_max_dt(const GridShape& shape, const PhysicalScales& scales);

/// Upwind transport of u by c u plus an exact rotation for the force term
/// (the source is orthogonal to u, so it cannot change |u|).
void collimation_step(CollimationField& field, const GridShape& shape,
                      const std::vector<double>& v, Species species,
                      const PhysicalScales& scales, double dt,
                      CollimationForce force = CollimationForce::maxwell_boltzmann);

/// max over cells of | |u| - 1 |.
double max_norm_drift(const CollimationField& field);

/// Discrete divergence of e^{-+ K} u_perp, K = V / k_B T; vanishes (to
/// discretization order) on converged stationary collimation states.
std::vector<double> geometric_optics_residual(const CollimationField& field,
                                              const GridShape& shape,
                                              const std::vector<double>& v, Species species,
                                              const PhysicalScales& scales);

// --- characteristics of the collimation equation ---------------------------

struct RaySample {
    double t = 0, x = 0, y = 0, ux = 0, uy = 0;
};

struct PotentialFn {
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> force;  // -grad V
};

/// Smoothed potential step V = height / (1 + e^{-2 (x - x_center) / width}),
/// the refraction benchmark profile.
PotentialFn tanh_step_potential(double height, double width, double x_center = 0.0);

/// RK4 integration of dx/dt = c u, du/dt = +-(c/k_B T)(F . u_perp) u_perp.
/// |u| is an exact invariant of the flow.
std::vector<RaySample> trace_collimation_ray(double x0, double y0, double angle0, double t_end,
                                             double dt, const PotentialFn& pot, Species species,
                                             const PhysicalScales& scales);

}  // namespace grafluid::reduced
