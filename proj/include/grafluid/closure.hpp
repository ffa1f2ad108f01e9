#pragma once

#include <array>
#include <optional>

#include "grafluid/angular_kernels.hpp"
#include "grafluid/common.hpp"
#include "grafluid/scales.hpp"

// Maximum-entropy closure of the carrier moment system: the constraint map
// between Lagrange multipliers (A, B, theta_B) and hydrodynamic moments
// (n, u), its Newton inversion (a global diffeomorphism, so the inversion is
// well posed everywhere in the admissible set n > 0, |u| < 1), the closure
// tensors P_ij / Q_ij entering the momentum flux and the force coupling, the
// single-variable regime functions X (high temperature) and Y, Z, Z_perp
// (zero temperature), and the free-energy density that certifies
// hyperbolicity.

namespace grafluid::closure {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Lagrange multipliers of the anisotropic Fermi-Dirac equilibrium. B >= 0;
/// theta_B is the direction of the bias vector and is canonicalized to 0
/// when B = 0.
struct Multipliers {
    double a = 0.0;
    double b = 0.0;
    double theta_b = 0.0;
};

/// Hydrodynamic unknowns per species: number density and the dimensionless
/// mean pseudomomentum direction. Admissible states have n > 0, |u| < 1.
struct MomentState {
    double n = 0.0;
    double ux = 0.0;
    double uy = 0.0;

    double u_abs() const;
};

/// Closure tensors and their dimensionless scalar coefficients.
/// P_ij = (n/|u|^2) (p_par u_i u_j + p_perp u_perp_i u_perp_j), and
/// Q_ij = (c/k_B T) (n/|u|^2) (q_par u_i u_j + q_perp u_perp_i u_perp_j);
/// at u = 0 both reduce to isotropic forms (removable singularity).
/// Always p_par + p_perp = 1, 1/2 <= p_par < 1, 0 < q_par < 1/2 and
/// 0 < q_perp < 1 - q_par.
struct ClosureTensors {
    Mat2 pressure{};        // P_ij, units of n
    Mat2 force_coupling{};  // Q_ij
    double p_par = 0.0, p_perp = 0.0;
    double q_par = 0.0, q_perp = 0.0;
};

/// Moments generated by a multiplier set:
///   n = n_T I_0^2(A, B),   u = (I_1^2 / I_0^2) (cos theta_B, sin theta_B).
MomentState forward_map(const Multipliers& m, const PhysicalScales& scales);

/// Jacobian of (A, B) -> (I_0^2, I_1^2); its determinant is proportional to
/// the variance of cos(theta) under the phi_1 weight and is strictly
/// positive.
Mat2 forward_jacobian(const Multipliers& m);

/// Inverts the constraint map: finds multipliers reproducing the target
/// moments with relative error <= tol in n and absolute error <= tol in |u|.
/// Damped Newton with the analytic Jacobian, seeded per regime (Maxwell-
/// Boltzmann branch for dilute states, degenerate branch for dense ones,
/// linear response in between) or from `seed` when warm-starting.
/// Throws NumericalError on non-convergence, which on the validated domain
/// indicates a defect rather than an expected failure mode.
Multipliers invert_constraints(const MomentState& target, const PhysicalScales& scales,
                               double tol = 1e-10,
                               const std::optional<Multipliers>& seed = std::nullopt);

/// Closure tensors at a state with known multipliers (as produced by
/// invert_constraints for that state).
ClosureTensors closure_tensors(const MomentState& state, const Multipliers& m,
                               const PhysicalScales& scales);

/// High-temperature pressure anisotropy X(|u|) = (I0(B) + I2(B)) / (2 I0(B))
/// with B solving I1(B)/I0(B) = |u|; increases monotonically from 1/2 to 1.
double regime_x(double u_abs);

/// Zero-temperature regime functions of |u|.
struct DegenerateScalars {
    double y = 0.0;
    double z = 0.0;
    double z_perp = 0.0;
};
DegenerateScalars regime_yz(double u_abs);

/// Local free-energy density
///   <eps> = k_B T (A n + B n |u| - n_T I_0^3(A, B)) +- n V,
/// the strictly convex entropy of the moment system (+ electrons, - holes).
double free_energy_density(const MomentState& state, const Multipliers& m, double v,
                           const PhysicalScales& scales, Species species);

/// Spatial flux of the free energy, reduced to phi_3-level kernels:
///   c <nu_i eps> = c k_B T [ (A +- V/k_B T) n u_i + B n p_par u_i / |u|
///                            - n_T e_B_i I_1^3(A, B) ].
std::array<double, 2> free_energy_flux(const MomentState& state, const Multipliers& m, double v,
                                       const PhysicalScales& scales, Species species);

/// The five kernels used by the Newton iteration and the tensor assembly,
/// evaluated with consistent regime dispatch.
struct KernelSet {
    double i02 = 0.0, i12 = 0.0, i22 = 0.0;
    double i01 = 0.0, i11 = 0.0, i21 = 0.0;
};
KernelSet eval_kernel_set(double a, double b);

}  // namespace grafluid::closure
