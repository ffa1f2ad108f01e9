#pragma once

#include <span>

// The angular moment family
//
//   I_N^s(A, B) = (1/pi) int_0^pi cos(N theta) phi_s(A + B cos theta) dtheta,
//   A real, B >= 0, N >= 0,
//
// which carries every closure moment of the carrier gas, together with its
// four evaluation routes: adaptive quadrature, the Bessel-weighted power
// series in B, the high-temperature asymptote e^A I_N(B) (valid deep in the
// half-plane A < -B), and the zero-temperature scaling form R^s F_N^s(psi)
// in polar coordinates A = R cos psi, B = R sin psi.

namespace grafluid::kernels {

/// Switch-over thresholds for the dispatching evaluator. The asymptotic
/// regimes have no error terms attached to them, so the defaults are
/// empirical and validated by the cross-method agreement suite.
struct KernelOptions {
    double series_b_max = 1.0;      // series when B <= this ...
    double series_a_max = 2.0;      // ... and |A| <= this
    double mb_margin = 25.0;        // asymptote when A < -B - margin
    double degenerate_radius = 1e4; // scaling form when hypot(A,B) exceeds this and A > -B
    double quad_tol = 1e-12;        // relative-to-scale quadrature tolerance
};

/// I_N^s by composite Gauss-Legendre quadrature with panel doubling until two
/// successive refinements agree within tol (absolute, floored at the rounding
/// level of the result). Throws NumericalError when the panel budget is
/// exhausted. Valid for s > 0.
double kernel_quadrature(int harmonic, double order, double a, double b, double tol = 1e-12);

/// I_N^s by the series sum_n phi_{s-2n-N}(A) / (n! (N+n)!) (B/2)^{N+2n},
/// truncated adaptively. Throws NumericalError if terms fail to converge or
/// overflow before the cap (callers fall back to quadrature).
double kernel_series(int harmonic, double order, double a, double b, int n_max = 90);

/// e^A I_N(B); requires A < -B (throws std::domain_error otherwise).
double kernel_mb_asymptote(int harmonic, double a, double b);

/// Integration cutoff C(A, B) of the degenerate asymptote: arccos(-A/B) for
/// -B < A < B, pi for A >= B. Requires A > -B.
double cutoff_angle(double a, double b);

/// F_N^s(psi) = (1/(pi Gamma(s+1))) int_0^{C(psi)} cos(N theta)
/// (cos psi + sin psi cos theta)^s dtheta, for 0 <= psi < 3 pi / 4.
double degenerate_kernel(int harmonic, double order, double psi);

/// Cutoff C(psi): pi for psi <= pi/4, arccos(-cot psi) above.
double degenerate_cutoff(double psi);

/// Solves F_1^2(psi) / F_0^2(psi) = u for psi in [0, 3 pi / 4); the ratio is
/// the zero-temperature drift magnitude and increases monotonically 0 -> 1.
double degenerate_ratio_inverse(double u);

/// Dispatching evaluator choosing among the four routes by (A, B) region.
double kernel(int harmonic, double order, double a, double b, const KernelOptions& opts = {});

/// Moment of a polynomial r against the phi_s weight,
///   (1/pi) int_0^pi r(cos theta) phi_s(A + B cos theta) dtheta
///     = sum_N alpha_N I_N^s(A, B),
/// where coeffs holds the Chebyshev-basis coefficients alpha_N of r.
double chebyshev_moment(std::span<const double> coeffs, double order, double a, double b,
                        const KernelOptions& opts = {});

}  // namespace grafluid::kernels
