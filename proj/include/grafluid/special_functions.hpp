#pragma once

// Fermi-Dirac integrals phi_s, their power series and inverse, the Dirichlet
// eta function supplying the series coefficients, and modified Bessel
// functions I_N. These are the scalar building blocks of the angular moment
// kernels; everything here is a pure function of its arguments and safe to
// call concurrently.

namespace grafluid::sf {

/// Fermi-Dirac integral phi_s(x) = (1/Gamma(s)) int_0^inf t^{s-1}/(e^{t-x}+1) dt
/// for s > 0, extended to all real x and to s <= 0 through the polylogarithm
/// identity phi_s(x) = -Li_s(-e^x).
///
/// Evaluation paths: s in {...,-2,-1,0,1,2,3} uses closed or recursive forms
/// (logistic-derivative representation for negative integers, dilogarithm /
/// trilogarithm reflection for s = 2, 3); other s > 0 falls back to adaptive
/// quadrature of the defining integral. Non-integer s <= 0 is not supported.
///
/// Accuracy note for deep negative integer orders: values are accurate
/// relative to the natural magnitude s! / (x^2 + pi^2)^{(|s|+1)/2}; near the
/// oscillatory zeros of that envelope the *relative* error can be large while
/// the absolute error stays at that scale, which is what the moment series
/// requires.
double fermi_phi(double s, double x);

/// Power series phi_s(x) = sum_k h(s-k) x^k / k!, convergent for |x| < pi.
/// Truncated adaptively at relative term size 2^-52; throws std::domain_error
/// for |x| >= pi and NumericalError if the tolerance is not reached within
/// the term cap (callers escalate to fermi_phi / the integral path).
double fermi_phi_series(double s, double x);

/// Defining integral of phi_s, s > 0. Adaptive composite Gauss-Legendre with
/// an algebraic-endpoint substitution for s < 1; this is the escalation and
/// cross-checking path for the closed forms.
double fermi_phi_integral(double s, double x);

/// Inverse of phi_2: returns x with |phi_2(x) - y| <= 1e-12 * max(1, y).
/// Bracketed Newton using phi_2' = phi_1; requires y > 0.
double fermi_phi_inverse(double y);

/// h(s) = -Li_s(-1) = (1 - 2^{1-s}) zeta(s), the Dirichlet eta function.
/// Entire in s; h(1) = ln 2 is the removable-singularity value.
double dirichlet_eta(double s);

/// Modified Bessel function of the first kind I_n(x), n >= 0, x >= 0.
/// Power series below x = 15, uniform asymptotic expansion above; overflows
/// to +inf for x beyond ~709 (use bessel_i_scaled there).
double bessel_i(int n, double x);

/// e^{-x} I_n(x); stable for arbitrarily large x.
double bessel_i_scaled(int n, double x);

/// Solves I_1(B)/I_0(B) = u for B >= 0, u in [0, 1). The ratio increases
/// monotonically from 0 to 1, so the root is unique.
double bessel_i_ratio_inverse(double u);

}  // namespace grafluid::sf
