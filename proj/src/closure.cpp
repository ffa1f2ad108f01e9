#include "grafluid/closure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grafluid/special_functions.hpp"

namespace grafluid::closure {

namespace kn = grafluid::kernels;

namespace {

constexpr double u_isotropic_cutoff = 1e-12;  // below this the u = 0 closed forms apply

double sq(double x) { return x * x; }

void require_admissible(const MomentState& s) {
    if (!(s.n > 0.0)) throw std::domain_error("closure: requires n > 0");
    if (!(s.u_abs() < 1.0)) throw std::domain_error("closure: requires |u| < 1");
}

}  // namespace

double MomentState::u_abs() const { return std::hypot(ux, uy); }

KernelSet eval_kernel_set(double a, double b) {
    const kn::KernelOptions opts{};
    KernelSet k;
    if (a < -b - opts.mb_margin) {
        // Deep Maxwell-Boltzmann region: all kernels share the factor
        // e^{A+B}, factored so their ratios stay finite when it underflows.
        const double pre = std::exp(a + b);
        k.i02 = pre * sf::bessel_i_scaled(0, b);
        k.i12 = pre * sf::bessel_i_scaled(1, b);
        k.i22 = pre * sf::bessel_i_scaled(2, b);
        k.i01 = k.i02;
        k.i11 = k.i12;
        k.i21 = k.i22;
        return k;
    }
    k.i02 = kn::kernel(0, 2.0, a, b, opts);
    k.i12 = kn::kernel(1, 2.0, a, b, opts);
    k.i22 = kn::kernel(2, 2.0, a, b, opts);
    k.i01 = kn::kernel(0, 1.0, a, b, opts);
    k.i11 = kn::kernel(1, 1.0, a, b, opts);
    k.i21 = kn::kernel(2, 1.0, a, b, opts);
    return k;
}

MomentState forward_map(const Multipliers& m, const PhysicalScales& scales) {
    if (!(m.b >= 0.0)) throw std::domain_error("forward_map: requires B >= 0");
    const double n_t = scales.thermal_density();
    MomentState out;
    if (m.b == 0.0) {
        out.n = n_t * kn::kernel(0, 2.0, m.a, 0.0);
        out.ux = out.uy = 0.0;
        return out;
    }
    const KernelSet k = eval_kernel_set(m.a, m.b);
    const double u = k.i12 / k.i02;
    out.n = n_t * k.i02;
    out.ux = u * std::cos(m.theta_b);
    out.uy = u * std::sin(m.theta_b);
    return out;
}

Mat2 forward_jacobian(const Multipliers& m) {
    // d(I_0^2, I_1^2) / d(A, B); entries follow from d phi_s / dx = phi_{s-1}.
    const KernelSet k = eval_kernel_set(m.a, m.b);
    return Mat2{{{k.i01, k.i11}, {k.i11, 0.5 * (k.i01 + k.i21)}}};
}

Multipliers invert_constraints(const MomentState& target, const PhysicalScales& scales,
                               double tol, const std::optional<Multipliers>& seed) {
    require_admissible(target);
    if (!(tol > 0.0)) throw std::domain_error("invert_constraints: requires tol > 0");
    const double rho = target.n / scales.thermal_density();
    const double u = target.u_abs();
    const double theta = u > 0.0 ? std::atan2(target.uy, target.ux) : 0.0;

    double a, b;
    if (seed) {
        a = seed->a;
        b = std::max(0.0, seed->b);
    } else if (rho < 0.1) {
        // Maxwell-Boltzmann branch: B from the Bessel ratio, A from the
        // density constraint e^A I_0(B) = rho.
        b = sf::bessel_i_ratio_inverse(u);
        a = std::log(rho) - b - std::log(sf::bessel_i_scaled(0, b));
    } else if (rho > 10.0) {
        // Degenerate branch: direction from the F-ratio, radius from
        // R^2 F_0^2(psi) = rho.
        const double psi = kn::degenerate_ratio_inverse(u);
        const double r = std::sqrt(rho / kn::degenerate_kernel(0, 2.0, psi));
        a = r * std::cos(psi);
        b = r * std::sin(psi);
    } else {
        // Linear response around B = 0.
        a = sf::fermi_phi_inverse(rho);
        b = 2.0 * u * rho / sf::fermi_phi(1.0, a);
    }

    const auto residual = [&](double a_, double b_, KernelSet& k) {
        k = eval_kernel_set(a_, b_);
        const double f1 = k.i02 / rho - 1.0;
        const double f2 = k.i12 / k.i02 - u;
        return std::array<double, 2>{f1, f2};
    };

    KernelSet k;
    auto f = residual(a, b, k);
    double fn = std::hypot(f[0], f[1]);
    for (int it = 0; it < 80; ++it) {
        if (std::abs(f[0]) <= tol && std::abs(f[1]) <= tol)
            return Multipliers{a, b, b > 0.0 ? theta : 0.0};
        // Analytic Jacobian of the scaled residuals.
        const double j11 = k.i01 / rho;
        const double j12 = k.i11 / rho;
        const double j21 = k.i11 / k.i02 - k.i12 * k.i01 / sq(k.i02);
        const double j22 = 0.5 * (k.i01 + k.i21) / k.i02 - k.i12 * k.i11 / sq(k.i02);
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 0.0))
            throw NumericalError("invert_constraints: singular Jacobian");
        const double da = (f[0] * j22 - f[1] * j12) / det;
        const double db = (j11 * f[1] - j21 * f[0]) / det;
        // Damped step with reflection of negative B onto the boundary.
        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            const double a_try = a - step * da;
            const double b_try = std::max(0.0, b - step * db);
            KernelSet k_try;
            const auto f_try = residual(a_try, b_try, k_try);
            const double fn_try = std::hypot(f_try[0], f_try[1]);
            if (fn_try < fn || fn_try <= tol) {
                a = a_try;
                b = b_try;
                f = f_try;
                fn = fn_try;
                k = k_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw NumericalError("invert_constraints: damping failed to reduce residual");
    }
    throw NumericalError("invert_constraints: Newton did not converge");
}

ClosureTensors closure_tensors(const MomentState& state, const Multipliers& m,
                               const PhysicalScales& scales) {
    require_admissible(state);
    const KernelSet k = eval_kernel_set(m.a, m.b);
    ClosureTensors out;
    out.p_par = 0.5 * (k.i02 + k.i22) / k.i02;
    out.p_perp = 0.5 * (k.i02 - k.i22) / k.i02;
    out.q_par = 0.5 * (k.i01 - k.i21) / k.i02;
    out.q_perp = 0.5 * (k.i01 + k.i21) / k.i02;

    const double n = state.n;
    const double q_unit = scales.c / scales.k_B_T;
    const double u = state.u_abs();
    if (u < u_isotropic_cutoff) {
        // Isotropic forms at the removable u = 0 singularity (B = 0 there,
        // where p_par = p_perp = 1/2 and q_par = q_perp).
        for (int i = 0; i < 2; ++i) {
            out.pressure[i][i] = 0.5 * n;
            out.force_coupling[i][i] = q_unit * n * out.q_par;
        }
        return out;
    }
    const double ex = state.ux / u, ey = state.uy / u;  // unit drift frame
    const double px = -ey, py = ex;
    const double pp[2] = {ex, ey};
    const double qq[2] = {px, py};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.pressure[i][j] = n * (out.p_par * pp[i] * pp[j] + out.p_perp * qq[i] * qq[j]);
            out.force_coupling[i][j] =
                q_unit * n * (out.q_par * pp[i] * pp[j] + out.q_perp * qq[i] * qq[j]);
        }
    }
    return out;
}

double regime_x(double u_abs) {
    if (!(u_abs >= 0.0 && u_abs < 1.0))
        throw std::domain_error("regime_x: requires |u| in [0, 1)");
    const double b = sf::bessel_i_ratio_inverse(u_abs);
    return 0.5 * (sf::bessel_i_scaled(0, b) + sf::bessel_i_scaled(2, b)) /
           sf::bessel_i_scaled(0, b);
}

DegenerateScalars regime_yz(double u_abs) {
    if (!(u_abs >= 0.0 && u_abs < 1.0))
        throw std::domain_error("regime_yz: requires |u| in [0, 1)");
    const double psi = kn::degenerate_ratio_inverse(u_abs);
    const double f02 = kn::degenerate_kernel(0, 2.0, psi);
    const double f22 = kn::degenerate_kernel(2, 2.0, psi);
    const double f01 = kn::degenerate_kernel(0, 1.0, psi);
    const double f21 = kn::degenerate_kernel(2, 1.0, psi);
    DegenerateScalars out;
    out.y = 0.5 * (f02 + f22) / f02;
    const double denom = 2.0 * std::sqrt(2.0 * f02);
    out.z = (f01 - f21) / denom;
    out.z_perp = (f01 + f21) / denom;
    return out;
}

double free_energy_density(const MomentState& state, const Multipliers& m, double v,
                           const PhysicalScales& scales, Species species) {
    const double n_t = scales.thermal_density();
    const double i03 = kn::kernel(0, 3.0, m.a, m.b);
    const double u = state.u_abs();
    return scales.k_B_T * (m.a * state.n + m.b * state.n * u - n_t * i03) +
           species_sign(species) * state.n * v;
}

std::array<double, 2> free_energy_flux(const MomentState& state, const Multipliers& m, double v,
                                       const PhysicalScales& scales, Species species) {
    const double n_t = scales.thermal_density();
    const double u = state.u_abs();
    const double alpha1 = m.a + species_sign(species) * v / scales.k_B_T;
    std::array<double, 2> flux{0.0, 0.0};
    if (u < u_isotropic_cutoff && m.b == 0.0) return flux;  // I_1^3(A, 0) = 0
    const KernelSet k = eval_kernel_set(m.a, m.b);
    const double p_par = 0.5 * (k.i02 + k.i22) / k.i02;
    const double i13 = kn::kernel(1, 3.0, m.a, m.b);
    const double ebx = std::cos(m.theta_b), eby = std::sin(m.theta_b);
    const double ck = scales.c * scales.k_B_T;
    flux[0] = ck * (alpha1 * state.n * state.ux + m.b * state.n * p_par * ebx - n_t * i13 * ebx);
    flux[1] = ck * (alpha1 * state.n * state.uy + m.b * state.n * p_par * eby - n_t * i13 * eby);
    return flux;
}

}  // namespace grafluid::closure
