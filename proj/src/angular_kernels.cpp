#include "grafluid/angular_kernels.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grafluid/common.hpp"
#include "grafluid/special_functions.hpp"

namespace grafluid::kernels {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

struct GaussRule {
    std::array<double, 32> x{}, w{};
};

const GaussRule& gauss32() {
    static const GaussRule rule = [] {
        GaussRule r;
        constexpr int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            double p1 = t, p0 = 1.0, dp = 1.0;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            r.x[i] = -t;
            r.x[n - 1 - i] = t;
            r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return r;
    }();
    return rule;
}

// Composite Gauss-Legendre over [a, b] with panel doubling. The integrands
// here are analytic in theta, so each doubling multiplies the convergence
// rate; the panel cap accommodates the narrow Fermi-edge transition of the
// degenerate regime (width ~ 1/B in theta).
template <class F>
double integrate_doubling(const F& f, double a, double b, double tol, int max_panels,
                          const char* what) {
    const auto& g = gauss32();
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int panels = 1; panels <= max_panels; panels *= 2) {
        const double h = (b - a) / panels;
        double total = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            double sum = 0.0;
            for (int i = 0; i < 32; ++i) sum += g.w[i] * f(mid + 0.5 * h * g.x[i]);
            total += 0.5 * h * sum;
        }
        if (panels >= 2 && std::abs(total - prev) <= tol + 64.0 * eps * std::abs(total))
            return total;
        prev = total;
    }
    throw NumericalError(std::string(what) + ": quadrature panel budget exhausted");
}

void require_args(int harmonic, double b) {
    if (harmonic < 0) throw std::domain_error("angular kernel: requires N >= 0");
    if (!(b >= 0.0)) throw std::domain_error("angular kernel: requires B >= 0");
}

}  // namespace

double kernel_quadrature(int harmonic, double order, double a, double b, double tol) {
    require_args(harmonic, b);
    if (!(order > 0.0)) throw std::domain_error("kernel_quadrature: requires s > 0");
    if (!(tol > 0.0)) throw std::domain_error("kernel_quadrature: requires tol > 0");
    const auto f = [=](double theta) {
        return std::cos(harmonic * theta) * sf::fermi_phi(order, a + b * std::cos(theta));
    };
    return integrate_doubling(f, 0.0, pi, tol * pi, 1 << 15, "kernel_quadrature") / pi;
}

double kernel_series(int harmonic, double order, double a, double b, int n_max) {
    require_args(harmonic, b);
    const double half_b = 0.5 * b;
    // weight_n = (B/2)^{N+2n} / (n! (N+n)!)
    double weight = 1.0;
    for (int k = 1; k <= harmonic; ++k) weight *= half_b / k;
    double sum = 0.0;
    int small_run = 0;
    for (int n = 0; n < n_max; ++n) {
        const double term =
            sf::fermi_phi(order - 2.0 * n - harmonic, a) * weight;
        if (!std::isfinite(term))
            throw NumericalError("kernel_series: term overflow before convergence");
        sum += term;
        if (std::abs(term) <= 2.0 * eps * std::max(1.0, std::abs(sum)))
            ++small_run;
        else
            small_run = 0;
        if (small_run >= 3) return sum;
        weight *= half_b * half_b / ((n + 1.0) * (harmonic + n + 1.0));
    }
    throw NumericalError("kernel_series: did not converge within term cap");
}

double kernel_mb_asymptote(int harmonic, double a, double b) {
    require_args(harmonic, b);
    if (!(a < -b)) throw std::domain_error("kernel_mb_asymptote: requires A < -B");
    // e^A I_N(B), assembled from the scaled Bessel so that large B cannot
    // overflow before the exponential suppression is applied.
    return std::exp(a + b) * sf::bessel_i_scaled(harmonic, b);
}

double cutoff_angle(double a, double b) {
    if (!(b >= 0.0)) throw std::domain_error("cutoff_angle: requires B >= 0");
    if (!(a > -b)) throw std::domain_error("cutoff_angle: requires A > -B");
    if (a >= b) return pi;
    return std::acos(-a / b);
}

double degenerate_cutoff(double psi) {
    if (!(psi >= 0.0 && psi < 0.75 * pi))
        throw std::domain_error("degenerate_cutoff: requires 0 <= psi < 3 pi / 4");
    if (psi <= 0.25 * pi) return pi;
    return std::acos(-1.0 / std::tan(psi));
}

double degenerate_kernel(int harmonic, double order, double psi) {
    if (harmonic < 0) throw std::domain_error("degenerate_kernel: requires N >= 0");
    if (!(order > 0.0)) throw std::domain_error("degenerate_kernel: requires s > 0");
    const double c = degenerate_cutoff(psi);
    const double cp = std::cos(psi), sp = std::sin(psi);
    const auto f = [=](double theta) {
        const double base = cp + sp * std::cos(theta);
        return std::cos(harmonic * theta) * std::pow(std::max(base, 0.0), order);
    };
    const double val = integrate_doubling(f, 0.0, c, 1e-14, 4096, "degenerate_kernel");
    return val / (pi * std::tgamma(order + 1.0));
}

double degenerate_ratio_inverse(double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::domain_error("degenerate_ratio_inverse: requires u in [0, 1)");
    if (u == 0.0) return 0.0;
    const auto ratio = [](double psi) {
        return degenerate_kernel(1, 2.0, psi) / degenerate_kernel(0, 2.0, psi);
    };
    double lo = 0.0, hi = 0.75 * pi * (1.0 - 1e-14);
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < u ? lo : hi) = mid;
        if (hi - lo <= 4.0 * eps * hi) break;
    }
    return 0.5 * (lo + hi);
}

double kernel(int harmonic, double order, double a, double b, const KernelOptions& opts) {
    require_args(harmonic, b);
    if (b <= opts.series_b_max && std::abs(a) <= opts.series_a_max) {
        try {
            return kernel_series(harmonic, order, a, b);
        } catch (const NumericalError&) {
            // fall through to quadrature
        }
    } else if (a < -b - opts.mb_margin) {
        return kernel_mb_asymptote(harmonic, a, b);
    } else if (std::hypot(a, b) > opts.degenerate_radius && a > -b) {
        const double r = std::hypot(a, b);
        const double psi = std::atan2(b, a);
        return std::pow(r, order) * degenerate_kernel(harmonic, order, psi);
    }
    // Tolerance scaled by the integrand's magnitude bound phi_s(A + B).
    const double scale = std::max(1.0, sf::fermi_phi(order, a + b));
    return kernel_quadrature(harmonic, order, a, b, opts.quad_tol * scale);
}

double chebyshev_moment(std::span<const double> coeffs, double order, double a, double b,
                        const KernelOptions& opts) {
    double sum = 0.0;
    for (size_t n = 0; n < coeffs.size(); ++n) {
        if (coeffs[n] == 0.0) continue;
        sum += coeffs[n] * kernel(static_cast<int>(n), order, a, b, opts);
    }
    return sum;
}

}  // namespace grafluid::kernels
