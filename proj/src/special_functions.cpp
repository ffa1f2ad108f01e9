#include "grafluid/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "grafluid/common.hpp"

namespace grafluid::sf {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

bool near_integer(double s, int& out) {
    const double r = std::nearbyint(s);
    if (std::abs(s - r) < 1e-12 && std::abs(r) < 2e9) {
        out = static_cast<int>(r);
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Dirichlet eta
// ---------------------------------------------------------------------------

// Borwein's Chebyshev-accelerated alternating sum; error ~ (3+sqrt(8))^-n,
// adequate for all real s >= 0 at n = 48.
double eta_borwein(double s) {
    constexpr int n = 48;
    static const std::array<double, n + 1> d = [] {
        std::array<double, n + 1> out{};
        // d_k = n * sum_{i=0..k} (n+i-1)! 4^i / ((n-i)! (2i)!)
        double t = 1.0 / n;  // i = 0 term
        double acc = t;
        out[0] = n * acc;
        for (int k = 1; k <= n; ++k) {
            t *= 4.0 * (n + k - 1.0) * (n - k + 1.0) / (2.0 * k * (2.0 * k - 1.0));
            acc += t;
            out[k] = n * acc;
        }
        return out;
    }();
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 0; k < n; ++k) {
        sum += sign * (d[k] - d[n]) * std::exp(-s * std::log1p(static_cast<double>(k)));
        sign = -sign;
    }
    return -sum / d[n];
}

double phi_negative_order(int m, double x);  // forward

double eta_impl(double s) {
    int si = 0;
    if (near_integer(s, si)) {
        switch (si) {
            case 0: return 0.5;
            case 1: return std::numbers::ln2;
            case 2: return pi * pi / 12.0;
            case 3: return 0.75 * 1.2020569031595942854;    // 3 zeta(3) / 4
            case 4: return 7.0 * std::pow(pi, 4) / 720.0;
            default: break;
        }
        if (si > 4) return eta_borwein(s);
        return phi_negative_order(-si, 0.0);  // h(-m) = phi_{-m}(0)
    }
    if (s >= 0.0) return eta_borwein(s);
    // Reflection: zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s).
    const double u = 1.0 - s;  // > 1
    const double zeta_u = eta_borwein(u) / (1.0 - std::pow(2.0, 1.0 - u));
    const double sin_term = std::sin(0.5 * pi * s);
    if (u < 150.0) {
        const double zeta_s =
            std::pow(2.0, s) * std::pow(pi, s - 1.0) * sin_term * std::tgamma(u) * zeta_u;
        return (1.0 - std::pow(2.0, 1.0 - s)) * zeta_s;
    }
    // Log-space assembly for very negative s, where tgamma and 2^{1-s} overflow
    // individually although the product is finite.
    const double log_mag = s * std::numbers::ln2 + (s - 1.0) * std::log(pi) +
                           std::log(std::abs(sin_term)) + std::lgamma(u) +
                           std::log(std::abs(zeta_u)) + (1.0 - s) * std::numbers::ln2;
    const double sign = -1.0 * (sin_term < 0 ? -1.0 : 1.0) * (zeta_u < 0 ? -1.0 : 1.0);
    return sign * std::exp(log_mag);
}

// ---------------------------------------------------------------------------
// Negative integer orders: phi_{-m}(x) = d^m/dx^m of the logistic function
// ---------------------------------------------------------------------------

// Small m: finite expansion in sigma = 1/(1+e^-x),
//   phi_{-m}(x) = sum_{k=0..m} k! S(m+1,k+1) (-1)^k sigma^{k+1},
// reduced to x <= 0 by the parity phi_{-m}(x) = (-1)^{m+1} phi_{-m}(-x) so
// that sigma <= 1/2 and the alternating sum stays well conditioned.
constexpr int stirling_m_max = 12;

double phi_neg_stirling(int m, double x) {
    static const std::vector<std::vector<double>> rows = [] {
        // rows[m][k] = (k-1)! S(m+1, k), k = 1 .. m+1,
        // via rows[m][k] = k rows[m-1][k] + (k-1) rows[m-1][k-1].
        std::vector<std::vector<double>> r(stirling_m_max + 1);
        r[0] = {0.0, 1.0};
        for (int m = 1; m <= stirling_m_max; ++m) {
            r[m].assign(m + 2, 0.0);
            for (int k = 1; k <= m + 1; ++k) {
                double v = (k - 1.0) * r[m - 1][k - 1];
                if (k < static_cast<int>(r[m - 1].size())) v += k * r[m - 1][k];
                r[m][k] = v;
            }
        }
        return r;
    }();

    double parity = 1.0;
    if (x > 0.0) {
        if (m % 2 == 0) parity = -1.0;
        x = -x;
    }
    const double sigma = std::exp(x) / (1.0 + std::exp(x));
    const auto& row = rows[m];
    double p = 0.0;
    for (int k = m + 1; k >= 1; --k) p = p * (-sigma) + row[k];
    return parity * p * sigma;
}

// Large m: Mittag-Leffler expansion over the logistic pole pairs +-i pi(2j+1),
//   phi_{-m}(x) = (-1)^m m! sum_j 2 Re (x - i pi (2j+1))^{-(m+1)},
// which converges geometrically in j for m >= a few and involves no
// cancellation between terms of comparable size.
double phi_neg_poles(int m, double x) {
    const double lg = std::lgamma(m + 1.0);
    double total = 0.0;
    double max_mag = 0.0;
    for (int j = 0; j < 400; ++j) {
        const double b = pi * (2.0 * j + 1.0);
        const double r = std::hypot(x, b);
        const double mag = std::exp(lg - (m + 1.0) * std::log(r));
        total += 2.0 * mag * std::cos((m + 1.0) * std::atan2(-b, x));
        max_mag = std::max(max_mag, mag);
        if (j >= 2 && mag < 0.25 * eps * max_mag) break;
    }
    return (m % 2 == 0) ? total : -total;
}

double phi_negative_order(int m, double x) {
    return m <= stirling_m_max ? phi_neg_stirling(m, x) : phi_neg_poles(m, x);
}

// ---------------------------------------------------------------------------
// Positive integer orders
// ---------------------------------------------------------------------------

double phi_logistic(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double phi_log(double x) {  // phi_1(x) = ln(1 + e^x)
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// sum_{k>=1} (-1)^{k+1} e^{kx} / k^s for x <= -1 (geometric decay).
double phi_exp_series(double s, double x) {
    double sum = 0.0;
    double ekx = std::exp(x);
    const double q = ekx;
    double sign = 1.0;
    for (int k = 1; k <= 800; ++k) {
        const double term = sign * ekx * std::exp(-s * std::log(static_cast<double>(k)));
        sum += term;
        if (std::abs(term) <= 0.25 * eps * std::abs(sum)) break;
        ekx *= q;
        sign = -sign;
        if (ekx == 0.0) break;
    }
    return sum;
}

// Taylor series at 0 with cached eta coefficients, |x| <= 1.
double phi_center_series(int s, double x) {
    constexpr int kmax = 40;
    static const auto table = [] {
        // coeff[s][k] = h(s - k) for s = 2, 3
        std::array<std::array<double, kmax + 1>, 2> t{};
        for (int k = 0; k <= kmax; ++k) {
            t[0][k] = eta_impl(2.0 - k);
            t[1][k] = eta_impl(3.0 - k);
        }
        return t;
    }();
    const auto& h = table[s - 2];
    double sum = 0.0;
    double xk = 1.0;  // x^k / k!
    for (int k = 0; k <= kmax; ++k) {
        sum += h[k] * xk;
        xk *= x / (k + 1.0);
    }
    return sum;
}

double phi_dilog(double x) {  // phi_2
    if (x > 1.0) return 0.5 * x * x + pi * pi / 6.0 - phi_dilog(-x);
    if (x >= -1.0) return phi_center_series(2, x);
    return phi_exp_series(2.0, x);
}

double phi_trilog(double x) {  // phi_3
    if (x > 1.0) return phi_trilog(-x) + pi * pi * x / 6.0 + x * x * x / 6.0;
    if (x >= -1.0) return phi_center_series(3, x);
    return phi_exp_series(3.0, x);
}

double phi_integer(int s, double x) {
    switch (s) {
        case 1: return phi_log(x);
        case 0: return phi_logistic(x);
        case 2: return phi_dilog(x);
        case 3: return phi_trilog(x);
        default: break;
    }
    if (s < 0) return phi_negative_order(-s, x);
    return fermi_phi_integral(static_cast<double>(s), x);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre panel machinery (shared with the defining integral)
// ---------------------------------------------------------------------------

struct GaussRule {
    std::array<double, 32> x{}, w{};  // nodes/weights on [-1, 1]
};

const GaussRule& gauss32() {
    static const GaussRule rule = [] {
        GaussRule r;
        constexpr int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            // Newton on P_n from the Chebyshev-like initial guess.
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            r.x[i] = -t;
            r.x[n - 1 - i] = t;
            r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <class F>
double gauss_panel(const F& f, double a, double b) {
    const auto& g = gauss32();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 32; ++i) sum += g.w[i] * f(mid + half * g.x[i]);
    return half * sum;
}

// Composite rule with panel doubling until two successive refinements agree.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol, int max_panels) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int panels = 1; panels <= max_panels; panels *= 2) {
        const double h = (b - a) / panels;
        double val = 0.0;
        for (int p = 0; p < panels; ++p) val += gauss_panel(f, a + p * h, a + (p + 1) * h);
        if (panels >= 2 && std::abs(val - prev) <= abs_tol + 64.0 * eps * std::abs(val))
            return val;
        prev = val;
    }
    throw NumericalError("integrate_adaptive: panel budget exhausted");
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

double dirichlet_eta(double s) { return eta_impl(s); }

double fermi_phi(double s, double x) {
    int si = 0;
    if (near_integer(s, si) && si <= 3) return phi_integer(si, x);
    if (s > 0.0) return fermi_phi_integral(s, x);
    throw std::domain_error("fermi_phi: non-integer order <= 0 is not supported");
}

double fermi_phi_series(double s, double x) {
    if (!(std::abs(x) < pi))
        throw std::domain_error("fermi_phi_series: requires |x| < pi");
    double sum = 0.0;
    double xk = 1.0;  // x^k / k!, tracked while it stays in range
    int small_run = 0;
    const double ln_ax = x != 0.0 ? std::log(std::abs(x)) : 0.0;
    for (int k = 0; k <= 4000; ++k) {
        double term;
        if (s - k > -120.0) {
            term = eta_impl(s - k) * xk;
            xk *= x / (k + 1.0);
        } else {
            // Deep coefficients via the reflection formula assembled in log
            // space; eta(sigma) and x^k/k! overflow/underflow individually
            // while the term stays moderate.
            if (x == 0.0) return sum;
            const double sigma = s - k;
            const double u = 1.0 - sigma;
            const double sin_term = std::sin(0.5 * pi * sigma);
            if (std::abs(sin_term) < 1e-8) {
                term = 0.0;  // eta vanishes at negative even integers
            } else {
                const double zeta_u = 1.0 / (1.0 - std::pow(2.0, 1.0 - u));  // ~ 1 here
                const double log_mag = sigma * std::numbers::ln2 + (sigma - 1.0) * std::log(pi) +
                                       std::log(std::abs(sin_term)) + std::lgamma(u) +
                                       std::log(zeta_u) + (1.0 - sigma) * std::numbers::ln2 +
                                       k * ln_ax - std::lgamma(k + 1.0);
                const double sign = -(sin_term < 0 ? -1.0 : 1.0) *
                                    ((x < 0.0 && k % 2 == 1) ? -1.0 : 1.0);
                term = sign * std::exp(log_mag);
            }
        }
        sum += term;
        if (std::abs(term) <= 0.5 * eps * std::max(1.0, std::abs(sum)))
            ++small_run;
        else
            small_run = 0;
        if (small_run >= 3) return sum;
    }
    throw NumericalError("fermi_phi_series: did not converge within term cap");
}

double fermi_phi_integral(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("fermi_phi_integral: requires s > 0");
    const double tail = std::max(0.0, x) + 45.0 + 12.0 * s;
    const double inv_gamma = std::exp(-std::lgamma(s));
    const auto occupancy = [x](double t) {
        const double e = t - x;
        return e > 0.0 ? std::exp(-e) / (1.0 + std::exp(-e)) : 1.0 / (1.0 + std::exp(e));
    };
    double value = 0.0;
    double lo = 0.0;
    const int p = static_cast<int>(std::ceil(8.0 / s));
    if (p > 1) {
        // Substitution t = u^p turns t^{s-1} dt into p u^{ps-1} du with
        // ps - 1 >= 7, smooth enough at the endpoint for the panel rule.
        const auto g = [&](double u) {
            return p * std::pow(u, p * s - 1.0) * occupancy(std::pow(u, p));
        };
        value += integrate_adaptive(g, 0.0, 1.0, 1e-14, 1024);
        lo = 1.0;
    }
    const auto f = [&](double t) { return std::pow(t, s - 1.0) * occupancy(t); };
    value += integrate_adaptive(f, lo, tail, 1e-13 * std::max(1.0, std::abs(value)), 4096);
    return inv_gamma * value;
}

double fermi_phi_inverse(double y) {
    if (!(y > 0.0)) throw std::domain_error("fermi_phi_inverse: requires y > 0");
    const double tol = 0.5e-12 * std::max(1.0, y);
    // Initial guess from the two asymptotic branches of phi_2.
    double x = y < 0.7 ? std::log(y) : std::sqrt(2.0 * std::max(0.0, y - pi * pi / 6.0));
    // Expand a bracket around the guess, then safeguarded Newton.
    double lo = x - 1.0, hi = x + 1.0;
    while (phi_dilog(lo) > y) lo -= std::max(1.0, std::abs(lo));
    while (phi_dilog(hi) < y) hi += std::max(1.0, std::abs(hi));
    x = std::clamp(x, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi_dilog(x) - y;
        if (std::abs(f) <= tol) return x;
        (f > 0.0 ? hi : lo) = x;
        const double step = f / phi_log(x);  // phi_2' = phi_1 > 0
        double next = x - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw NumericalError("fermi_phi_inverse: Newton did not converge");
}

double bessel_i_scaled(int n, double x) {
    if (n < 0 || x < 0.0) throw std::domain_error("bessel_i: requires n >= 0, x >= 0");
    if (x < 15.0) {
        // e^{-x} * power series
        double term = 1.0;
        for (int k = 1; k <= n; ++k) term *= 0.5 * x / k;  // (x/2)^n / n!
        double sum = term;
        for (int m = 1; m <= 60; ++m) {
            term *= 0.25 * x * x / (m * (m + static_cast<double>(n)));
            sum += term;
            if (term <= 0.25 * eps * sum) break;
        }
        return sum * std::exp(-x);
    }
    // Uniform asymptotic expansion; truncate at the smallest term.
    const double mu = 4.0 * n * n;
    double term = 1.0, sum = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 20; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * x * k);
        if (std::abs(term) >= prev_mag) break;  // divergent tail reached
        sum += term;
        prev_mag = std::abs(term);
        if (std::abs(term) <= 0.25 * eps * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

double bessel_i(int n, double x) {
    return bessel_i_scaled(n, x) * std::exp(x);
}

double bessel_i_ratio_inverse(double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::domain_error("bessel_i_ratio_inverse: requires u in [0, 1)");
    if (u == 0.0) return 0.0;
    const auto ratio = [](double b) { return bessel_i_scaled(1, b) / bessel_i_scaled(0, b); };
    double b = u < 0.7 ? 2.0 * u : 0.5 / (1.0 - u);  // small-B / large-B branches
    double lo = 0.0, hi = b;
    while (ratio(hi) < u) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) throw NumericalError("bessel_i_ratio_inverse: bracket expansion failed");
    }
    b = std::clamp(b, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double r = ratio(b);
        const double f = r - u;
        if (std::abs(f) <= 4.0 * eps * std::max(1.0, u) || hi - lo <= 4.0 * eps * hi) return b;
        (f > 0.0 ? hi : lo) = b;
        const double dr = b > 1e-8 ? 1.0 - r * r - r / b : 0.5;  // ratio'(0) = 1/2
        double next = b - f / dr;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        b = next;
    }
    return b;
}

}  // namespace grafluid::sf
