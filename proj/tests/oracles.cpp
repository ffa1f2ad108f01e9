#include "oracles.hpp"

#include <cmath>
#include <vector>

#include "grafluid/common.hpp"
#include "grafluid/special_functions.hpp"

namespace grafluid::oracles {

namespace {

constexpr std::array<double, 8> gl8_x = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl8_w = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double occupancy(double t, double x) {
    const double e = t - x;
    return e > 0.0 ? std::exp(-e) / (1.0 + std::exp(-e)) : 1.0 / (1.0 + std::exp(e));
}

// Radial integral int_0^tmax t^power g(occ(t, x)) dt by dense panels.
double radial(double x, int power, const std::function<double(double, double)>& g) {
    const double tmax = std::max(0.0, x) + 60.0;
    const int panels = 600;
    const double h = tmax / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < 8; ++i) {
            const double t = mid + 0.5 * h * gl8_x[i];
            double tp = 1.0;
            for (int k = 0; k < power; ++k) tp *= t;
            total += 0.5 * h * gl8_w[i] * tp * g(occupancy(t, x), t);
        }
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < 8; ++i) total += 0.5 * h * gl8_w[i] * f(mid + 0.5 * h * gl8_x[i]);
    }
    return total;
}

double fermi_integral(double s, double x) {
    double val = 0.0;
    double lo = 0.0;
    if (s < 8.0) {
        // smooth the t^{s-1} endpoint with t = u^8 on [0, 1]
        val += integrate(
            [&](double u) { return 8.0 * std::pow(u, 8.0 * s - 1.0) * occupancy(std::pow(u, 8.0), x); },
            0.0, 1.0, 400);
        lo = 1.0;
    }
    const double tmax = std::max(0.0, x) + 60.0;
    val += integrate([&](double t) { return std::pow(t, s - 1.0) * occupancy(t, x); }, lo,
                     tmax, 800);
    return val / std::tgamma(s);
}

double angular_kernel(int harmonic, double s, double a, double b) {
    return integrate(
               [&](double th) {
                   return std::cos(harmonic * th) * sf::fermi_phi(s, a + b * std::cos(th));
               },
               0.0, pi, 512) /
           pi;
}

double weighted_kernel(const std::function<double(double)>& weight, double s, double a,
                       double b) {
    return integrate(
               [&](double th) {
                   return weight(std::cos(th)) * sf::fermi_phi(s, a + b * std::cos(th));
               },
               0.0, pi, 512) /
           pi;
}

MomentSet momentum_moments(double a, double b, double theta_b, const PhysicalScales& scales) {
    const double n_t = scales.thermal_density();
    const int nth = 1024;
    MomentSet out;
    const auto ident = [](double occ, double) { return occ; };
    for (int i = 0; i < nth; ++i) {
        const double th = 2.0 * pi * (i + 0.5) / nth;
        const double x = a + b * std::cos(th - theta_b);
        const double w = 2.0 * pi / nth;
        const double r1 = radial(x, 1, ident);  // with the p-measure weight
        const double r0 = radial(x, 0, ident);  // extra 1/|p| in Q cancels one power
        const double cx = std::cos(th), sx = std::sin(th);
        out.n += w * r1;
        out.nux += w * cx * r1;
        out.nuy += w * sx * r1;
        out.p.xx += w * cx * cx * r1;
        out.p.xy += w * cx * sx * r1;
        out.p.yy += w * sx * sx * r1;
        // nu_perp = (-sin, cos)
        out.q.xx += w * sx * sx * r0;
        out.q.xy += w * -sx * cx * r0;
        out.q.yy += w * cx * cx * r0;
    }
    const double norm = n_t / (2.0 * pi);
    const double qnorm = norm * scales.c / scales.k_B_T;
    out.n *= norm;
    out.nux *= norm;
    out.nuy *= norm;
    out.p.xx *= norm;
    out.p.xy *= norm;
    out.p.yy *= norm;
    out.p.yx = out.p.xy;
    out.q.xx *= qnorm;
    out.q.xy *= qnorm;
    out.q.yy *= qnorm;
    out.q.yx = out.q.xy;
    return out;
}

double free_energy(double a, double b, double theta_b, double v, const PhysicalScales& scales,
                   Species species) {
    const double n_t = scales.thermal_density();
    const double vk = species_sign(species) * v / scales.k_B_T;
    const int nth = 1024;
    double total = 0.0;
    const auto eps_term = [&](double occ, double t) {
        double s = 0.0;
        if (occ > 0.0 && occ < 1.0)
            s = occ * std::log(occ) + (1.0 - occ) * std::log1p(-occ);
        return s + (t + vk) * occ;
    };
    for (int i = 0; i < nth; ++i) {
        const double th = 2.0 * pi * (i + 0.5) / nth;
        const double x = a + b * std::cos(th - theta_b);
        total += (2.0 * pi / nth) * radial(x, 1, eps_term);
    }
    return total * n_t / (2.0 * pi) * scales.k_B_T;
}

std::array<double, 2> free_energy_flux(double a, double b, double theta_b, double v,
                                       const PhysicalScales& scales, Species species) {
    const double n_t = scales.thermal_density();
    const double vk = species_sign(species) * v / scales.k_B_T;
    const int nth = 1024;
    std::array<double, 2> total{0.0, 0.0};
    const auto eps_term = [&](double occ, double t) {
        double s = 0.0;
        if (occ > 0.0 && occ < 1.0)
            s = occ * std::log(occ) + (1.0 - occ) * std::log1p(-occ);
        return s + (t + vk) * occ;
    };
    for (int i = 0; i < nth; ++i) {
        const double th = 2.0 * pi * (i + 0.5) / nth;
        const double x = a + b * std::cos(th - theta_b);
        const double r = (2.0 * pi / nth) * radial(x, 1, eps_term);
        total[0] += std::cos(th) * r;
        total[1] += std::sin(th) * r;
    }
    const double norm = n_t / (2.0 * pi) * scales.k_B_T * scales.c;
    return {total[0] * norm, total[1] * norm};
}

double periodic_heat_gaussian(double x, double t, double x0, double sigma, double amplitude,
                              double diffusivity, double domain) {
    const double var = sigma * sigma + 2.0 * diffusivity * t;
    double sum = 0.0;
    for (int m = -4; m <= 4; ++m) {
        const double d = x - x0 + m * domain;
        sum += std::exp(-d * d / (2.0 * var));
    }
    return amplitude * sigma / std::sqrt(var) * sum;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
    }
    return sxy / sxx;
}

}  // namespace grafluid::oracles
