#include "grafluid/reduced_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "grafluid/special_functions.hpp"

namespace grafluid::reduced {

namespace {

double logarithmic_mean(double a, double b) {
    if (std::abs(a - b) <= 1e-12 * (a + b)) return 0.5 * (a + b);
    return (a - b) / (std::log(a) - std::log(b));
}

double face_mobility(DiffusionRegime regime, double nl, double nr,
                     const PhysicalScales& scales) {
    switch (regime) {
        case DiffusionRegime::maxwell_boltzmann:
            return logarithmic_mean(nl, nr) / scales.k_B_T;
        case DiffusionRegime::degenerate:
            return 0.5 * (std::sqrt(nl) + std::sqrt(nr)) /
                   (scales.c * scales.hbar * std::sqrt(pi));
        case DiffusionRegime::general:
        default:
            return 0.5 * (mobility(DiffusionRegime::general, nl, scales) +
                          mobility(DiffusionRegime::general, nr, scales));
    }
}

}  // namespace

double mobility(DiffusionRegime regime, double n, const PhysicalScales& scales) {
    if (!(n > 0.0)) throw std::domain_error("mobility: requires n > 0");
    switch (regime) {
        case DiffusionRegime::maxwell_boltzmann:
            return n / scales.k_B_T;
        case DiffusionRegime::degenerate:
            return std::sqrt(n) / (scales.c * scales.hbar * std::sqrt(pi));
        case DiffusionRegime::general:
        default: {
            const double n_t = scales.thermal_density();
            return n_t / scales.k_B_T *
                   sf::fermi_phi(1.0, sf::fermi_phi_inverse(n / n_t));
        }
    }
}

double diffusion_coefficient(double tau0, const PhysicalScales& scales) {
    return 0.5 * tau0 * scales.c * scales.c;
}

double drift_diffusion_max_dt(const GridShape& shape, const DiffusionConfig& cfg,
                              const PhysicalScales& scales) {
    return shape.dx * shape.dx /
           (2.0 * shape.dim * diffusion_coefficient(cfg.tau0, scales));
}

void drift_diffusion_step(std::vector<double>& n, const GridShape& shape,
                          const std::vector<double>& v, const DiffusionConfig& cfg,
                          const PhysicalScales& scales, double dt) {
    shape.validate();
    if (dt > drift_diffusion_max_dt(shape, cfg, scales) * (1.0 + 1e-12))
        throw std::invalid_argument("drift_diffusion_step: dt exceeds the stability bound");
    const int nx = shape.nx, ny = shape.ny;
    const double d_coef = diffusion_coefficient(cfg.tau0, scales);
    const double sign = species_sign(cfg.species);
    const double inv_dx = 1.0 / shape.dx;
    auto idx = [&](int i, int j) { return shape.index((i + nx) % nx, (j + ny) % ny); };

    std::vector<double> rate(shape.cells(), 0.0);
    auto add_face = [&](int cl, int cr) {
        // flux = -D [ (n_R - n_L)/dx + sign * mu_face (V_R - V_L)/dx ]
        const double mu = face_mobility(cfg.regime, n[cl], n[cr], scales);
        const double flux = -d_coef * ((n[cr] - n[cl]) * inv_dx +
                                       sign * mu * (v[cr] - v[cl]) * inv_dx);
        rate[cl] -= flux * inv_dx;
        rate[cr] += flux * inv_dx;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            add_face(idx(i, j), idx(i + 1, j));
            if (shape.dim == 2) add_face(idx(i, j), idx(i, j + 1));
        }
    }
    for (int c = 0; c < shape.cells(); ++c) {
        n[c] += dt * rate[c];
        if (!(n[c] > 0.0))
            throw NumericalError("drift_diffusion_step: density lost positivity");
    }
}

double wave_max_dt(const GridShape& shape, const PhysicalScales& scales) {
    return shape.dx / (scales.c / std::sqrt(2.0)) / shape.dim;
}

void wave_step(WaveState& state, const GridShape& shape, const std::vector<double>& v,
               Species species, const PhysicalScales& scales, double dt) {
    shape.validate();
    if (dt > wave_max_dt(shape, scales) * (1.0 + 1e-12))
        throw std::invalid_argument("wave_step: dt exceeds the stability bound");
    const int nx = shape.nx, ny = shape.ny;
    const double inv_dx2 = 1.0 / (shape.dx * shape.dx);
    const double n_t = scales.thermal_density();
    // Mobility factor frozen at the background density (linear response).
    const double phi_bg =
        sf::fermi_phi(1.0, sf::fermi_phi_inverse(state.background_n / n_t));
    const double wave_c2 = 0.5 * scales.c * scales.c;
    const double drive = species_sign(species) * scales.c * scales.c * n_t / scales.k_B_T * phi_bg;
    auto idx = [&](int i, int j) { return shape.index((i + nx) % nx, (j + ny) % ny); };

    std::vector<double> next(shape.cells());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = idx(i, j);
            double lap_n = (state.cur[idx(i + 1, j)] - 2.0 * state.cur[c] +
                            state.cur[idx(i - 1, j)]) *
                           inv_dx2;
            double lap_v = (v[idx(i + 1, j)] - 2.0 * v[c] + v[idx(i - 1, j)]) * inv_dx2;
            if (shape.dim == 2) {
                lap_n += (state.cur[idx(i, j + 1)] - 2.0 * state.cur[c] +
                          state.cur[idx(i, j - 1)]) *
                         inv_dx2;
                lap_v += (v[idx(i, j + 1)] - 2.0 * v[c] + v[idx(i, j - 1)]) * inv_dx2;
            }
            next[c] = 2.0 * state.cur[c] - state.prev[c] +
                      dt * dt * (wave_c2 * lap_n + drive * lap_v);
        }
    }
    state.prev = std::move(state.cur);
    state.cur = std::move(next);
}

double collimation_max_dt(const GridShape& shape, const PhysicalScales& scales) {
    return shape.dx / scales.c / shape.dim;
}

void collimation_step(CollimationField& field, const GridShape& shape,
                      const std::vector<double>& v, Species species,
                      const PhysicalScales& scales, double dt, CollimationForce force) {
    shape.validate();
    if (dt > collimation_max_dt(shape, scales) * (1.0 + 1e-12))
        throw std::invalid_argument("collimation_step: dt exceeds the CFL bound");
    const int nx = shape.nx, ny = shape.ny;
    const double inv_dx = 1.0 / shape.dx;
    const double c = scales.c;
    const double sign = species_sign(species);
    auto idx = [&](int i, int j) { return shape.index((i + nx) % nx, (j + ny) % ny); };

    const std::vector<double> ux0 = field.ux, uy0 = field.uy;
    auto upwind = [&](const std::vector<double>& f, int i, int j, double ax, double ay) {
        const int cc = idx(i, j);
        double adv = 0.0;
        if (ax > 0.0)
            adv += ax * (f[cc] - f[idx(i - 1, j)]) * inv_dx;
        else
            adv += ax * (f[idx(i + 1, j)] - f[cc]) * inv_dx;
        if (shape.dim == 2) {
            if (ay > 0.0)
                adv += ay * (f[cc] - f[idx(i, j - 1)]) * inv_dx;
            else
                adv += ay * (f[idx(i, j + 1)] - f[cc]) * inv_dx;
        }
        return adv;
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int cc = idx(i, j);
            const double ax = c * ux0[cc];
            const double ay = shape.dim == 2 ? c * uy0[cc] : 0.0;
            double ux = ux0[cc] - dt * upwind(ux0, i, j, ax, ay);
            double uy = uy0[cc] - dt * upwind(uy0, i, j, ax, ay);
            if (force == CollimationForce::maxwell_boltzmann) {
                // du/dt = sign (c/k_B T)(F . u_perp) u_perp is an instantaneous
                // rotation of u; applying it as one keeps |u| exact.
                const double fx = -(v[idx(i + 1, j)] - v[idx(i - 1, j)]) * 0.5 * inv_dx;
                const double fy = shape.dim == 2
                                      ? -(v[idx(i, j + 1)] - v[idx(i, j - 1)]) * 0.5 * inv_dx
                                      : 0.0;
                const double omega =
                    sign * c / scales.k_B_T * (fx * -uy + fy * ux);
                const double ang = omega * dt;
                const double cs = std::cos(ang), sn = std::sin(ang);
                const double rx = cs * ux - sn * uy;
                const double ry = sn * ux + cs * uy;
                ux = rx;
                uy = ry;
            }
            field.ux[cc] = ux;
            field.uy[cc] = uy;
        }
    }
}

double max_norm_drift(const CollimationField& field) {
    double worst = 0.0;
    for (size_t c = 0; c < field.ux.size(); ++c)
        worst = std::max(worst, std::abs(std::hypot(field.ux[c], field.uy[c]) - 1.0));
    return worst;
}

std::vector<double> geometric_optics_residual(const CollimationField& field,
                                              const GridShape& shape,
                                              const std::vector<double>& v, Species species,
                                              const PhysicalScales& scales) {
    shape.validate();
    const int nx = shape.nx, ny = shape.ny;
    const double inv_2dx = 0.5 / shape.dx;
    const double sign = species_sign(species);
    auto idx = [&](int i, int j) { return shape.index((i + nx) % nx, (j + ny) % ny); };
    auto gx = [&](int c) {
        return std::exp(-sign * v[c] / scales.k_B_T) * (-field.uy[c]);
    };
    auto gy = [&](int c) { return std::exp(-sign * v[c] / scales.k_B_T) * field.ux[c]; };

    std::vector<double> res(shape.cells(), 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double div = (gx(idx(i + 1, j)) - gx(idx(i - 1, j))) * inv_2dx;
            if (shape.dim == 2) div += (gy(idx(i, j + 1)) - gy(idx(i, j - 1))) * inv_2dx;
            res[shape.index(i, j)] = div;
        }
    }
    return res;
}

PotentialFn tanh_step_potential(double height, double width, double x_center) {
    if (!(width > 0.0)) throw std::invalid_argument("tanh_step_potential: width must be > 0");
    PotentialFn p;
    p.value = [=](double x, double) {
        return height * 0.5 * (1.0 + std::tanh(2.0 * (x - x_center) / width));
    };
    p.force = [=](double x, double) {
        const double t = std::tanh(2.0 * (x - x_center) / width);
        return std::array<double, 2>{-height * (1.0 - t * t) / width, 0.0};
    };
    return p;
}

std::vector<RaySample> trace_collimation_ray(double x0, double y0, double angle0, double t_end,
                                             double dt, const PotentialFn& pot, Species species,
                                             const PhysicalScales& scales) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("trace_collimation_ray: requires dt, t_end > 0");
    const double c = scales.c;
    const double sign = species_sign(species);
    struct State {
        double x, y, ux, uy;
    };
    auto deriv = [&](const State& s) {
        const auto f = pot.force(s.x, s.y);
        const double coupling = sign * c / scales.k_B_T * (f[0] * -s.uy + f[1] * s.ux);
        return State{c * s.ux, c * s.uy, coupling * -s.uy, coupling * s.ux};
    };
    State s{x0, y0, std::cos(angle0), std::sin(angle0)};
    std::vector<RaySample> out;
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    out.reserve(steps + 1);
    out.push_back({0.0, s.x, s.y, s.ux, s.uy});
    double t = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double h = std::min(dt, t_end - t);
        const State k1 = deriv(s);
        const State s2{s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.ux + 0.5 * h * k1.ux,
                       s.uy + 0.5 * h * k1.uy};
        const State k2 = deriv(s2);
        const State s3{s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.ux + 0.5 * h * k2.ux,
                       s.uy + 0.5 * h * k2.uy};
        const State k3 = deriv(s3);
        const State s4{s.x + h * k3.x, s.y + h * k3.y, s.ux + h * k3.ux, s.uy + h * k3.uy};
        const State k4 = deriv(s4);
        s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        s.ux += h / 6.0 * (k1.ux + 2.0 * k2.ux + 2.0 * k3.ux + k4.ux);
        s.uy += h / 6.0 * (k1.uy + 2.0 * k2.uy + 2.0 * k3.uy + k4.uy);
        t += h;
        out.push_back({t, s.x, s.y, s.ux, s.uy});
    }
    return out;
}

}  // namespace grafluid::reduced
