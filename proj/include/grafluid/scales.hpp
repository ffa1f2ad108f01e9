#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grafluid/common.hpp"

namespace grafluid {

/// Physical constants of the carrier gas. The default is the internal unit
/// system c = k_B T = hbar = 1, in which the thermal density n_T equals
/// 1/(2 pi) and all solver formulas shed their constant prefactors. I/O in
/// other unit systems goes through these values; every formula in the
/// library carries its c / k_B T / hbar factors explicitly, so any
/// consistent system works.
struct PhysicalScales {
    double c = 1.0;      // Fermi speed (length / time)
    double k_B_T = 1.0;  // thermal energy
    double hbar = 1.0;   // reduced Planck constant (energy * time)

    /// Thermal reference density n_T = (k_B T)^2 / (2 pi hbar^2 c^2).
    /// Recomputed on demand, never stored, so it cannot drift out of
    /// consistency with the base constants.
    double thermal_density() const {
        return k_B_T * k_B_T / (2.0 * pi * hbar * hbar * c * c);
    }

    void validate() const {
        if (!(c > 0.0) || !(k_B_T > 0.0) || !(hbar > 0.0))
            throw std::invalid_argument("PhysicalScales: all constants must be positive");
    }
};

inline constexpr double relaxation_off = std::numeric_limits<double>::infinity();

}  // namespace grafluid
