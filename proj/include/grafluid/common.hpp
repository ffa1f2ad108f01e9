#pragma once

#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace grafluid {

inline constexpr double pi = std::numbers::pi;

/// Thrown when an iterative or adaptive numerical procedure fails to reach
/// its requested tolerance (quadrature exhaustion, Newton divergence,
/// series overflow). Callers may catch it to fall back to another method.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Carrier species. The sign enters the force term of the momentum balance,
/// the potential contribution to the free energy, and the drift term of the
/// diffusive limits.
enum class Species { electron, hole };

constexpr double species_sign(Species s) {
    return s == Species::electron ? +1.0 : -1.0;
}

/// Chunked parallel loop over [0, n). With threads <= 1 runs inline.
/// Used for per-cell closure evaluation; callers own any reductions.
inline void parallel_for(int n, int threads,
                         const std::function<void(int, int)>& body) {
    if (threads <= 1 || n < 2 * threads) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int b = t * chunk;
        const int e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    for (auto& th : pool) th.join();
}

}  // namespace grafluid
