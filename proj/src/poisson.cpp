#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grafluid/field_solvers.hpp"

namespace grafluid::fields {

// Spectral solve of gamma (-Laplace)^{1/2} V = rho on the periodic grid.
// The half Laplacian has Fourier symbol |k|, which is the correct in-plane
// kernel for a charge sheet; the k = 0 mode is fixed by removing the mean of
// the source (solvability) and returning a zero-mean potential.
void poisson_solve(FieldGrid& grid, double gamma) {
    grid.shape.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("poisson_solve: gamma must be positive");
    const int nx = grid.shape.nx, ny = grid.shape.ny;
    const int cells = nx * ny;
    const int nk = ny * (nx / 2 + 1);

    double* in = fftw_alloc_real(cells);
    fftw_complex* out = fftw_alloc_complex(nk);

    double mean = 0.0;
    for (int c = 0; c < cells; ++c) mean += grid.electrons.n[c] - grid.holes.n[c];
    mean /= cells;
    for (int c = 0; c < cells; ++c)
        in[c] = grid.electrons.n[c] - grid.holes.n[c] - mean;

    fftw_plan fwd = fftw_plan_dft_r2c_2d(ny, nx, in, out, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    const double kx0 = 2.0 * pi / grid.shape.length_x();
    const double ky0 = 2.0 * pi / grid.shape.length_y();
    for (int jy = 0; jy < ny; ++jy) {
        const int my = jy <= ny / 2 ? jy : jy - ny;
        for (int jx = 0; jx <= nx / 2; ++jx) {
            const int idx = jy * (nx / 2 + 1) + jx;
            const double kmag = std::hypot(kx0 * jx, ky0 * my);
            const double scale = kmag > 0.0 ? 1.0 / (gamma * kmag * cells) : 0.0;
            out[idx][0] *= scale;
            out[idx][1] *= scale;
        }
    }

    fftw_plan bwd = fftw_plan_dft_c2r_2d(ny, nx, out, in, FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);

    grid.v_int.assign(in, in + cells);
    fftw_free(in);
    fftw_free(out);
}

}  // namespace grafluid::fields
