#pragma once

#include <cstddef>

#include "cpcf/grid.hpp"

namespace cpcf {

// Forward 2-D DFT, unnormalized (negative exponent); the inverse carries the
// 1/(MN) factor. All closed forms in the solver depend only on ratios, so the
// pair is the single place the convention lives.
Spectrum2D dft2(const Grid2D& g);

// Inverse 2-D DFT with 1/(MN) scaling. Input must be conjugate-symmetric; the
// imaginary residue is checked to be < 1e-8 in max-norm before being dropped.
Grid2D idft2(const Spectrum2D& s);

// Cyclic correlation: out(tau) = sum_t a(t) * b(t + tau), indices wrapped.
// Computed through spectra as idft2(conj(dft2(a)) .* dft2(b)).
Grid2D cyclic_correlate(const Grid2D& a, const Grid2D& b);

// out(i, j) = in((i - du) mod M, (j - dv) mod N); a positive du moves content
// down, a positive dv moves it right.
Grid2D circ_shift(const Grid2D& g, ShiftVector s);

// Gaussian label with cyclic distance to (center_row, center_col); peak value
// is exactly 1 at the center cell.
Grid2D gaussian_label(std::size_t rows, std::size_t cols, double sigma,
                      std::size_t center_row, std::size_t center_col);

// Separable raised-cosine window in [0, 1], zero at borders; a 1-wide axis
// degenerates to the constant 1.
Grid2D hann_window(std::size_t rows, std::size_t cols);

// Elementwise spectrum helpers shared by the consistency and solver modules.
Spectrum2D conj_mul(const Spectrum2D& a, const Spectrum2D& b);  // conj(a) .* b
Spectrum2D mul(const Spectrum2D& a, const Spectrum2D& b);       // a .* b

}  // namespace cpcf
