#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "choquard/grid.hpp"

namespace choquard::spectral {

/// Half-spectrum size of the real-to-complex layout: n x n x (n/2+1)
/// on the trailing axis (leading axes collapse for dim < 3).
std::int64_t coeff_count(const Grid& g);

/// Unnormalized forward transform. The input field is preserved.
void forward(const Field& f, std::vector<std::complex<double>>& out);

/// Inverse transform including the 1/N normalization. The coefficient
/// array is destroyed (FFTW c2r semantics).
void inverse(const Grid& g, std::vector<std::complex<double>>& coeff, Field& out);

/// |k|^2 per half-spectrum entry, k = (2*pi/L) * signed frequency.
/// The reference stays valid for the process lifetime (cached per grid).
const std::vector<double>& k_squared(const Grid& g);

/// Parseval weight per half-spectrum entry: 2 where the r2c layout drops
/// the conjugate partner, 1 on the self-conjugate planes.
const std::vector<double>& parseval_weights(const Grid& g);

/// Sign (+1/-1) of (-1)^(m0+m1+m2) per half-spectrum entry. Multiplying a
/// kernel spectrum by this implements the half-box cyclic shift that moves
/// the kernel origin from index n/2 to index 0 before convolution.
const std::vector<double>& center_shift_signs(const Grid& g);

/// In-place full complex transforms (dilation resampling needs the whole
/// spectrum). Forward is unnormalized, inverse includes 1/N.
void forward_c2c(int dim, int n, std::vector<std::complex<double>>& inout);
void inverse_c2c(int dim, int n, std::vector<std::complex<double>>& inout);

}  // namespace choquard::spectral
