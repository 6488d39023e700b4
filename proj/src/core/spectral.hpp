#pragma once

#include <complex>
#include <vector>

#include "field.hpp"

namespace gtherm {

using cplx = std::complex<double>;

// Transform convention in force for every SpectralMap produced here:
// forward is the plain unnormalized DFT sum with kernel exp(-2*pi*i*(ux+vy)/m),
// the inverse carries the full 1/m^2. All closed-form Green's function algebra
// assumes exactly this pairing.
struct TransformConvention {
    int forward_sign = -1;       // sign of the forward exponent
    double forward_scale = 1.0;  // multiplier applied by the forward pass
    bool inverse_normalized = true;  // inverse divides by m^2
};

struct SpectralMap {
    int m = 0;  // side length (2n after mirroring on the solve path)
    std::vector<cplx> coeffs;  // row-major m x m
    TransformConvention convention;

    cplx operator()(int u, int v) const { return coeffs[static_cast<size_t>(u) * m + v]; }
    cplx& operator()(int u, int v) { return coeffs[static_cast<size_t>(u) * m + v]; }
};

SpectralMap forward_transform(const FieldMap& f);
FieldMap inverse_transform(const SpectralMap& s, double pitch, Unit unit);

// Raw complex FFT helpers used by the Green's function algebra (same
// convention as above, operating on bare coefficient vectors).
std::vector<cplx> fft2(const std::vector<cplx>& in, int m);
std::vector<cplx> ifft2(const std::vector<cplx>& in, int m);

// Circular convolution via the spectral product. Both maps must share n and
// pitch; no alignment is applied (f star delta_at_s returns f shifted by s).
FieldMap convolve(const FieldMap& f, const FieldMap& g);

// Elementwise product.
FieldMap hadamard(const FieldMap& f, const FieldMap& g);

// Method-of-images padding: 2n x 2n map whose quadrants are reflections of f
// about the shared die edges (index i maps to 2n-1-i past an edge).
FieldMap mirror_pad(const FieldMap& f);

// Inverse of mirror_pad: the n x n sub-grid of the original die region.
FieldMap crop_die(const FieldMap& padded, int n);

// Zero-embeds an n x n die map into the 2n x 2n grid and circularly shifts it
// so the die-center cell (n/2, n/2) lands at index (0,0). This is the kernel
// arrangement used for every convolution against a mirror-padded source map.
FieldMap center_kernel(const FieldMap& die_map);

// FFT of center_kernel(die_map); the F(f) appearing in the closed forms.
std::vector<cplx> kernel_fft(const FieldMap& die_map);

// Undo center_kernel after an inverse FFT: sample the kernel-layout 2n x 2n
// spatial data back onto the die grid.
FieldMap kernel_to_die(const std::vector<cplx>& kernel_spatial, int n, double pitch, Unit unit);

// Real multiplier map on the 2n x 2n frequency grid built from a die map
// "radial about the die center": entry (i,j) averages the die map over the
// four displacement sign choices (+-dx, +-dy) with dx = min(i, m-i), samples
// clamped to the die. Symmetric under i -> m-i, so Hermitian spectra stay
// Hermitian under pointwise multiplication.
std::vector<double> symmetric_multiplier(const FieldMap& die_map);

} // namespace gtherm
