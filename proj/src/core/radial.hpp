#pragma once

#include <vector>

#include "field.hpp"

namespace gtherm {

// Bin-averaged radial samples about the die center. r is strictly
// increasing starting at 0; max_dev[k] records the largest deviation of any
// cell in bin k from the bin mean (the anisotropy report).
struct RadialProfile {
    std::vector<double> r;        // meters
    std::vector<double> value;
    std::vector<double> max_dev;

    size_t size() const { return r.size(); }
};

// Annulus binning of width one pitch about the center cell (n/2, n/2).
RadialProfile radial_profile_of(const FieldMap& f);

// Zeroth-order Hankel transform H(s) = integral_0^rmax f(r) J0(s r) r dr by
// trapezoid quadrature over the sampled profile. Verification-only path:
// backs the transform-equivalence checks, never the main solve.
RadialProfile hankel_transform(const RadialProfile& p, const std::vector<double>& s_grid);

} // namespace gtherm
