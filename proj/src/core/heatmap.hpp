#pragma once

#include <string>

#include "field.hpp"

namespace gtherm {

struct HeatmapInfo {
    int width = 0;
    int height = 0;
    double legend_min = 0.0;  // kelvin
    double legend_max = 0.0;
};

// Binary PPM (P6) raster with a fixed cold-to-hot ramp, cell colors a
// monotone function of value, normalized to the map extrema. The legend
// range is recorded as header comments, so two maps differing by a uniform
// offset produce identical pixels under different legends. Deterministic
// bytes for identical input.
HeatmapInfo render_heatmap(const FieldMap& f, const std::string& path, int cell_px = 4);

} // namespace gtherm
