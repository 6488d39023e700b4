#include "heatmap.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>

#include "errors.hpp"

namespace gtherm {

namespace {

struct Rgb {
    unsigned char r, g, b;
};

// Fixed five-stop cold-to-hot ramp.
constexpr std::array<Rgb, 5> kRamp = {{
    {0, 0, 96},      // deep blue
    {0, 128, 255},   // blue
    {0, 224, 128},   // green
    {255, 224, 0},   // yellow
    {224, 16, 16},   // red
}};

Rgb ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    double x = t * (kRamp.size() - 1);
    size_t i = std::min(static_cast<size_t>(x), kRamp.size() - 2);
    double w = x - i;
    auto mix = [&](unsigned char a, unsigned char b) {
        return static_cast<unsigned char>(a + (b - a) * w + 0.5);
    };
    return {mix(kRamp[i].r, kRamp[i + 1].r), mix(kRamp[i].g, kRamp[i + 1].g),
            mix(kRamp[i].b, kRamp[i + 1].b)};
}

} // namespace

HeatmapInfo render_heatmap(const FieldMap& f, const std::string& path, int cell_px) {
    f.validate("render_heatmap input");
    if (cell_px < 1) throw ConfigError("heatmap", "cell_px must be >= 1");
    const int n = f.n();
    HeatmapInfo info;
    info.width = n * cell_px;
    info.height = n * cell_px;
    info.legend_min = f.min();
    info.legend_max = f.max();
    const double span = info.legend_max - info.legend_min;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("heatmap", "cannot open '" + path + "' for writing");
    char header[160];
    int len = std::snprintf(header, sizeof header,
                            "P6\n# legend_min %.12g K\n# legend_max %.12g K\n%d %d\n255\n",
                            info.legend_min, info.legend_max, info.width, info.height);
    os.write(header, len);

    std::string row(static_cast<size_t>(info.width) * 3, '\0');
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double t = span > 0.0 ? (f(i, j) - info.legend_min) / span : 0.0;
            Rgb c = ramp(t);
            for (int px = 0; px < cell_px; ++px) {
                size_t at = (static_cast<size_t>(j) * cell_px + px) * 3;
                row[at] = static_cast<char>(c.r);
                row[at + 1] = static_cast<char>(c.g);
                row[at + 2] = static_cast<char>(c.b);
            }
        }
        for (int py = 0; py < cell_px; ++py) os.write(row.data(), row.size());
    }
    if (!os) throw ConfigError("heatmap", "write failed for '" + path + "'");
    return info;
}

} // namespace gtherm
