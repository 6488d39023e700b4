#include "radial.hpp"

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace gtherm {

RadialProfile radial_profile_of(const FieldMap& f) {
    const int n = f.n();
    const int c = n / 2;
    const double p = f.pitch();
    // Bin k collects cells with round(dist/pitch) == k.
    const int nbins = static_cast<int>(std::round(std::hypot(n - 1.0, n - 1.0))) + 1;
    std::vector<double> sum(nbins, 0.0), mx(nbins, -HUGE_VAL), mn(nbins, HUGE_VAL);
    std::vector<int> cnt(nbins, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double d = std::hypot(static_cast<double>(i - c), static_cast<double>(j - c));
            int k = static_cast<int>(std::round(d));
            sum[k] += f(i, j);
            mx[k] = std::max(mx[k], f(i, j));
            mn[k] = std::min(mn[k], f(i, j));
            ++cnt[k];
        }
    }
    RadialProfile out;
    for (int k = 0; k < nbins; ++k) {
        if (!cnt[k]) continue;
        double mean = sum[k] / cnt[k];
        out.r.push_back(k * p);
        out.value.push_back(mean);
        out.max_dev.push_back(std::max(mx[k] - mean, mean - mn[k]));
    }
    return out;
}

RadialProfile hankel_transform(const RadialProfile& p, const std::vector<double>& s_grid) {
    if (p.size() < 2) throw ConfigError("radial", "hankel_transform: profile too short");
    RadialProfile out;
    out.r = s_grid;
    out.value.resize(s_grid.size());
    out.max_dev.assign(s_grid.size(), 0.0);
    for (size_t si = 0; si < s_grid.size(); ++si) {
        const double s = s_grid[si];
        if (!(s >= 0.0)) throw ConfigError("radial", "hankel_transform: negative frequency");
        double acc = 0.0;
        for (size_t k = 0; k + 1 < p.size(); ++k) {
            double r0 = p.r[k], r1 = p.r[k + 1];
            double g0 = p.value[k] * std::cyl_bessel_j(0.0, s * r0) * r0;
            double g1 = p.value[k + 1] * std::cyl_bessel_j(0.0, s * r1) * r1;
            acc += 0.5 * (g0 + g1) * (r1 - r0);
        }
        out.value[si] = acc;
    }
    return out;
}

} // namespace gtherm
