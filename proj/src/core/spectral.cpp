#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "errors.hpp"

namespace gtherm {

namespace {

// FFTW planning is not thread-safe; executing a plan on external arrays is.
// Plans are cached per (size, direction) with FFTW_ESTIMATE so results do not
// depend on runtime timing measurements.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int m, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(m, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> dummy(static_cast<size_t>(m) * m);
        auto* ptr = reinterpret_cast<fftw_complex*>(dummy.data());
        fftw_plan p = fftw_plan_dft_2d(m, m, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw Error("spectral", "fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    PlanCache() = default;
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void run_fft(std::vector<cplx>& data, int m, int sign) {
    fftw_plan p = PlanCache::instance().get(m, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

} // namespace

std::vector<cplx> fft2(const std::vector<cplx>& in, int m) {
    std::vector<cplx> out = in;
    run_fft(out, m, FFTW_FORWARD);
    return out;
}

std::vector<cplx> ifft2(const std::vector<cplx>& in, int m) {
    std::vector<cplx> out = in;
    run_fft(out, m, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(m) * m);
    for (cplx& c : out) c *= scale;
    return out;
}

SpectralMap forward_transform(const FieldMap& f) {
    f.validate("forward_transform input");
    SpectralMap s;
    s.m = f.n();
    s.coeffs.assign(f.values().begin(), f.values().end());
    run_fft(s.coeffs, s.m, FFTW_FORWARD);
    return s;
}

FieldMap inverse_transform(const SpectralMap& s, double pitch, Unit unit) {
    std::vector<cplx> spatial = ifft2(s.coeffs, s.m);
    FieldMap f(s.m, pitch, unit);
    for (size_t k = 0; k < spatial.size(); ++k) f.values()[k] = spatial[k].real();
    f.validate("inverse_transform output");
    return f;
}

FieldMap convolve(const FieldMap& f, const FieldMap& g) {
    if (!f.same_shape(g))
        throw ConfigError("spectral", "convolve: operand shapes differ");
    SpectralMap fs = forward_transform(f);
    SpectralMap gs = forward_transform(g);
    for (size_t k = 0; k < fs.coeffs.size(); ++k) fs.coeffs[k] *= gs.coeffs[k];
    Unit unit = (f.unit() == Unit::KelvinPerWatt && g.unit() == Unit::Watts) ||
                        (f.unit() == Unit::Watts && g.unit() == Unit::KelvinPerWatt)
                    ? Unit::Kelvin
                    : f.unit();
    return inverse_transform(fs, f.pitch(), unit);
}

FieldMap hadamard(const FieldMap& f, const FieldMap& g) {
    if (!f.same_shape(g))
        throw ConfigError("spectral", "hadamard: operand shapes differ");
    FieldMap out = f;
    for (size_t k = 0; k < out.size(); ++k) out.values()[k] *= g.values()[k];
    out.validate("hadamard output");
    return out;
}

FieldMap mirror_pad(const FieldMap& f) {
    const int n = f.n();
    const int m = 2 * n;
    FieldMap out(m, f.pitch(), f.unit());
    auto mirror = [n](int i) { return i < n ? i : 2 * n - 1 - i; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out(i, j) = f(mirror(i), mirror(j));
    return out;
}

FieldMap crop_die(const FieldMap& padded, int n) {
    if (padded.n() != 2 * n)
        throw ConfigError("spectral", "crop_die: expected a 2n x 2n map");
    FieldMap out(n, padded.pitch(), padded.unit());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = padded(i, j);
    return out;
}

FieldMap center_kernel(const FieldMap& die_map) {
    const int n = die_map.n();
    const int m = 2 * n;
    const int c = n / 2;
    FieldMap k(m, die_map.pitch(), die_map.unit());
    // K[(x - c) mod m] = die_map[x]: displacement d from the source covers
    // d in [-c, n-1-c]; everything farther is zero (mask support is the die).
    for (int x = 0; x < n; ++x) {
        int i = (x - c + m) % m;
        for (int y = 0; y < n; ++y) {
            int j = (y - c + m) % m;
            k(i, j) = die_map(x, y);
        }
    }
    return k;
}

std::vector<cplx> kernel_fft(const FieldMap& die_map) {
    FieldMap k = center_kernel(die_map);
    std::vector<cplx> buf(k.values().begin(), k.values().end());
    run_fft(buf, k.n(), FFTW_FORWARD);
    return buf;
}

FieldMap kernel_to_die(const std::vector<cplx>& kernel_spatial, int n, double pitch, Unit unit) {
    const int m = 2 * n;
    const int c = n / 2;
    if (kernel_spatial.size() != static_cast<size_t>(m) * m)
        throw ConfigError("spectral", "kernel_to_die: buffer is not 2n x 2n");
    FieldMap out(n, pitch, unit);
    for (int x = 0; x < n; ++x) {
        int i = (x - c + m) % m;
        for (int y = 0; y < n; ++y) {
            int j = (y - c + m) % m;
            out(x, y) = kernel_spatial[static_cast<size_t>(i) * m + j].real();
        }
    }
    out.validate("kernel_to_die output");
    return out;
}

std::vector<double> symmetric_multiplier(const FieldMap& die_map) {
    const int n = die_map.n();
    const int m = 2 * n;
    const int c = n / 2;
    auto clampi = [n](int i) { return std::clamp(i, 0, n - 1); };
    std::vector<double> out(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        int dx = std::min(i, m - i);
        for (int j = 0; j < m; ++j) {
            int dy = std::min(j, m - j);
            double v = die_map(clampi(c + dx), clampi(c + dy)) +
                       die_map(clampi(c + dx), clampi(c - dy)) +
                       die_map(clampi(c - dx), clampi(c + dy)) +
                       die_map(clampi(c - dx), clampi(c - dy));
            out[static_cast<size_t>(i) * m + j] = 0.25 * v;
        }
    }
    return out;
}

} // namespace gtherm
