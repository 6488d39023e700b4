#include "variation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "kvfile.hpp"
#include "spectral.hpp"

namespace gtherm {

void VariationParams::validate() const {
    if (sigma_sys < 0.0 || sigma_rand < 0.0)
        throw ConfigError("variation", "sigmas must be non-negative");
    if (!(corr_range > 0.0 && corr_range <= 1.0))
        throw ConfigError("variation", "corr_range must lie in (0, 1]");
    if (!(dopant_spread >= 0.0))
        throw ConfigError("variation", "dopant_spread must be non-negative");
    if (!(cond_clamp > 0.0 && cond_clamp < 1.0))
        throw ConfigError("variation", "cond_clamp must lie in (0, 1)");
}

namespace {
const std::vector<std::string> kVariationKeys = {
    "sigma_sys", "sigma_rand", "corr_range", "seed",       "beta",         "beta_L",
    "beta_tox",  "dopant_spread", "eta",     "cond_clamp", "exponent_cap",
};
}

VariationParams load_variation(const std::string& path) {
    KvFile kv = KvFile::parse_file(path);
    kv.check_known(kVariationKeys);
    VariationParams p;
    p.sigma_sys = kv.get_double("sigma_sys", p.sigma_sys);
    p.sigma_rand = kv.get_double("sigma_rand", p.sigma_rand);
    p.corr_range = kv.get_double("corr_range", p.corr_range);
    p.seed = static_cast<uint64_t>(kv.get_int("seed", static_cast<long long>(p.seed)));
    p.beta = kv.get_double("beta", p.beta);
    p.beta_l = kv.get_double("beta_L", p.beta_l);
    p.beta_tox = kv.get_double("beta_tox", p.beta_tox);
    p.dopant_spread = kv.get_double("dopant_spread", p.dopant_spread);
    p.eta = kv.get_double("eta", p.eta);
    p.cond_clamp = kv.get_double("cond_clamp", p.cond_clamp);
    p.exponent_cap = kv.get_double("exponent_cap", p.exponent_cap);
    p.validate();
    return p;
}

void save_variation(const VariationParams& p, const std::string& path) {
    KvFile kv;
    kv.set_double("sigma_sys", p.sigma_sys);
    kv.set_double("sigma_rand", p.sigma_rand);
    kv.set_double("corr_range", p.corr_range);
    kv.set_int("seed", static_cast<long long>(p.seed));
    kv.set_double("beta", p.beta);
    kv.set_double("beta_L", p.beta_l);
    kv.set_double("beta_tox", p.beta_tox);
    kv.set_double("dopant_spread", p.dopant_spread);
    kv.set_double("eta", p.eta);
    kv.set_double("cond_clamp", p.cond_clamp);
    kv.set_double("exponent_cap", p.exponent_cap);
    kv.save(path);
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double spherical_correlogram(double d, double phi) {
    if (d >= phi) return 0.0;
    double x = d / phi;
    return 1.0 - 1.5 * x + 0.5 * x * x * x;
}

} // namespace

uint64_t derived_seed(uint64_t base, FieldPurpose purpose, uint64_t run) {
    return splitmix64(base ^ (static_cast<uint64_t>(purpose) << 32) ^ (run * 0x51ed2701ULL));
}

FieldMap gen_systematic_map(const VariationParams& p, int n, double pitch,
                            uint64_t seed_override) {
    p.validate();
    FieldMap out(n, pitch, Unit::Dimensionless);
    if (p.sigma_sys == 0.0) return out;

    const int m = 2 * n;  // circulant embedding on the doubled grid
    const double phi = p.corr_range * (n * pitch);

    // Covariance ring on the torus, then its eigenvalues via FFT.
    std::vector<cplx> cov(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        int di = std::min(i, m - i);
        for (int j = 0; j < m; ++j) {
            int dj = std::min(j, m - j);
            double d = std::hypot(di * pitch, dj * pitch);
            cov[static_cast<size_t>(i) * m + j] = spherical_correlogram(d, phi);
        }
    }
    std::vector<cplx> lambda = fft2(cov, m);
    // Clamp the (tiny) negative eigenvalues the embedding can produce and
    // rescale so the marginal variance is exact.
    double lam_sum = 0.0;
    for (auto& l : lambda) {
        double v = std::max(l.real(), 0.0);
        l = v;
        lam_sum += v;
    }
    const double want = static_cast<double>(m) * m;  // sum(lambda) for unit variance
    const double fix = want / lam_sum;

    std::mt19937_64 eng(seed_override);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> noise(static_cast<size_t>(m) * m);
    for (auto& w : noise) w = gauss(eng);
    std::vector<cplx> shaped = fft2(noise, m);
    for (size_t k = 0; k < shaped.size(); ++k)
        shaped[k] *= std::sqrt(lambda[k].real() * fix);
    std::vector<cplx> field = ifft2(shaped, m);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = p.sigma_sys * field[static_cast<size_t>(i) * m + j].real();
    out.validate("gen_systematic_map");
    return out;
}

FieldMap gen_systematic_map(const VariationParams& p, int n, double pitch) {
    return gen_systematic_map(p, n, pitch, p.seed);
}

FieldMap gen_random_map(const VariationParams& p, int n, double pitch,
                        uint64_t seed_override) {
    p.validate();
    FieldMap out(n, pitch, Unit::Dimensionless);
    if (p.sigma_rand == 0.0) return out;
    std::mt19937_64 eng(seed_override);
    std::normal_distribution<double> gauss(0.0, p.sigma_rand);
    for (double& v : out.values()) v = gauss(eng);
    return out;
}

FieldMap gen_random_map(const VariationParams& p, int n, double pitch) {
    return gen_random_map(p, n, pitch, p.seed);
}

void LeakageBaseline::validate() const {
    p_leak0.validate("p_leak0");
    if (p_leak0.min() < 0.0)
        throw ValidationError("variation", "leakage baseline has negative entries");
    double m = p_var.mean();
    if (std::abs(m) > 1e-12 * std::max(mu, 1e-300))
        throw ValidationError("variation", "p_var mean is not zero");
}

LeakageBaseline leakage_baseline(const FieldMap& nominal_leak, const FieldMap& d_length,
                                 const FieldMap& d_tox, double beta_l, double beta_tox,
                                 double beta, double exponent_cap) {
    if (!nominal_leak.same_shape(d_length) || !nominal_leak.same_shape(d_tox))
        throw ConfigError("variation", "leakage_baseline: map shapes differ");
    if (nominal_leak.min() < 0.0)
        throw ConfigError("variation", "leakage_baseline: nominal leakage must be >= 0");
    LeakageBaseline out;
    out.p_leak0 = nominal_leak;
    out.beta = beta;
    for (size_t k = 0; k < out.p_leak0.size(); ++k) {
        double expo = beta_l * d_length.values()[k] + beta_tox * d_tox.values()[k];
        if (std::abs(expo) > exponent_cap)
            throw ValidationError("variation",
                                  "leakage exponent " + std::to_string(expo) +
                                      " exceeds cap (unphysical variation inputs)");
        out.p_leak0.values()[k] = nominal_leak.values()[k] * std::exp(expo);
    }
    out.p_leak0.set_unit(Unit::Watts);
    out.mu = out.p_leak0.mean();
    out.p_var = out.p_leak0;
    for (double& v : out.p_var.values()) v -= out.mu;
    // Re-center exactly: subtracting the compensated mean once more removes
    // the last-ulp residue so mu + p_var reconstructs p_leak0 and
    // mean(p_var) stays below 1e-12 * mu.
    double resid = out.p_var.mean();
    if (resid != 0.0) {
        out.mu += resid;
        for (size_t k = 0; k < out.p_var.size(); ++k)
            out.p_var.values()[k] = out.p_leak0.values()[k] - out.mu;
    }
    out.validate();
    return out;
}

LeakageBaseline make_leakage_baseline(const FieldMap& nominal_leak, const VariationParams& p,
                                      uint64_t run) {
    const int n = nominal_leak.n();
    const double pitch = nominal_leak.pitch();
    FieldMap dl = gen_systematic_map(p, n, pitch,
                                     derived_seed(p.seed, FieldPurpose::GateLengthSys, run)) +
                  gen_random_map(p, n, pitch,
                                 derived_seed(p.seed, FieldPurpose::GateLengthRand, run));
    FieldMap dt = gen_systematic_map(p, n, pitch,
                                     derived_seed(p.seed, FieldPurpose::OxideSys, run)) +
                  gen_random_map(p, n, pitch,
                                 derived_seed(p.seed, FieldPurpose::OxideRand, run));
    return leakage_baseline(nominal_leak, dl, dt, p.beta_l, p.beta_tox, p.beta,
                            p.exponent_cap);
}

FieldMap leakage_at_temperature(const LeakageBaseline& base, const FieldMap& d_t) {
    if (!base.p_leak0.same_shape(d_t))
        throw ConfigError("variation", "leakage_at_temperature: shape mismatch");
    d_t.validate("leakage_at_temperature dT");
    FieldMap out = base.p_leak0;
    for (size_t k = 0; k < out.size(); ++k)
        out.values()[k] *= 1.0 + base.beta * d_t.values()[k];
    out.validate("leakage_at_temperature");
    return out;
}

ConductivityMap conductivity_map(double k_nominal, const VariationParams& p, int n,
                                 double pitch) {
    if (!(k_nominal > 0.0))
        throw ConfigError("variation", "conductivity_map: k_nominal must be positive");
    p.validate();
    ConductivityMap out{FieldMap(n, pitch, Unit::Dimensionless, k_nominal), k_nominal};
    if (p.dopant_spread == 0.0) return out;
    std::mt19937_64 eng(derived_seed(p.seed, FieldPurpose::Conductivity));
    std::normal_distribution<double> gauss(0.0, p.dopant_spread);
    for (double& v : out.k_map.values()) {
        double r = std::clamp(gauss(eng), -p.cond_clamp, p.cond_clamp);
        v = k_nominal * (1.0 + r);
    }
    return out;
}

ConductivityLinearization linearize_conductivity(double k0_300, double eta, double t_ambient,
                                                 double t_low, double t_high) {
    if (!(k0_300 > 0.0) || !(t_high > t_low))
        throw ConfigError("variation", "linearize_conductivity: bad inputs");
    // Least squares of kappa(T) against a + b*(T - t_ambient) at 1 K steps.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (double t = t_low; t <= t_high + 1e-9; t += 1.0) {
        double x = t - t_ambient;
        double y = k0_300 * std::pow(t / 300.0, -eta);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    double denom = cnt * sxx - sx * sx;
    double b = (cnt * sxy - sx * sy) / denom;
    double a = (sy - b * sx) / cnt;
    ConductivityLinearization lin;
    lin.k0_prime = a;
    lin.c = -b / a;
    for (double t = t_low; t <= t_high + 1e-9; t += 1.0) {
        double truth = k0_300 * std::pow(t / 300.0, -eta);
        double fit = a * (1.0 - lin.c * (t - t_ambient));
        lin.max_rel_err = std::max(lin.max_rel_err, std::abs(fit - truth) / truth);
    }
    return lin;
}

double conductivity_at_temperature(double k0_prime, double c, double d_t) {
    double k = k0_prime * (1.0 - c * d_t);
    if (!(k > 0.0))
        throw ValidationError("variation",
                              "linearized conductivity is non-positive at dT = " +
                                  std::to_string(d_t) + " (outside linearization validity)");
    return k;
}

} // namespace gtherm
