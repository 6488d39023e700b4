#include "greens.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <string>

#include "errors.hpp"
#include "kvfile.hpp"

namespace fs = std::filesystem;

namespace gtherm {

namespace {

constexpr double kDenomFloor = 1e-6;
// Modes whose baseline spectrum is this far below the peak carry no usable
// energy; they saturate instantly instead of defining a time constant.
constexpr double kSpectrumFloor = 1e-6;

std::vector<cplx> fmu_spectrum(double mu, int m) {
    // Spectrum of the constant-mu map, normalized scale: a single impulse of
    // height mu at zero frequency. The unnormalized m^2 scale provably drives
    // the DC denominator negative for realistic total leakage.
    std::vector<cplx> f(static_cast<size_t>(m) * m, 0.0);
    f[0] = mu;
    return f;
}

void check_denominator(const std::vector<cplx>& den, const char* where) {
    for (const cplx& d : den)
        if (std::abs(d) < kDenomFloor)
            throw RunawayError("greens",
                               std::string(where) +
                                   ": spectral denominator collapsed below 1e-6 "
                                   "(leakage feedback gain reached unity)");
}

std::pair<int, int> farthest_corner(int n) {
    const int c = n / 2;
    std::pair<int, int> best{0, 0};
    double best_d = -1.0;
    for (int i : {0, n - 1})
        for (int j : {0, n - 1}) {
            double d = std::hypot(static_cast<double>(i - c), static_cast<double>(j - c));
            if (d > best_d) {
                best_d = d;
                best = {i, j};
            }
        }
    return best;
}

// Saturation factors 1 - exp(-t/tau) with tau = C F(f_sp0) + alpha C g F(T_ss).
std::vector<cplx> transient_factors(const std::vector<cplx>& fk_sp0,
                                    const std::vector<double>& g_mult,
                                    const std::vector<cplx>& f_ss, double alpha,
                                    double capacitance, double t) {
    const size_t sz = fk_sp0.size();
    std::vector<cplx> factor(sz);
    if (t == 0.0) return factor;  // exactly zero rise at t = 0
    double fk_max = 0.0;
    for (const cplx& v : fk_sp0) fk_max = std::max(fk_max, std::abs(v));
    for (size_t k = 0; k < sz; ++k) {
        if (std::abs(fk_sp0[k]) <= kSpectrumFloor * fk_max) {
            factor[k] = 1.0;  // spectrally empty mode: treat as saturated
            continue;
        }
        cplx tau = capacitance * fk_sp0[k] + alpha * capacitance * g_mult[k] * f_ss[k];
        if (tau.real() <= 0.0)
            throw CalibrationError("greens",
                                   "non-positive transient time constant at an energetic "
                                   "frequency; transient closed form is invalid here");
        factor[k] = 1.0 - std::exp(-t / tau);
    }
    return factor;
}

FieldMap clamp_small_negatives(FieldMap f, double tolerance, const char* what) {
    double peak = f.max();
    double floor = -tolerance * std::max(peak, 0.0);
    for (double& v : f.values()) {
        if (v < floor)
            throw ValidationError("greens", std::string(what) +
                                                ": negative value beyond spectral-ringing "
                                                "tolerance");
        if (v < 0.0) v = 0.0;
    }
    return f;
}

} // namespace

void GreensSet::validate() const {
    if (n < 2 || f_sp0.n() != n || f_det.n() != n)
        throw ConfigError("greens", "GreensSet maps are inconsistent with n");
    if (f_sp0.min() < 0.0)
        throw ValidationError("greens", "f_sp0 has negative entries");
    auto [pi, pj] = f_sp0.argmax();
    if (pi != center() || pj != center())
        throw ValidationError("greens", "f_sp0 peak is not at the source cell");
    f_det.validate("f_det");
    f_rand.validate("f_rand");
}

BaselineExtract extract_baseline(const ChipStack& stack, const ConductivityMap& k_die) {
    BaselineExtract out;
    out.f_sp0 = impulse_response(stack, k_die);
    const int n = stack.n;
    double ring_sum = 0.0;
    int ring_cnt = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                ring_sum += out.f_sp0(i, j);
                ++ring_cnt;
            }
    out.phi = ring_sum / ring_cnt;
    auto [ci, cj] = farthest_corner(n);
    out.kappa_inf = out.f_sp0(ci, cj);
    return out;
}

AlphaFit fit_alpha(const ChipStack& stack, const std::vector<double>& sweep, double c,
                   double k0_prime) {
    if (sweep.size() < 4)
        throw CalibrationError("greens", "conductivity sweep needs at least 4 points");
    double spread = *std::max_element(sweep.begin(), sweep.end()) -
                    *std::min_element(sweep.begin(), sweep.end());
    if (!(spread > 1e-9 * k0_prime))
        throw CalibrationError("greens", "degenerate conductivity sweep (no spread)");

    AlphaFit out;
    VariationParams no_var;
    no_var.dopant_spread = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double kappa : sweep) {
        ChipStack s = stack;
        s.layers[0].conductivity = kappa;
        ConductivityMap km = conductivity_map(kappa, no_var, s.n, s.pitch());
        FieldMap resp = impulse_response(s, km);
        double peak = resp(s.n / 2, s.n / 2);
        out.report.sweep.emplace_back(kappa, peak);
        double x = kappa - k0_prime;
        sx += x; sy += peak; sxx += x * x; sxy += x * peak;
    }
    const double cnt = static_cast<double>(sweep.size());
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    double intercept = (sy - slope * sx) / cnt;
    double ss_res = 0, ss_tot = 0, ybar = sy / cnt;
    for (auto [kappa, peak] : out.report.sweep) {
        double fit = intercept + slope * (kappa - k0_prime);
        ss_res += (peak - fit) * (peak - fit);
        ss_tot += (peak - ybar) * (peak - ybar);
    }
    out.report.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    if (out.report.fit_r2 < 0.95)
        throw CalibrationError("greens", "response-vs-conductivity fit r^2 = " +
                                             std::to_string(out.report.fit_r2) +
                                             " < 0.95; linearization invalid for this stack");
    out.report.c_prime = -slope / intercept;
    out.report.c = c;
    out.alpha = out.report.c_prime * c * k0_prime;
    out.report.alpha = out.alpha;
    return out;
}

FieldMap make_g_shift(const FieldMap& f_sp0, double kappa_inf, double center_value) {
    FieldMap g = f_sp0;
    for (double& v : g.values()) v += center_value - kappa_inf;
    g.validate("g_sp0");
    return g;
}

FieldMap q_rand(const FieldMap& p_var) {
    const int c = p_var.n() / 2;
    auto [fi, fj] = farthest_corner(p_var.n());
    double shift = p_var(c, c) - p_var(fi, fj);
    FieldMap q = p_var;
    for (double& v : q.values()) v += shift;
    return q;
}

std::vector<double> alpha_multiplier(const FieldMap& g_sp0) {
    const int c = g_sp0.n() / 2;
    std::vector<double> x = symmetric_multiplier(g_sp0);
    const double center = g_sp0(c, c);
    for (double& v : x) v = center - v;
    return x;
}

std::vector<cplx> baseline_kernel_spectrum(const FieldMap& f_sp0, double phi) {
    FieldMap decaying = f_sp0;
    for (double& v : decaying.values()) v -= phi;
    std::vector<cplx> s = kernel_fft(decaying);
    const double m2 = static_cast<double>(s.size());
    s[0] += 0.25 * phi * m2;
    return s;
}

std::vector<cplx> deterministic_spectrum(const FieldMap& f_sp0, double phi,
                                         const FieldMap& g_sp0, double alpha, double beta,
                                         double mu) {
    const int m = 2 * f_sp0.n();
    std::vector<cplx> fk = baseline_kernel_spectrum(f_sp0, phi);
    std::vector<double> g = alpha_multiplier(g_sp0);
    std::vector<cplx> fmu = fmu_spectrum(mu, m);
    std::vector<cplx> den(fk.size());
    for (size_t k = 0; k < fk.size(); ++k)
        den[k] = 1.0 - alpha * g[k] * (1.0 + fmu[k]) - mu * beta * fk[k];
    check_denominator(den, "deterministic_greens");
    for (size_t k = 0; k < fk.size(); ++k) fk[k] /= den[k];
    return fk;
}

FieldMap deterministic_greens(const FieldMap& f_sp0, double phi, const FieldMap& g_sp0,
                              double alpha, double beta, double mu) {
    const int n = f_sp0.n();
    std::vector<cplx> fdet = deterministic_spectrum(f_sp0, phi, g_sp0, alpha, beta, mu);
    return kernel_to_die(ifft2(fdet, 2 * n), n, f_sp0.pitch(), Unit::KelvinPerWatt);
}

FieldMap random_greens(const std::vector<cplx>& f_det_spec, const FieldMap& f_sp0,
                       double phi, const FieldMap& g_sp0, const FieldMap& p_var,
                       double alpha, double beta, double mu) {
    if (!p_var.same_shape(f_sp0))
        throw ConfigError("greens", "random_greens: p_var shape mismatch");
    const int n = f_sp0.n();
    const int m = 2 * n;
    if (f_det_spec.size() != static_cast<size_t>(m) * m)
        throw ConfigError("greens", "random_greens: f_det_spec is not 2n x 2n");
    std::vector<cplx> fk = baseline_kernel_spectrum(f_sp0, phi);
    const std::vector<cplx>& fdet = f_det_spec;
    std::vector<double> g = alpha_multiplier(g_sp0);
    std::vector<double> q = symmetric_multiplier(q_rand(p_var));
    std::vector<cplx> fpvar = kernel_fft(p_var);
    std::vector<cplx> fmu = fmu_spectrum(mu, m);

    std::vector<cplx> num(fk.size()), den(fk.size());
    for (size_t k = 0; k < fk.size(); ++k) {
        num[k] = fdet[k] * (beta * fk[k] * q[k] + alpha * fpvar[k] * g[k]);
        den[k] = 1.0 - alpha * (1.0 + fmu[k] + fpvar[k]) * g[k] - mu * beta * fk[k] -
                 beta * fk[k] * q[k];
    }
    check_denominator(den, "random_greens");
    std::vector<cplx> frand(fk.size());
    for (size_t k = 0; k < fk.size(); ++k) frand[k] = num[k] / den[k];
    return kernel_to_die(ifft2(frand, m), n, f_sp0.pitch(), Unit::KelvinPerWatt);
}

FieldMap transient_greens(const FieldMap& steady, const FieldMap& f_sp0, double phi,
                          const FieldMap& g_sp0, double alpha, double capacitance,
                          double t) {
    if (t < 0.0) throw ConfigError("greens", "transient_greens: negative time");
    if (!(capacitance > 0.0))
        throw CalibrationError("greens", "transient_greens: capacitance must be positive");
    const int n = f_sp0.n();
    const int m = 2 * n;
    if (t == 0.0) return FieldMap(n, f_sp0.pitch(), Unit::KelvinPerWatt);
    std::vector<cplx> fk = baseline_kernel_spectrum(f_sp0, phi);
    std::vector<cplx> fss = kernel_fft(steady);
    std::vector<double> g = alpha_multiplier(g_sp0);
    std::vector<cplx> factor = transient_factors(fk, g, fss, alpha, capacitance, t);
    std::vector<cplx> ftran(fss.size());
    for (size_t k = 0; k < fss.size(); ++k) ftran[k] = fss[k] * factor[k];
    FieldMap out = kernel_to_die(ifft2(ftran, m), n, f_sp0.pitch(), Unit::KelvinPerWatt);
    // Complex per-mode time constants mix phases; early-time maps undershoot
    // by up to a few tenths of a percent of their peak at far cells.
    return clamp_small_negatives(std::move(out), 1e-2, "transient_greens");
}

CapacitanceFit fit_capacitance(const ChipStack& stack, const ConductivityMap& k_die,
                               const FieldMap& f_sp0, double phi,
                               const std::vector<double>& sample_times, double oracle_dt) {
    std::vector<double> times = sample_times;
    if (times.empty())
        for (double t : {0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0})
            times.push_back(1e-3 * t);

    ThermalNetwork net(stack, k_die);
    std::vector<FieldMap> oracle = net.transient_impulse(times, oracle_dt);
    const int c = stack.n / 2;
    std::vector<double> target(times.size());
    for (size_t i = 0; i < times.size(); ++i) target[i] = oracle[i](c, c);
    const double steady_center = f_sp0(c, c);

    const int m = 2 * stack.n;
    std::vector<cplx> fk = baseline_kernel_spectrum(f_sp0, phi);
    double fk_max = 0.0;
    for (const cplx& v : fk) fk_max = std::max(fk_max, std::abs(v));

    // Center-cell model: die center sits at kernel index 0, so the inverse
    // transform there is the plain (1/m^2) sum over modes.
    auto model = [&](double cap) {
        std::vector<double> vals(times.size(), 0.0);
        for (const cplx& f : fk) {
            if (std::abs(f) <= kSpectrumFloor * fk_max) {
                for (size_t i = 0; i < times.size(); ++i) vals[i] += f.real();
                continue;
            }
            cplx tau = cap * f;
            for (size_t i = 0; i < times.size(); ++i) {
                cplx term = tau.real() > 0.0 ? f * (1.0 - std::exp(-times[i] / tau)) : f;
                vals[i] += term.real();
            }
        }
        double inv = 1.0 / (static_cast<double>(m) * m);
        for (double& v : vals) v *= inv;
        return vals;
    };
    auto sse = [&](double cap) {
        std::vector<double> v = model(cap);
        double s = 0.0;
        for (size_t i = 0; i < times.size(); ++i) s += (v[i] - target[i]) * (v[i] - target[i]);
        return s;
    };

    // Golden section on log10(C); bracket covers lumped-node to package scale.
    double lo = -8.0, hi = 0.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = sse(std::pow(10.0, a)), fb = sse(std::pow(10.0, b));
    for (int it = 0; it < 90; ++it) {
        if (fa < fb) {
            hi = b; b = a; fb = fa;
            a = hi - gr * (hi - lo);
            fa = sse(std::pow(10.0, a));
        } else {
            lo = a; a = b; fa = fb;
            b = lo + gr * (hi - lo);
            fb = sse(std::pow(10.0, b));
        }
    }
    CapacitanceFit fit;
    fit.capacitance = std::pow(10.0, 0.5 * (lo + hi));
    fit.residual = std::sqrt(sse(fit.capacitance) / times.size()) / steady_center;
    if (fit.residual > 0.10)
        throw CalibrationError("greens", "transient capacitance fit residual " +
                                             std::to_string(fit.residual) +
                                             " exceeds 10% of the steady response");
    return fit;
}

Calibration calibrate(const ChipStack& stack, const VariationParams& var,
                      const FieldMap& nominal_leak, const CalibrateOptions& opts) {
    stack.validate();
    var.validate();
    if (nominal_leak.n() != stack.n)
        throw ConfigError("greens", "nominal leakage map does not match the stack grid");

    Calibration cal;
    cal.stack = stack;
    const double k0_prime = stack.die().conductivity;
    ConductivityLinearization lin =
        linearize_conductivity(k0_prime, var.eta, stack.ambient);
    cal.cond_c = lin.c;

    cal.k_die = conductivity_map(k0_prime, var, stack.n, stack.pitch());

    GreensSet gs;
    gs.n = stack.n;
    gs.pitch = stack.pitch();
    BaselineExtract base = extract_baseline(stack, cal.k_die);
    gs.f_sp0 = base.f_sp0;
    gs.phi = base.phi;
    gs.kappa_inf = base.kappa_inf;
    gs.g_sp0 = make_g_shift(gs.f_sp0, gs.kappa_inf, gs.f_sp0(gs.center(), gs.center()));

    std::vector<double> sweep = opts.conductivity_sweep;
    if (sweep.empty())
        for (double s : {0.75, 0.80, 0.85, 0.90, 0.95, 1.00, 1.05}) sweep.push_back(s * k0_prime);
    AlphaFit af = fit_alpha(stack, sweep, lin.c, k0_prime);
    gs.alpha = af.alpha;
    cal.report = af.report;

    cal.leak = make_leakage_baseline(nominal_leak, var);
    gs.beta = cal.leak.beta;
    gs.mu = cal.leak.mu;
    gs.p_var = cal.leak.p_var;

    std::vector<cplx> fdet_spec =
        deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, gs.alpha, gs.beta, gs.mu);
    gs.f_det = kernel_to_die(ifft2(fdet_spec, 2 * gs.n), gs.n, gs.pitch,
                             Unit::KelvinPerWatt);
    gs.f_rand = random_greens(fdet_spec, gs.f_sp0, gs.phi, gs.g_sp0, gs.p_var, gs.alpha,
                              gs.beta, gs.mu);

    if (opts.fit_rand_scale) {
        // The Hadamard composition's power scaling is an empirical
        // approximation; regress its gain once against the oracle on a
        // uniform-power probe so the shift-variant term carries the
        // feedback-amplified leakage patches at the right magnitude.
        FieldMap probe(gs.n, gs.pitch, Unit::Watts,
                       opts.rand_probe_watts / (static_cast<double>(gs.n) * gs.n));
        SolveOptions all_on;
        all_on.temp_dep_leakage = true;
        all_on.temp_dep_conductivity = true;
        all_on.cond_c = cal.cond_c;
        all_on.leakage = cal.leak;
        ThermalNetwork net(stack, cal.k_die);
        FieldMap oracle = net.steady_solve(probe, all_on).die_rise;

        FieldMap applied = probe + cal.leak.p_leak0;
        FieldMap padded = mirror_pad(applied);
        std::vector<cplx> fp(padded.values().begin(), padded.values().end());
        fp = fft2(fp, padded.n());
        for (size_t k = 0; k < fp.size(); ++k) fp[k] *= fdet_spec[k];
        std::vector<cplx> spatial = ifft2(fp, padded.n());
        double num = 0.0, den = 0.0;
        const double total = applied.sum();
        for (int i = 0; i < gs.n; ++i)
            for (int j = 0; j < gs.n; ++j) {
                double t_det = spatial[static_cast<size_t>(i) * 2 * gs.n + j].real();
                double b = gs.f_rand(i, j) * gs.p_var(i, j) * total;
                num += (oracle(i, j) - t_det) * b;
                den += b * b;
            }
        gs.rand_scale = den > 0.0 ? std::clamp(num / den, 0.0, 500.0) : 1.0;
    }

    if (opts.fit_transient) {
        CapacitanceFit cf = fit_capacitance(stack, cal.k_die, gs.f_sp0, gs.phi);
        gs.capacitance = cf.capacitance;
        cal.report.cap_residual = cf.residual;
        std::vector<cplx> fk = baseline_kernel_spectrum(gs.f_sp0, gs.phi);
        std::vector<double> gm = alpha_multiplier(gs.g_sp0);
        gs.t_samples.reserve(opts.tran_samples);
        gs.tran.reserve(opts.tran_samples);
        for (int i = 1; i <= opts.tran_samples; ++i) {
            double t = opts.tran_horizon * i / opts.tran_samples;
            std::vector<cplx> factor =
                transient_factors(fk, gm, fdet_spec, gs.alpha, gs.capacitance, t);
            std::vector<cplx> ftran(fdet_spec.size());
            for (size_t k = 0; k < ftran.size(); ++k) ftran[k] = fdet_spec[k] * factor[k];
            FieldMap map = kernel_to_die(ifft2(ftran, 2 * gs.n), gs.n, gs.pitch,
                                         Unit::KelvinPerWatt);
            gs.t_samples.push_back(t);
            gs.tran.push_back(clamp_small_negatives(std::move(map), 1e-2, "tran tensor"));
        }
    }
    gs.validate();
    cal.gs = std::move(gs);
    return cal;
}

void refresh_random(GreensSet& gs, const FieldMap& p_var) {
    std::vector<cplx> fdet_spec =
        deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, gs.alpha, gs.beta, gs.mu);
    gs.f_rand = random_greens(fdet_spec, gs.f_sp0, gs.phi, gs.g_sp0, p_var, gs.alpha,
                              gs.beta, gs.mu);
    gs.p_var = p_var;
}

namespace {
std::string tran_name(size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "tran_%03zu.map", i);
    return buf;
}
} // namespace

void save_greens(const GreensSet& gs, const CalibrationReport& report,
                 const std::string& dir) {
    fs::create_directories(dir);
    KvFile manifest;
    manifest.set_int("n", gs.n);
    manifest.set_double("pitch", gs.pitch);
    manifest.set_double("phi", gs.phi);
    manifest.set_double("kappa_inf", gs.kappa_inf);
    manifest.set_double("alpha", gs.alpha);
    manifest.set_double("beta", gs.beta);
    manifest.set_double("mu", gs.mu);
    manifest.set_double("capacitance", gs.capacitance);
    manifest.set_double("rand_scale", gs.rand_scale);
    manifest.set_int("tran_count", static_cast<long long>(gs.tran.size()));
    if (!gs.t_samples.empty()) {
        std::string ts;
        char buf[40];
        for (size_t i = 0; i < gs.t_samples.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", gs.t_samples[i]);
            if (i) ts += ',';
            ts += buf;
        }
        manifest.set("t_samples", ts);
    }
    manifest.save(dir + "/manifest.txt");

    KvFile calib;
    calib.set_double("c_prime", report.c_prime);
    calib.set_double("fit_r2", report.fit_r2);
    calib.set_double("c", report.c);
    calib.set_double("alpha", report.alpha);
    calib.set_double("cap_residual", report.cap_residual);
    std::string ks, ps;
    char buf[40];
    for (size_t i = 0; i < report.sweep.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", report.sweep[i].first);
        if (i) ks += ',';
        ks += buf;
        std::snprintf(buf, sizeof buf, "%.17g", report.sweep[i].second);
        if (i) ps += ',';
        ps += buf;
    }
    if (!report.sweep.empty()) {
        calib.set("sweep_conductivity", ks);
        calib.set("sweep_peak", ps);
    }
    calib.save(dir + "/calibration.txt");

    save_field(gs.f_sp0, dir + "/f_sp0.map");
    save_field(gs.g_sp0, dir + "/g_sp0.map");
    save_field(gs.f_det, dir + "/f_det.map");
    save_field(gs.f_rand, dir + "/f_rand.map");
    save_field(gs.p_var, dir + "/p_var.map");
    for (size_t i = 0; i < gs.tran.size(); ++i)
        save_field(gs.tran[i], dir + "/" + tran_name(i));
}

GreensSet load_greens(const std::string& dir) {
    KvFile manifest = KvFile::parse_file(dir + "/manifest.txt");
    GreensSet gs;
    gs.n = static_cast<int>(manifest.get_int("n"));
    gs.pitch = manifest.get_double("pitch");
    gs.phi = manifest.get_double("phi");
    gs.kappa_inf = manifest.get_double("kappa_inf");
    gs.alpha = manifest.get_double("alpha");
    gs.beta = manifest.get_double("beta");
    gs.mu = manifest.get_double("mu");
    gs.capacitance = manifest.get_double("capacitance");
    gs.rand_scale = manifest.get_double("rand_scale", 1.0);
    gs.f_sp0 = load_field(dir + "/f_sp0.map");
    gs.g_sp0 = load_field(dir + "/g_sp0.map");
    gs.f_det = load_field(dir + "/f_det.map");
    gs.f_rand = load_field(dir + "/f_rand.map");
    gs.p_var = load_field(dir + "/p_var.map");
    long long cnt = manifest.get_int("tran_count");
    if (cnt > 0) {
        gs.t_samples = manifest.get_double_list("t_samples");
        if (static_cast<long long>(gs.t_samples.size()) != cnt)
            throw ConfigError("greens", dir + ": t_samples does not match tran_count");
        for (long long i = 0; i < cnt; ++i)
            gs.tran.push_back(load_field(dir + "/" + tran_name(static_cast<size_t>(i))));
    }
    gs.validate();
    return gs;
}

CalibrationReport load_calibration_report(const std::string& dir) {
    KvFile kv = KvFile::parse_file(dir + "/calibration.txt");
    CalibrationReport r;
    r.c_prime = kv.get_double("c_prime");
    r.fit_r2 = kv.get_double("fit_r2");
    r.c = kv.get_double("c");
    r.alpha = kv.get_double("alpha");
    r.cap_residual = kv.get_double("cap_residual", 0.0);
    if (kv.has("sweep_conductivity")) {
        auto ks = kv.get_double_list("sweep_conductivity");
        auto ps = kv.get_double_list("sweep_peak");
        for (size_t i = 0; i < std::min(ks.size(), ps.size()); ++i)
            r.sweep.emplace_back(ks[i], ps[i]);
    }
    return r;
}

} // namespace gtherm
