#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <atomic>
#include <thread>

#include "errors.hpp"
#include "kvfile.hpp"
#include "spectral.hpp"

namespace fs = std::filesystem;

namespace gtherm {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

// Negatives from spectral ringing are clamped to zero. The tolerance is
// tight on the pure deterministic path; with the shift-variant correction or
// windowed superposition in play, small model overshoot at cold cells is
// part of the approximation and gets a 2%-of-peak allowance.
void clamp_negatives(FieldMap& f, double peak, double tolerance, ThermalResult& res) {
    double floor = -tolerance * std::max(peak, 0.0);
    for (double& v : f.values()) {
        if (v < 0.0) {
            res.min_raw = std::min(res.min_raw, v);
            if (v < floor)
                throw ValidationError("solver",
                                      "negative temperature rise beyond tolerance: " +
                                          std::to_string(v) + " K");
            v = 0.0;
            ++res.clamped_cells;
        }
    }
}

std::vector<cplx> padded_fft(const FieldMap& p) {
    FieldMap padded = mirror_pad(p);
    std::vector<cplx> buf(padded.values().begin(), padded.values().end());
    return fft2(buf, padded.n());
}

FieldMap crop_real(const std::vector<cplx>& spatial, int n, double pitch, Unit unit) {
    const int m = 2 * n;
    FieldMap out(n, pitch, unit);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = spatial[static_cast<size_t>(i) * m + j].real();
    return out;
}

void check_power(const FieldMap& p, const PreparedGreens& pg, const char* what) {
    if (p.n() != pg.n())
        throw ConfigError("solver", std::string(what) + ": power map does not match the "
                                                        "GreensSet grid");
    p.validate(what);
    if (p.min() < 0.0)
        throw ConfigError("solver", std::string(what) + ": powers must be >= 0");
}

} // namespace

void PowerTrace::validate() const {
    if (frames.empty()) throw ConfigError("solver", "power trace is empty");
    if (!(dt > 0.0)) throw ConfigError("solver", "power trace dt must be positive");
    for (const FieldMap& f : frames) {
        if (!f.same_shape(frames.front()))
            throw ConfigError("solver", "power trace frames differ in shape");
        f.validate("trace frame");
        if (f.min() < 0.0) throw ConfigError("solver", "trace powers must be >= 0");
    }
}

PowerTrace load_trace(const std::string& dir) {
    KvFile kv = KvFile::parse_file(dir + "/trace.txt");
    PowerTrace tr;
    tr.dt = kv.get_double("dt");
    long long cnt = kv.get_int("frames");
    for (long long i = 0; i < cnt; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "frame_%04lld.map", i);
        tr.frames.push_back(load_field(dir + "/" + buf));
    }
    tr.validate();
    return tr;
}

void save_trace(const PowerTrace& trace, const std::string& dir) {
    trace.validate();
    fs::create_directories(dir);
    KvFile kv;
    kv.set_double("dt", trace.dt);
    kv.set_int("frames", static_cast<long long>(trace.frames.size()));
    kv.save(dir + "/trace.txt");
    for (size_t i = 0; i < trace.frames.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "frame_%04zu.map", i);
        save_field(trace.frames[i], dir + "/" + buf);
    }
}

PreparedGreens::PreparedGreens(const GreensSet& gs) : gs_(&gs), m_(2 * gs.n) {
    gs.validate();
    // Full 2n spectrum: re-transforming the cropped f_det would lose the
    // feedback tail past the die window.
    fk_det_ = deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, gs.alpha, gs.beta, gs.mu);
    fk_sp0_ = baseline_kernel_spectrum(gs.f_sp0, gs.phi);
    g_mult_ = alpha_multiplier(gs.g_sp0);
    det_center_ = gs.det_center();
}

FieldMap PreparedGreens::convolve_det(const FieldMap& p_dyn) const {
    std::vector<cplx> fp = padded_fft(p_dyn);
    for (size_t k = 0; k < fp.size(); ++k) fp[k] *= fk_det_[k];
    return crop_real(ifft2(fp, m_), gs_->n, gs_->pitch, Unit::Kelvin);
}

std::vector<cplx> PreparedGreens::transient_spectrum(double t) const {
    if (t < 0.0) throw ConfigError("solver", "negative elapsed time");
    std::vector<cplx> out(fk_det_.size(), 0.0);
    if (t == 0.0) return out;
    double fk_max = 0.0;
    for (const cplx& v : fk_sp0_) fk_max = std::max(fk_max, std::abs(v));
    const double cap = gs_->capacitance;
    if (!(cap > 0.0))
        throw CalibrationError("solver", "GreensSet has no fitted capacitance");
    for (size_t k = 0; k < out.size(); ++k) {
        if (std::abs(fk_sp0_[k]) <= 1e-6 * fk_max) {
            out[k] = fk_det_[k];  // spectrally empty: saturated immediately
            continue;
        }
        cplx tau = cap * fk_sp0_[k] + gs_->alpha * cap * g_mult_[k] * fk_det_[k];
        if (tau.real() <= 0.0)
            throw CalibrationError("solver", "non-positive transient time constant");
        out[k] = fk_det_[k] * (1.0 - std::exp(-t / tau));
    }
    return out;
}

double PreparedGreens::saturation(double t) const {
    std::vector<cplx> sp = transient_spectrum(t);
    cplx num = std::accumulate(sp.begin(), sp.end(), cplx(0.0));
    cplx den = std::accumulate(fk_det_.begin(), fk_det_.end(), cplx(0.0));
    return num.real() / den.real();
}

ThermalResult steady_profile(const PreparedGreens& pg, const FieldMap& p_dyn,
                             const FieldMap& p_var, const ProfileOptions& opts) {
    auto t0 = clock_type::now();
    check_power(p_dyn, pg, "steady_profile");
    const bool use_rand = opts.with_rand && p_var.n() == pg.n();
    if (opts.with_rand && p_var.n() != pg.n() && p_var.n() != 0)
        throw ConfigError("solver", "steady_profile: p_var shape mismatch");

    ThermalResult res;
    FieldMap t_map = pg.convolve_det(p_dyn);
    double tolerance = 1e-9;
    if (use_rand) {
        double total = p_dyn.sum() * pg.gs().rand_scale;
        FieldMap rnd = hadamard(pg.gs().f_rand, p_var);
        t_map += rnd * total;
        tolerance = 0.02;
    }
    clamp_negatives(t_map, t_map.max(), tolerance, res);
    res.rise.push_back(std::move(t_map));
    res.timing.solve_ms = ms_since(t0);
    return res;
}

ThermalResult step_response(const PreparedGreens& pg, const FieldMap& p_dyn,
                            const FieldMap& p_var, const std::vector<double>& times,
                            const ProfileOptions& opts) {
    auto t0 = clock_type::now();
    check_power(p_dyn, pg, "step_response");
    for (double t : times)
        if (t < 0.0) throw ConfigError("solver", "step_response: negative time");
    const bool use_rand = opts.with_rand && p_var.n() == pg.n();

    ThermalResult res;
    res.times = times;
    std::vector<cplx> fp = padded_fft(p_dyn);
    const double total = p_dyn.sum();
    const int m = 2 * pg.n();
    for (double t : times) {
        std::vector<cplx> sp = pg.transient_spectrum(t);
        for (size_t k = 0; k < sp.size(); ++k) sp[k] *= fp[k];
        FieldMap t_map = crop_real(ifft2(sp, m), pg.n(), pg.gs().pitch, Unit::Kelvin);
        double tolerance = 0.01;  // early-time phase-mixing undershoot
        if (use_rand && t > 0.0) {
            FieldMap rnd = hadamard(pg.gs().f_rand, p_var);
            t_map += rnd * (total * pg.gs().rand_scale * pg.saturation(t));
            tolerance = 0.02;
        }
        clamp_negatives(t_map, t_map.max(), tolerance, res);
        res.rise.push_back(std::move(t_map));
    }
    res.timing.solve_ms = ms_since(t0);
    return res;
}

ThermalResult time_varying_profile(const PreparedGreens& pg, const PowerTrace& trace,
                                   int k_window, const FieldMap& p_var,
                                   const ProfileOptions& opts) {
    auto t0 = clock_type::now();
    trace.validate();
    if (trace.frames.front().n() != pg.n())
        throw ConfigError("solver", "trace frames do not match the GreensSet grid");
    if (k_window <= 0)
        k_window = static_cast<int>(std::ceil(0.005 / trace.dt));
    k_window = std::max(1, k_window);
    const bool use_rand = opts.with_rand && p_var.n() == pg.n();
    const int m = 2 * pg.n();
    const int steps = static_cast<int>(trace.frames.size());
    const int k = std::min(k_window, steps);

    // Window spectra at elapsed times i*dt plus the saturated tail.
    std::vector<std::vector<cplx>> window(k + 1);
    std::vector<double> sat(k + 1, 1.0);
    for (int i = 1; i <= k; ++i) {
        window[i] = pg.transient_spectrum(i * trace.dt);
        sat[i] = pg.saturation(i * trace.dt);
    }

    std::vector<std::vector<cplx>> fp(steps);
    std::vector<double> totals(steps);
    for (int j = 0; j < steps; ++j) {
        fp[j] = padded_fft(trace.frames[j]);
        totals[j] = trace.frames[j].sum();
    }

    FieldMap rnd = use_rand ? hadamard(pg.gs().f_rand, p_var) * pg.gs().rand_scale
                            : FieldMap(pg.n(), pg.gs().pitch, Unit::KelvinPerWatt);

    ThermalResult res;
    std::vector<cplx> acc(static_cast<size_t>(m) * m);
    std::vector<FieldMap> raw;
    raw.reserve(steps);
    std::vector<double> rnd_scale(steps, 0.0);
    for (int nstep = 1; nstep <= steps; ++nstep) {
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        double scale = 0.0;
        const int kk = std::min(k, nstep);
        for (int i = 1; i <= kk; ++i) {
            int cur = nstep - i;          // 0-based index of P(t_{n-i+1})
            int prev = nstep - i - 1;     // P(t_{n-i}), zero before the trace
            const std::vector<cplx>& f_cur = fp[cur];
            double d_total = totals[cur] - (prev >= 0 ? totals[prev] : 0.0);
            scale += sat[i] * d_total;
            if (prev >= 0) {
                const std::vector<cplx>& f_prev = fp[prev];
                for (size_t q = 0; q < acc.size(); ++q)
                    acc[q] += window[i][q] * (f_cur[q] - f_prev[q]);
            } else {
                for (size_t q = 0; q < acc.size(); ++q) acc[q] += window[i][q] * f_cur[q];
            }
        }
        if (nstep > k) {
            int tail = nstep - k - 1;  // P(t_{n-k}) already saturated
            for (size_t q = 0; q < acc.size(); ++q) acc[q] += pg.fk_det()[q] * fp[tail][q];
            scale += totals[tail];
        }
        res.times.push_back(nstep * trace.dt);
        raw.push_back(crop_real(ifft2(acc, m), pg.n(), pg.gs().pitch, Unit::Kelvin));
        rnd_scale[nstep - 1] = scale;
    }

    double peak = 0.0;
    for (int j = 0; j < steps; ++j) {
        if (use_rand) raw[j] += rnd * rnd_scale[j];
        peak = std::max(peak, raw[j].max());
    }
    for (FieldMap& f : raw) clamp_negatives(f, peak, 0.02, res);
    res.rise = std::move(raw);
    res.timing.solve_ms = ms_since(t0);
    return res;
}

ErrorReport error_metrics(const FieldMap& calc, const FieldMap& ref) {
    if (!calc.same_shape(ref))
        throw ConfigError("solver", "error_metrics: map shapes differ");
    ErrorReport r;
    double sum = 0.0;
    for (size_t k = 0; k < calc.size(); ++k) {
        double e = std::abs(calc.values()[k] - ref.values()[k]);
        sum += e;
        r.max_err = std::max(r.max_err, e);
    }
    r.mae = sum / static_cast<double>(calc.size());
    double ref_max = ref.max();
    r.pct_of_max_rise = ref_max > 0.0 ? 100.0 * r.mae / ref_max : 0.0;
    r.max_pct_of_max_rise = ref_max > 0.0 ? 100.0 * r.max_err / ref_max : 0.0;
    auto [ci, cj] = calc.argmax();
    auto [ri, rj] = ref.argmax();
    r.hotspot_hit = std::max(std::abs(ci - ri), std::abs(cj - rj)) <= 1;
    return r;
}

ErrorReport error_metrics(const ThermalResult& calc, const ThermalResult& ref) {
    if (calc.rise.size() != ref.rise.size())
        throw ConfigError("solver", "error_metrics: result lengths differ");
    ErrorReport r;
    double sum = 0.0;
    size_t cnt = 0;
    double ref_max = 0.0;
    for (size_t f = 0; f < calc.rise.size(); ++f) {
        const FieldMap& a = calc.rise[f];
        const FieldMap& b = ref.rise[f];
        if (!a.same_shape(b))
            throw ConfigError("solver", "error_metrics: map shapes differ");
        for (size_t k = 0; k < a.size(); ++k) {
            double e = std::abs(a.values()[k] - b.values()[k]);
            sum += e;
            r.max_err = std::max(r.max_err, e);
        }
        cnt += a.size();
        ref_max = std::max(ref_max, b.max());
    }
    r.mae = sum / static_cast<double>(cnt);
    r.pct_of_max_rise = ref_max > 0.0 ? 100.0 * r.mae / ref_max : 0.0;
    r.max_pct_of_max_rise = ref_max > 0.0 ? 100.0 * r.max_err / ref_max : 0.0;
    auto [ci, cj] = calc.rise.back().argmax();
    auto [ri, rj] = ref.rise.back().argmax();
    r.hotspot_hit = std::max(std::abs(ci - ri), std::abs(cj - rj)) <= 1;
    return r;
}

MonteCarloSummary monte_carlo(const GreensSet& gs, const VariationParams& var,
                              const FieldMap& nominal_leak, const FieldMap& p_dyn,
                              const std::vector<uint64_t>& seeds, int jobs) {
    if (seeds.empty()) throw ConfigError("solver", "monte_carlo: empty seed list");
    PreparedGreens pg(gs);
    check_power(p_dyn, pg, "monte_carlo");
    if (nominal_leak.n() != gs.n)
        throw ConfigError("solver", "monte_carlo: leakage map shape mismatch");

    MonteCarloSummary summary;
    summary.runs.resize(seeds.size());
    jobs = std::max(1, jobs);
    const std::vector<cplx> fdet_spec =
        deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, gs.alpha, gs.beta, gs.mu);

    auto run_one = [&](size_t idx) {
        MonteCarloRun& rec = summary.runs[idx];
        rec.seed = seeds[idx];
        auto t0 = clock_type::now();
        try {
            VariationParams v = var;
            v.seed = seeds[idx];
            LeakageBaseline leak = make_leakage_baseline(nominal_leak, v);
            FieldMap f_rand = random_greens(fdet_spec, gs.f_sp0, gs.phi, gs.g_sp0,
                                            leak.p_var, gs.alpha, gs.beta, gs.mu);
            FieldMap applied = p_dyn + leak.p_leak0;
            FieldMap t_map = pg.convolve_det(applied);
            t_map += hadamard(f_rand, leak.p_var) * (applied.sum() * gs.rand_scale);
            for (double& x : t_map.values()) x = std::max(x, 0.0);
            rec.max_rise = t_map.max();
            rec.mean_rise = t_map.mean();
        } catch (const Error& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        rec.runtime_ms = ms_since(t0);
    };

    if (jobs == 1) {
        for (size_t i = 0; i < seeds.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> maxima;
    for (const MonteCarloRun& r : summary.runs)
        if (!r.failed) maxima.push_back(r.max_rise);
    if (!maxima.empty()) {
        double mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / maxima.size();
        double var_acc = 0.0;
        for (double v : maxima) var_acc += (v - mean) * (v - mean);
        summary.mean_max = mean;
        summary.std_max = maxima.size() > 1 ? std::sqrt(var_acc / (maxima.size() - 1)) : 0.0;
        std::sort(maxima.begin(), maxima.end());
        auto pick = [&](double q) {
            double pos = q * (maxima.size() - 1);
            size_t lo = static_cast<size_t>(pos);
            size_t hi = std::min(lo + 1, maxima.size() - 1);
            double w = pos - lo;
            return maxima[lo] * (1.0 - w) + maxima[hi] * w;
        };
        summary.percentiles_max = {pick(0.05), pick(0.50), pick(0.95)};
    }
    return summary;
}

void write_monte_carlo_csv(const MonteCarloSummary& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("solver", "cannot open '" + path + "' for writing");
    os << "seed,max_rise,mean_rise,runtime_ms\n";
    os.precision(17);
    for (const MonteCarloRun& r : s.runs) {
        if (r.failed)
            os << r.seed << ",error,error," << r.runtime_ms << '\n';
        else
            os << r.seed << ',' << r.max_rise << ',' << r.mean_rise << ',' << r.runtime_ms
               << '\n';
    }
}

} // namespace gtherm
