#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

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

const std::vector<std::string> kScenarioKeys = {
    "name", "stack", "variation", "power",      "trace", "leak", "leak_total",
    "mode", "times", "window",    "runs",       "seeds", "seed_start", "out",
};

std::string resolve(const std::string& base_dir, const std::string& p) {
    fs::path q(p);
    if (q.is_absolute()) return p;
    return (fs::path(base_dir) / q).string();
}

struct Block {
    double r0, r1, c0, c1, density;
};

FieldMap block_power(int n, double pitch, const std::vector<Block>& blocks,
                     double background, double total) {
    FieldMap p(n, pitch, Unit::Watts, background);
    for (const Block& b : blocks) {
        int i0 = static_cast<int>(b.r0 * n), i1 = static_cast<int>(b.r1 * n);
        int j0 = static_cast<int>(b.c0 * n), j1 = static_cast<int>(b.c1 * n);
        for (int i = i0; i < i1; ++i)
            for (int j = j0; j < j1; ++j)
                p(i, j) = std::max(p(i, j), b.density);
    }
    double s = p.sum();
    double scale = total / s;
    for (double& v : p.values()) v *= scale;
    return p;
}

} // namespace

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    KvFile kv = KvFile::parse_file(path);
    for (const std::string& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("scenario", "override '" + ov + "' is not key=value");
        kv.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    kv.check_known(kScenarioKeys);
    const std::string base = fs::path(path).parent_path().string();

    Scenario sc;
    sc.name = kv.get_string("name", fs::path(path).parent_path().filename().string());
    sc.stack = kv.has("stack") ? load_stack(resolve(base, kv.get_string("stack"))) : ChipStack{};
    sc.var = kv.has("variation") ? load_variation(resolve(base, kv.get_string("variation")))
                                 : VariationParams{};
    sc.mode = kv.get_string("mode", "steady");
    if (sc.mode != "steady" && sc.mode != "step" && sc.mode != "trace" &&
        sc.mode != "montecarlo")
        throw ConfigError("scenario", "unknown mode '" + sc.mode + "'");

    if (kv.has("power")) {
        sc.p_dyn = load_field(resolve(base, kv.get_string("power")));
        if (sc.p_dyn.n() != sc.stack.n)
            throw ConfigError("scenario", "power map grid does not match the stack");
    } else if (sc.mode != "trace") {
        sc.p_dyn = FieldMap(sc.stack.n, sc.stack.pitch(), Unit::Watts);
    }
    if (kv.has("trace")) sc.trace = load_trace(resolve(base, kv.get_string("trace")));
    if (sc.mode == "trace" && !sc.trace)
        throw ConfigError("scenario", "mode trace requires a trace directory");

    if (kv.has("leak")) {
        sc.nominal_leak = load_field(resolve(base, kv.get_string("leak")));
        if (sc.nominal_leak.n() != sc.stack.n)
            throw ConfigError("scenario", "leakage map grid does not match the stack");
    } else {
        sc.nominal_leak =
            uniform_leak(sc.stack.n, sc.stack.pitch(), kv.get_double("leak_total", 15.0));
    }

    if (kv.has("times")) sc.step_times = kv.get_double_list("times");
    sc.window = static_cast<int>(kv.get_int("window", 0));
    sc.runs = static_cast<int>(kv.get_int("runs", 100));
    if (sc.runs < 1) throw ConfigError("scenario", "runs must be >= 1");
    if (kv.has("seeds")) {
        std::ifstream is(resolve(base, kv.get_string("seeds")));
        if (!is) throw ConfigError("scenario", "cannot open seed list");
        unsigned long long s;
        while (is >> s) sc.seeds.push_back(s);
        if (sc.seeds.empty()) throw ConfigError("scenario", "seed list is empty");
    } else {
        uint64_t start = static_cast<uint64_t>(kv.get_int("seed_start", 1));
        for (int i = 0; i < sc.runs; ++i) sc.seeds.push_back(start + i);
    }
    sc.out_dir = kv.get_string("out", "");
    return sc;
}

FieldMap uniform_leak(int n, double pitch, double total_watts) {
    return FieldMap(n, pitch, Unit::Watts, total_watts / (static_cast<double>(n) * n));
}

std::vector<std::string> builtin_scenario_names() {
    return {"floorplan", "stress", "variance", "uniform", "checkerboard"};
}

Scenario builtin_scenario(const std::string& name, const ChipStack& stack) {
    Scenario sc;
    sc.name = name;
    sc.stack = stack;
    sc.var.seed = 12345;
    const int n = stack.n;
    const double pitch = stack.pitch();
    sc.nominal_leak = uniform_leak(n, pitch, 15.0);

    if (name == "floorplan" || name == "variance") {
        // Two near-tied cores with dense pin cells (so each candidate
        // hotspot has a definite location), a mid block and a cache strip.
        std::vector<Block> blocks = {
            {0.18, 0.46, 0.16, 0.48, 6.0},
            {0.18, 0.46, 0.52, 0.84, 5.6},
            {0.54, 0.70, 0.26, 0.74, 2.2},
            {0.74, 0.84, 0.16, 0.84, 1.0},
            {0.28, 0.34, 0.28, 0.34, 9.0},   // pin inside core A
            {0.28, 0.34, 0.66, 0.72, 8.7},   // pin inside core B
        };
        sc.p_dyn = block_power(n, pitch, blocks, 0.2, 48.9);
        if (name == "variance") {
            sc.var.sigma_sys *= 2.0;
            sc.var.sigma_rand *= 2.0;
            sc.var.seed = 20710;
        }
    } else if (name == "stress") {
        std::vector<Block> blocks;
        for (double ci : {0.25, 0.72})
            for (double cj : {0.25, 0.72})
                blocks.push_back({ci, ci + 0.047, cj, cj + 0.047, 1.0});
        blocks.push_back({0.48, 0.53, 0.48, 0.53, 1.06});
        sc.p_dyn = block_power(n, pitch, blocks, 0.0, 8.0);
    } else if (name == "uniform") {
        sc.p_dyn = FieldMap(n, pitch, Unit::Watts, 204.8 / (static_cast<double>(n) * n));
    } else if (name == "checkerboard") {
        sc.p_dyn = FieldMap(n, pitch, Unit::Watts);
        int live = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((i + j) % 2 == 0) ++live;
        double per = 51.2 / live;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((i + j) % 2 == 0) sc.p_dyn(i, j) = per;
    } else {
        throw ConfigError("scenario", "unknown builtin scenario '" + name + "'");
    }
    return sc;
}

void write_scenario_files(const Scenario& sc, const std::string& dir) {
    fs::create_directories(dir);
    save_stack(sc.stack, dir + "/stack.txt");
    save_variation(sc.var, dir + "/variation.txt");
    save_field(sc.p_dyn, dir + "/power.map");
    save_field(sc.nominal_leak, dir + "/leak.map");
    KvFile kv;
    kv.set("name", sc.name);
    kv.set("stack", "stack.txt");
    kv.set("variation", "variation.txt");
    kv.set("power", "power.map");
    kv.set("leak", "leak.map");
    kv.set("mode", sc.mode);
    if (sc.trace) save_trace(*sc.trace, dir + "/trace");
    if (sc.trace) kv.set("trace", "trace");
    kv.save(dir + "/scenario.txt");
}

FieldMap oracle_total_steady(const Calibration& cal, const FieldMap& p_dyn) {
    SolveOptions opts;
    opts.temp_dep_leakage = true;
    opts.temp_dep_conductivity = true;
    opts.cond_c = cal.cond_c;
    opts.leakage = cal.leak;
    ThermalNetwork net(cal.stack, cal.k_die);
    return net.steady_solve(p_dyn, opts).die_rise;
}

ThermalResult greens_total_steady(const PreparedGreens& pg, const Calibration& cal,
                                  const FieldMap& p_dyn, bool with_rand) {
    ProfileOptions opts;
    opts.with_rand = with_rand;
    if (with_rand)
        return steady_profile(pg, p_dyn + cal.leak.p_leak0, cal.gs.p_var, opts);
    // Omitting the random component drops every use of the variation map:
    // the deterministic branch sees the mean leakage only.
    FieldMap mean_leak(cal.gs.n, cal.gs.pitch, Unit::Watts, cal.gs.mu);
    return steady_profile(pg, p_dyn + mean_leak, cal.gs.p_var, opts);
}

ScenarioComparison compare_scenario_steady(const Scenario& sc, const Calibration& cal) {
    ScenarioComparison out;
    out.name = sc.name;

    SolveOptions opts;
    opts.temp_dep_leakage = true;
    opts.temp_dep_conductivity = true;
    opts.cond_c = cal.cond_c;
    opts.leakage = cal.leak;
    ThermalNetwork net(sc.stack, cal.k_die);
    auto t0 = clock_type::now();
    FieldMap oracle = net.steady_solve(sc.p_dyn, opts).die_rise;
    out.oracle_ms = ms_since(t0);
    out.max_rise = oracle.max();

    PreparedGreens pg(cal.gs);
    t0 = clock_type::now();
    ThermalResult full = greens_total_steady(pg, cal, sc.p_dyn, true);
    out.greens_online_ms = ms_since(t0);
    ThermalResult norand = greens_total_steady(pg, cal, sc.p_dyn, false);

    out.full = error_metrics(full.map(), oracle);
    out.no_rand = error_metrics(norand.map(), oracle);
    return out;
}

namespace {

FieldMap convolve_spectrum(const std::vector<cplx>& fk, const FieldMap& power) {
    FieldMap padded = mirror_pad(power);
    std::vector<cplx> fp(padded.values().begin(), padded.values().end());
    fp = fft2(fp, padded.n());
    for (size_t k = 0; k < fp.size(); ++k) fp[k] *= fk[k];
    std::vector<cplx> spatial = ifft2(fp, padded.n());
    const int n = power.n();
    FieldMap out(n, power.pitch(), Unit::Kelvin);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = spatial[static_cast<size_t>(i) * 2 * n + j].real();
    return out;
}

} // namespace

AblationResult ablation_ladder(const Calibration& cal, const FieldMap& p_dyn,
                               const FieldMap& oracle_ref) {
    const GreensSet& gs = cal.gs;
    const FieldMap& p_leak0 = cal.leak.p_leak0;
    FieldMap mean_leak(gs.n, gs.pitch, Unit::Watts, gs.mu);

    AblationResult res;
    auto push = [&](const std::string& label, const FieldMap& t_map) {
        ErrorReport r = error_metrics(t_map, oracle_ref);
        res.labels.push_back(label);
        res.mae.push_back(r.mae);
        res.pct.push_back(r.pct_of_max_rise);
    };

    std::vector<cplx> fk_sp0 = baseline_kernel_spectrum(gs.f_sp0, gs.phi);
    (void)mean_leak;

    // Tier 0: baseline response to the dynamic power alone.
    push("none", convolve_spectrum(fk_sp0, p_dyn));

    // Tier 1: + the variability-affected leakage map as static input power.
    push("leak-var", convolve_spectrum(fk_sp0, p_dyn + p_leak0));

    // Tier 2: + temperature-dependent leakage (alpha = 0 closed form).
    FieldMap applied = p_dyn + p_leak0;
    std::vector<cplx> fdet0 =
        deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, 0.0, gs.beta, gs.mu);
    FieldMap f_rand0 =
        random_greens(fdet0, gs.f_sp0, gs.phi, gs.g_sp0, gs.p_var, 0.0, gs.beta, gs.mu);
    FieldMap t2 = convolve_spectrum(fdet0, applied);
    t2 += hadamard(f_rand0, gs.p_var) * (applied.sum() * gs.rand_scale);
    push("leak-var+leak(T)", t2);

    // Tier 3: full model (adds temperature-dependent conductivity).
    std::vector<cplx> fdet =
        deterministic_spectrum(gs.f_sp0, gs.phi, gs.g_sp0, gs.alpha, gs.beta, gs.mu);
    FieldMap t3 = convolve_spectrum(fdet, applied);
    t3 += hadamard(gs.f_rand, gs.p_var) * (applied.sum() * gs.rand_scale);
    push("full", t3);
    return res;
}

SuiteResult validate_suite(const std::string& suite_dir, const std::string& out_dir,
                           int /*jobs*/) {
    SuiteResult suite;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(suite_dir))
        if (entry.is_regular_file() && entry.path().filename() == "scenario.txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ConfigError("scenario", "no scenario.txt files under '" + suite_dir + "'");

    if (!out_dir.empty()) fs::create_directories(out_dir);

    // Calibrations are reusable across scenarios with identical stack +
    // variation inputs; key on the serialized parameter values.
    std::vector<std::pair<std::string, std::shared_ptr<Calibration>>> cache;
    auto calibration_for = [&](const Scenario& sc) {
        std::string key;
        {
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%llu|%.17g|%.17g|%.17g|%.17g",
                          sc.stack.n, sc.stack.die_edge, sc.stack.sink_resistance,
                          sc.stack.die().conductivity, sc.var.sigma_sys, sc.var.sigma_rand,
                          sc.var.corr_range, sc.var.dopant_spread,
                          static_cast<unsigned long long>(sc.var.seed), sc.var.beta,
                          sc.var.beta_l, sc.var.beta_tox, sc.nominal_leak.sum());
            key = buf;
        }
        for (auto& [k, c] : cache)
            if (k == key) return c;
        auto cal = std::make_shared<Calibration>(
            calibrate(sc.stack, sc.var, sc.nominal_leak));
        cache.emplace_back(key, cal);
        return cal;
    };

    suite.all_pass = true;
    for (const fs::path& f : files) {
        Scenario sc = load_scenario(f.string());
        auto cal = calibration_for(sc);
        ScenarioComparison cmp = compare_scenario_steady(sc, *cal);
        bool pass = cmp.full.pct_of_max_rise <= suite.mae_pct_limit &&
                    cmp.full.max_pct_of_max_rise <= suite.max_pct_limit;
        suite.all_pass = suite.all_pass && pass;
        if (!out_dir.empty())
            write_error_report(cmp.full, out_dir + "/" + cmp.name + ".err");
        suite.scenarios.push_back(std::move(cmp));
    }
    return suite;
}

void write_error_report(const ErrorReport& r, const std::string& path) {
    KvFile kv;
    kv.set_double("mae", r.mae);
    kv.set_double("max_err", r.max_err);
    kv.set_double("pct_of_max_rise", r.pct_of_max_rise);
    kv.set_double("max_pct_of_max_rise", r.max_pct_of_max_rise);
    kv.set("hotspot_hit", r.hotspot_hit ? "true" : "false");
    kv.save(path);
}

} // namespace gtherm
