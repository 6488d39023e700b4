#include "greentherm.h"

#include <chrono>
#include <cstring>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/fdm.hpp"
#include "core/field.hpp"
#include "core/greens.hpp"
#include "core/heatmap.hpp"
#include "core/scenario.hpp"
#include "core/solver.hpp"
#include "core/stack.hpp"
#include "core/variation.hpp"

using namespace gtherm;

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_stage;

gt_status status_of(const Error& e) {
    g_last_error = e.what();
    g_last_stage = e.stage();
    if (dynamic_cast<const ConfigError*>(&e)) return GT_ERR_CONFIG;
    if (dynamic_cast<const ValidationError*>(&e)) return GT_ERR_VALIDATION;
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const RunawayError*>(&e) ||
        dynamic_cast<const CalibrationError*>(&e))
        return GT_ERR_SOLVER;
    return GT_ERR_INTERNAL;
}

template <typename Fn>
gt_status guarded(Fn&& fn) {
    try {
        fn();
        return GT_OK;
    } catch (const Error& e) {
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        g_last_stage = "internal";
        return GT_ERR_INTERNAL;
    }
}

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

} // namespace

struct gt_field {
    FieldMap f;
};
struct gt_greens {
    GreensSet gs;
    CalibrationReport report;
};
struct gt_result {
    ThermalResult r;
};
struct gt_trace {
    PowerTrace t;
};

extern "C" {

const char* gt_status_name(gt_status s) {
    switch (s) {
        case GT_OK: return "ok";
        case GT_ERR_CONFIG: return "config";
        case GT_ERR_SOLVER: return "solver";
        case GT_ERR_VALIDATION: return "validation";
        case GT_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* gt_last_error(void) { return g_last_error.c_str(); }
const char* gt_last_error_stage(void) { return g_last_stage.c_str(); }

gt_status gt_field_create(int n, double pitch, const char* unit, gt_field** out) {
    return guarded([&] {
        *out = new gt_field{FieldMap(n, pitch, unit_from_name(unit ? unit : "watts"))};
    });
}

gt_status gt_field_load(const char* path, gt_field** out) {
    return guarded([&] { *out = new gt_field{load_field(path)}; });
}

gt_status gt_field_save(const gt_field* f, const char* path) {
    return guarded([&] { save_field(f->f, path); });
}

void gt_field_free(gt_field* f) { delete f; }

int gt_field_n(const gt_field* f) { return f->f.n(); }
double gt_field_pitch(const gt_field* f) { return f->f.pitch(); }
const char* gt_field_unit(const gt_field* f) { return unit_name(f->f.unit()); }
double gt_field_get(const gt_field* f, int i, int j) { return f->f(i, j); }
void gt_field_set(gt_field* f, int i, int j, double value) { f->f(i, j) = value; }
const double* gt_field_data(const gt_field* f) { return f->f.values().data(); }
double gt_field_max(const gt_field* f) { return f->f.max(); }
double gt_field_sum(const gt_field* f) { return f->f.sum(); }

gt_status gt_field_render(const gt_field* f, const char* path, int cell_px) {
    return guarded([&] { render_heatmap(f->f, path, cell_px < 1 ? 4 : cell_px); });
}

gt_status gt_write_default_stack(const char* path) {
    return guarded([&] { save_stack(ChipStack{}, path); });
}

gt_status gt_write_default_variation(const char* path) {
    return guarded([&] { save_variation(VariationParams{}, path); });
}

gt_status gt_calibrate(const char* stack_path, const char* variation_path,
                       const gt_field* nominal_leak, double leak_total, gt_greens** out,
                       double* offline_ms) {
    return guarded([&] {
        auto t0 = clock_type::now();
        ChipStack stack = stack_path ? load_stack(stack_path) : ChipStack{};
        VariationParams var =
            variation_path ? load_variation(variation_path) : VariationParams{};
        FieldMap leak = nominal_leak
                            ? nominal_leak->f
                            : uniform_leak(stack.n, stack.pitch(),
                                           leak_total > 0.0 ? leak_total : 15.0);
        Calibration cal = calibrate(stack, var, leak);
        if (offline_ms) *offline_ms = ms_since(t0);
        *out = new gt_greens{std::move(cal.gs), std::move(cal.report)};
    });
}

gt_status gt_greens_save(const gt_greens* g, const char* dir) {
    return guarded([&] { save_greens(g->gs, g->report, dir); });
}

gt_status gt_greens_load(const char* dir, gt_greens** out) {
    return guarded([&] {
        *out = new gt_greens{load_greens(dir), load_calibration_report(dir)};
    });
}

void gt_greens_free(gt_greens* g) { delete g; }

int gt_greens_n(const gt_greens* g) { return g->gs.n; }
double gt_greens_alpha(const gt_greens* g) { return g->gs.alpha; }
double gt_greens_beta(const gt_greens* g) { return g->gs.beta; }
double gt_greens_mu(const gt_greens* g) { return g->gs.mu; }
double gt_greens_capacitance(const gt_greens* g) { return g->gs.capacitance; }
double gt_greens_kappa_inf(const gt_greens* g) { return g->gs.kappa_inf; }

gt_status gt_greens_field(const gt_greens* g, const char* which, gt_field** out) {
    return guarded([&] {
        std::string w = which ? which : "";
        const FieldMap* f = nullptr;
        if (w == "f_sp0") f = &g->gs.f_sp0;
        else if (w == "g_sp0") f = &g->gs.g_sp0;
        else if (w == "f_det") f = &g->gs.f_det;
        else if (w == "f_rand") f = &g->gs.f_rand;
        else if (w == "p_var") f = &g->gs.p_var;
        else throw ConfigError("capi", "unknown greens field '" + w + "'");
        *out = new gt_field{*f};
    });
}

int gt_result_count(const gt_result* r) { return static_cast<int>(r->r.rise.size()); }

double gt_result_time(const gt_result* r, int idx) {
    if (idx < 0 || static_cast<size_t>(idx) >= r->r.times.size()) return 0.0;
    return r->r.times[idx];
}

gt_status gt_result_map(const gt_result* r, int idx, gt_field** out) {
    return guarded([&] {
        if (idx < 0 || static_cast<size_t>(idx) >= r->r.rise.size())
            throw ConfigError("capi", "result index out of range");
        *out = new gt_field{r->r.rise[idx]};
    });
}

void gt_result_free(gt_result* r) { delete r; }

gt_status gt_solve_steady(const gt_greens* g, const gt_field* p_dyn, int with_rand,
                          gt_field** out, double* online_ms) {
    return guarded([&] {
        PreparedGreens pg(g->gs);
        ProfileOptions opts;
        opts.with_rand = with_rand != 0;
        auto t0 = clock_type::now();
        ThermalResult res = steady_profile(pg, p_dyn->f, g->gs.p_var, opts);
        if (online_ms) *online_ms = ms_since(t0);
        *out = new gt_field{res.rise.front()};
    });
}

gt_status gt_solve_step(const gt_greens* g, const gt_field* p_dyn, const double* times,
                        int n_times, int with_rand, gt_result** out, double* online_ms) {
    return guarded([&] {
        if (!times || n_times < 1) throw ConfigError("capi", "step solve needs times");
        PreparedGreens pg(g->gs);
        ProfileOptions opts;
        opts.with_rand = with_rand != 0;
        std::vector<double> tv(times, times + n_times);
        auto t0 = clock_type::now();
        ThermalResult res = step_response(pg, p_dyn->f, g->gs.p_var, tv, opts);
        if (online_ms) *online_ms = ms_since(t0);
        *out = new gt_result{std::move(res)};
    });
}

gt_status gt_trace_load(const char* dir, gt_trace** out) {
    return guarded([&] { *out = new gt_trace{load_trace(dir)}; });
}

gt_status gt_trace_create(double dt, gt_trace** out) {
    return guarded([&] {
        if (!(dt > 0.0)) throw ConfigError("capi", "trace dt must be positive");
        *out = new gt_trace{PowerTrace{dt, {}}};
    });
}

gt_status gt_trace_push(gt_trace* t, const gt_field* frame) {
    return guarded([&] { t->t.frames.push_back(frame->f); });
}

gt_status gt_trace_save(const gt_trace* t, const char* dir) {
    return guarded([&] { save_trace(t->t, dir); });
}

int gt_trace_frames(const gt_trace* t) { return static_cast<int>(t->t.frames.size()); }
double gt_trace_dt(const gt_trace* t) { return t->t.dt; }
void gt_trace_free(gt_trace* t) { delete t; }

gt_status gt_solve_trace(const gt_greens* g, const gt_trace* trace, int window,
                         int with_rand, gt_result** out, double* online_ms) {
    return guarded([&] {
        PreparedGreens pg(g->gs);
        ProfileOptions opts;
        opts.with_rand = with_rand != 0;
        auto t0 = clock_type::now();
        ThermalResult res = time_varying_profile(pg, trace->t, window, g->gs.p_var, opts);
        if (online_ms) *online_ms = ms_since(t0);
        *out = new gt_result{std::move(res)};
    });
}

namespace {

struct OracleSetup {
    ChipStack stack;
    ConductivityMap k_die;
    SolveOptions opts;
};

OracleSetup oracle_setup(const char* stack_path, const char* variation_path,
                         const gt_field* nominal_leak, int temp_dep_leakage,
                         int temp_dep_conductivity) {
    OracleSetup s;
    s.stack = stack_path ? load_stack(stack_path) : ChipStack{};
    VariationParams var =
        variation_path ? load_variation(variation_path) : VariationParams{};
    if (!variation_path) var.dopant_spread = 0.0;
    s.k_die = conductivity_map(s.stack.die().conductivity, var, s.stack.n, s.stack.pitch());
    if (nominal_leak) {
        s.opts.leakage = make_leakage_baseline(nominal_leak->f, var);
        s.opts.temp_dep_leakage = temp_dep_leakage != 0;
    }
    if (temp_dep_conductivity) {
        s.opts.temp_dep_conductivity = true;
        s.opts.cond_c =
            linearize_conductivity(s.stack.die().conductivity, var.eta, s.stack.ambient).c;
    }
    return s;
}

} // namespace

gt_status gt_oracle_steady(const char* stack_path, const char* variation_path,
                           const gt_field* p_dyn, const gt_field* nominal_leak,
                           int temp_dep_leakage, int temp_dep_conductivity, gt_field** out,
                           int* outer_iterations) {
    return guarded([&] {
        OracleSetup s = oracle_setup(stack_path, variation_path, nominal_leak,
                                     temp_dep_leakage, temp_dep_conductivity);
        ThermalNetwork net(s.stack, s.k_die);
        SteadyResult res = net.steady_solve(p_dyn->f, s.opts);
        if (outer_iterations) *outer_iterations = res.outer_iterations;
        *out = new gt_field{res.die_rise};
    });
}

gt_status gt_oracle_transient(const char* stack_path, const char* variation_path,
                              const gt_field* p_dyn, const gt_field* nominal_leak,
                              int temp_dep_leakage, const double* times, int n_times,
                              double dt, gt_result** out) {
    return guarded([&] {
        if (!times || n_times < 1) throw ConfigError("capi", "transient needs times");
        OracleSetup s = oracle_setup(stack_path, variation_path, nominal_leak,
                                     temp_dep_leakage, 0);
        s.opts.dt = dt > 0.0 ? dt : 1e-4;
        ThermalNetwork net(s.stack, s.k_die);
        ThermalResult res;
        std::vector<double> tv(times, times + n_times);
        double t_prev = 0.0;
        Eigen::VectorXd state = Eigen::VectorXd::Zero(net.node_count());
        for (double target : tv) {
            if (target <= t_prev)
                throw ConfigError("capi", "sample times must be increasing");
            double span = target - t_prev;
            int steps = std::max(1, static_cast<int>(std::round(span / s.opts.dt)));
            std::vector<FieldMap> frames(static_cast<size_t>(steps), p_dyn->f);
            SolveOptions step_opts = s.opts;
            step_opts.dt = span / steps;
            auto maps = net.transient_solve(frames, span / steps, step_opts, &state, &state);
            res.rise.push_back(maps.back());
            res.times.push_back(target);
            t_prev = target;
        }
        *out = new gt_result{std::move(res)};
    });
}

gt_status gt_error_metrics(const gt_field* calc, const gt_field* ref,
                           gt_error_report* out) {
    return guarded([&] {
        ErrorReport r = error_metrics(calc->f, ref->f);
        out->mae = r.mae;
        out->max_err = r.max_err;
        out->pct_of_max_rise = r.pct_of_max_rise;
        out->max_pct_of_max_rise = r.max_pct_of_max_rise;
        out->hotspot_hit = r.hotspot_hit ? 1 : 0;
    });
}

gt_status gt_monte_carlo(const gt_greens* g, const char* variation_path,
                         const gt_field* nominal_leak, double leak_total,
                         const gt_field* p_dyn, const unsigned long long* seeds,
                         int n_seeds, int jobs, const char* csv_path, double* mean_max,
                         double* std_max) {
    return guarded([&] {
        if (!seeds || n_seeds < 1) throw ConfigError("capi", "monte carlo needs seeds");
        VariationParams var =
            variation_path ? load_variation(variation_path) : VariationParams{};
        FieldMap leak = nominal_leak
                            ? nominal_leak->f
                            : uniform_leak(g->gs.n, g->gs.pitch,
                                           leak_total > 0.0 ? leak_total : 15.0);
        std::vector<uint64_t> sv(seeds, seeds + n_seeds);
        MonteCarloSummary sum = monte_carlo(g->gs, var, leak, p_dyn->f, sv, jobs);
        if (csv_path) write_monte_carlo_csv(sum, csv_path);
        if (mean_max) *mean_max = sum.mean_max;
        if (std_max) *std_max = sum.std_max;
        for (const auto& run : sum.runs)
            if (run.failed)
                throw ValidationError("solver", "monte carlo seed " +
                                                    std::to_string(run.seed) +
                                                    " failed: " + run.error);
    });
}

gt_status gt_write_builtin_suite(const char* stack_path, const char* dir) {
    return guarded([&] {
        ChipStack stack = stack_path ? load_stack(stack_path) : ChipStack{};
        for (const std::string& name : builtin_scenario_names())
            write_scenario_files(builtin_scenario(name, stack),
                                 std::string(dir) + "/" + name);
    });
}

gt_status gt_validate_suite(const char* suite_dir, const char* out_dir, int jobs,
                            int* n_scenarios, int* n_passed) {
    return guarded([&] {
        SuiteResult res = validate_suite(suite_dir, out_dir ? out_dir : "", jobs);
        if (n_scenarios) *n_scenarios = static_cast<int>(res.scenarios.size());
        int passed = 0;
        for (const auto& sc : res.scenarios)
            if (sc.full.pct_of_max_rise <= res.mae_pct_limit &&
                sc.full.max_pct_of_max_rise <= res.max_pct_limit)
                ++passed;
        if (n_passed) *n_passed = passed;
        if (!res.all_pass)
            throw ValidationError("validate", "suite thresholds exceeded");
    });
}

} // extern "C"
