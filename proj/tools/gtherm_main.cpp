// gtherm: command-line front end over the greentherm C API.
//
// Exit codes: 0 success, 2 bad configuration/input, 3 solver failure
// (non-convergence, runaway, calibration), 4 validation failure. Every
// failure prints one machine-parseable line:
//   error stage=<stage> status=<status> msg="<message>"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "greentherm.h"

namespace {

int fail(gt_status st) {
    std::fprintf(stderr, "error stage=%s status=%s msg=\"%s\"\n", gt_last_error_stage(),
                 gt_status_name(st), gt_last_error());
    return static_cast<int>(st);
}

#define CHECK(expr)                                     \
    do {                                                \
        gt_status st_ = (expr);                         \
        if (st_ != GT_OK) return fail(st_);             \
    } while (0)

struct FieldGuard {
    gt_field* f = nullptr;
    ~FieldGuard() { gt_field_free(f); }
};
struct GreensGuard {
    gt_greens* g = nullptr;
    ~GreensGuard() { gt_greens_free(g); }
};
struct ResultGuard {
    gt_result* r = nullptr;
    ~ResultGuard() { gt_result_free(r); }
};
struct TraceGuard {
    gt_trace* t = nullptr;
    ~TraceGuard() { gt_trace_free(t); }
};

std::vector<unsigned long long> read_seed_file(const std::string& path) {
    std::ifstream is(path);
    std::vector<unsigned long long> seeds;
    unsigned long long s;
    while (is >> s) seeds.push_back(s);
    return seeds;
}

int save_result_maps(gt_result* res, const std::string& out_dir, const std::string& prefix,
                     bool render_last) {
    std::filesystem::create_directories(out_dir);
    int count = gt_result_count(res);
    for (int i = 0; i < count; ++i) {
        FieldGuard f;
        CHECK(gt_result_map(res, i, &f.f));
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04d.map", prefix.c_str(), i);
        CHECK(gt_field_save(f.f, (out_dir + "/" + name).c_str()));
        if (render_last && i == count - 1) {
            std::snprintf(name, sizeof name, "%s_%04d.ppm", prefix.c_str(), i);
            CHECK(gt_field_render(f.f, (out_dir + "/" + name).c_str(), 4));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gtherm: variation-aware chip thermal simulation"};
    app.require_subcommand(1);

    // ---- calibrate ----
    auto* cal_cmd = app.add_subcommand("calibrate", "build a GreensSet from stack + variation");
    std::string cal_stack, cal_var, cal_out, cal_leak;
    double cal_leak_total = 15.0;
    cal_cmd->add_option("--stack", cal_stack, "stack description file");
    cal_cmd->add_option("--variation", cal_var, "variation scenario file");
    cal_cmd->add_option("--leak", cal_leak, "nominal leakage map (default: uniform)");
    cal_cmd->add_option("--leak-total", cal_leak_total, "uniform leakage total (W)");
    cal_cmd->add_option("--out", cal_out, "output GreensSet directory")->required();

    // ---- steady ----
    auto* steady_cmd = app.add_subcommand("steady", "steady-state full-chip solve");
    std::string st_greens, st_power, st_out;
    bool st_norand = false;
    steady_cmd->add_option("--greens", st_greens, "GreensSet directory")->required();
    steady_cmd->add_option("--power", st_power, "dynamic power map")->required();
    steady_cmd->add_option("--out", st_out, "output directory")->required();
    steady_cmd->add_flag("--no-rand", st_norand, "omit the shift-variant component");

    // ---- step ----
    auto* step_cmd = app.add_subcommand("step", "step response of a held power map");
    std::string sp_greens, sp_power, sp_out;
    std::vector<double> sp_times = {0.5e-3, 1e-3, 2e-3, 5e-3};
    bool sp_norand = false;
    step_cmd->add_option("--greens", sp_greens)->required();
    step_cmd->add_option("--power", sp_power)->required();
    step_cmd->add_option("--out", sp_out)->required();
    step_cmd->add_option("--times", sp_times, "elapsed times in seconds")->delimiter(',');
    step_cmd->add_flag("--no-rand", sp_norand);

    // ---- trace ----
    auto* trace_cmd = app.add_subcommand("trace", "time-varying power trace solve");
    std::string tr_greens, tr_dir, tr_out;
    double tr_dt = 0.0;
    int tr_window = 0;
    bool tr_norand = false;
    trace_cmd->add_option("--greens", tr_greens)->required();
    trace_cmd->add_option("--trace", tr_dir, "trace directory (trace.txt + frames)")->required();
    trace_cmd->add_option("--dt", tr_dt, "expected frame interval (checked against trace)");
    trace_cmd->add_option("--window", tr_window, "superposition window (0 = 5 ms worth)");
    trace_cmd->add_option("--out", tr_out)->required();
    trace_cmd->add_flag("--no-rand", tr_norand);

    // ---- oracle ----
    auto* or_cmd = app.add_subcommand("oracle", "finite-difference reference solve");
    std::string or_stack, or_var, or_power, or_leak, or_out;
    bool or_leak_t = false, or_cond_t = false, or_transient = false;
    std::vector<double> or_times = {1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3, 8e-3, 9e-3, 10e-3};
    double or_dt = 1e-4;
    or_cmd->add_option("--stack", or_stack, "stack description file");
    or_cmd->add_option("--variation", or_var, "variation scenario file");
    or_cmd->add_option("--power", or_power, "dynamic power map")->required();
    or_cmd->add_option("--leak", or_leak, "nominal leakage map");
    or_cmd->add_flag("--leak-T", or_leak_t, "temperature-dependent leakage");
    or_cmd->add_flag("--cond-T", or_cond_t, "temperature-dependent conductivity");
    or_cmd->add_flag("--transient", or_transient, "transient solve at --times");
    or_cmd->add_option("--times", or_times)->delimiter(',');
    or_cmd->add_option("--dt", or_dt, "backward-Euler step (s)");
    or_cmd->add_option("--out", or_out)->required();

    // ---- montecarlo ----
    auto* mc_cmd = app.add_subcommand("montecarlo", "variation-seed sweep");
    std::string mc_greens, mc_var, mc_power, mc_seeds, mc_out;
    int mc_runs = 100, mc_jobs = 1;
    double mc_leak_total = 15.0;
    unsigned long long mc_seed_start = 1;
    mc_cmd->add_option("--greens", mc_greens)->required();
    mc_cmd->add_option("--variation", mc_var, "variation scenario file");
    mc_cmd->add_option("--power", mc_power)->required();
    mc_cmd->add_option("--runs", mc_runs, "number of runs");
    mc_cmd->add_option("--seeds", mc_seeds, "seed list file (one integer per run)");
    mc_cmd->add_option("--seed-start", mc_seed_start, "first seed when no file is given");
    mc_cmd->add_option("--leak-total", mc_leak_total);
    mc_cmd->add_option("--jobs", mc_jobs, "worker count");
    mc_cmd->add_option("--out", mc_out)->required();

    // ---- validate ----
    auto* val_cmd = app.add_subcommand("validate", "run a scenario suite against the oracle");
    std::string val_suite, val_out, val_stack;
    bool val_generate = false;
    int val_jobs = 1;
    val_cmd->add_option("--suite", val_suite, "suite directory")->required();
    val_cmd->add_option("--out", val_out, "error-report output directory");
    val_cmd->add_option("--stack", val_stack, "stack for --generate");
    val_cmd->add_flag("--generate", val_generate, "write the built-in suite first");
    val_cmd->add_option("--jobs", val_jobs);

    CLI11_PARSE(app, argc, argv);

    if (cal_cmd->parsed()) {
        GreensGuard g;
        FieldGuard leak;
        if (!cal_leak.empty()) CHECK(gt_field_load(cal_leak.c_str(), &leak.f));
        double offline_ms = 0.0;
        CHECK(gt_calibrate(cal_stack.empty() ? nullptr : cal_stack.c_str(),
                           cal_var.empty() ? nullptr : cal_var.c_str(), leak.f,
                           cal_leak_total, &g.g, &offline_ms));
        CHECK(gt_greens_save(g.g, cal_out.c_str()));
        std::printf("calibrated n=%d alpha=%.6g beta=%.6g mu=%.6g C=%.6g\n",
                    gt_greens_n(g.g), gt_greens_alpha(g.g), gt_greens_beta(g.g),
                    gt_greens_mu(g.g), gt_greens_capacitance(g.g));
        std::printf("timing offline_ms=%.3f online_ms=0.000\n", offline_ms);
        return 0;
    }

    if (steady_cmd->parsed()) {
        GreensGuard g;
        FieldGuard power, out;
        CHECK(gt_greens_load(st_greens.c_str(), &g.g));
        CHECK(gt_field_load(st_power.c_str(), &power.f));
        double online_ms = 0.0;
        CHECK(gt_solve_steady(g.g, power.f, st_norand ? 0 : 1, &out.f, &online_ms));
        std::filesystem::create_directories(st_out);
        CHECK(gt_field_save(out.f, (st_out + "/temperature.map").c_str()));
        CHECK(gt_field_render(out.f, (st_out + "/temperature.ppm").c_str(), 4));
        std::printf("steady max_rise=%.6g K\n", gt_field_max(out.f));
        std::printf("timing offline_ms=0.000 online_ms=%.3f\n", online_ms);
        return 0;
    }

    if (step_cmd->parsed()) {
        GreensGuard g;
        FieldGuard power;
        ResultGuard res;
        CHECK(gt_greens_load(sp_greens.c_str(), &g.g));
        CHECK(gt_field_load(sp_power.c_str(), &power.f));
        double online_ms = 0.0;
        CHECK(gt_solve_step(g.g, power.f, sp_times.data(), static_cast<int>(sp_times.size()),
                            sp_norand ? 0 : 1, &res.r, &online_ms));
        int rc = save_result_maps(res.r, sp_out, "step", true);
        if (rc) return rc;
        std::printf("timing offline_ms=0.000 online_ms=%.3f\n", online_ms);
        return 0;
    }

    if (trace_cmd->parsed()) {
        GreensGuard g;
        TraceGuard tr;
        ResultGuard res;
        CHECK(gt_greens_load(tr_greens.c_str(), &g.g));
        CHECK(gt_trace_load(tr_dir.c_str(), &tr.t));
        if (tr_dt > 0.0) {
            double have = gt_trace_dt(tr.t);
            if (std::abs(have - tr_dt) > 1e-12 * tr_dt) {
                std::fprintf(stderr,
                             "error stage=cli status=config msg=\"--dt %.9g does not match "
                             "trace dt %.9g\"\n",
                             tr_dt, have);
                return 2;
            }
        }
        double online_ms = 0.0;
        CHECK(gt_solve_trace(g.g, tr.t, tr_window, tr_norand ? 0 : 1, &res.r, &online_ms));
        int rc = save_result_maps(res.r, tr_out, "trace", true);
        if (rc) return rc;
        std::printf("timing offline_ms=0.000 online_ms=%.3f\n", online_ms);
        return 0;
    }

    if (or_cmd->parsed()) {
        FieldGuard power, leak;
        CHECK(gt_field_load(or_power.c_str(), &power.f));
        if (!or_leak.empty()) CHECK(gt_field_load(or_leak.c_str(), &leak.f));
        std::filesystem::create_directories(or_out);
        if (or_transient) {
            ResultGuard res;
            CHECK(gt_oracle_transient(or_stack.empty() ? nullptr : or_stack.c_str(),
                                      or_var.empty() ? nullptr : or_var.c_str(), power.f,
                                      leak.f, or_leak_t ? 1 : 0, or_times.data(),
                                      static_cast<int>(or_times.size()), or_dt, &res.r));
            return save_result_maps(res.r, or_out, "oracle", true);
        }
        FieldGuard out;
        int iters = 0;
        CHECK(gt_oracle_steady(or_stack.empty() ? nullptr : or_stack.c_str(),
                               or_var.empty() ? nullptr : or_var.c_str(), power.f, leak.f,
                               or_leak_t ? 1 : 0, or_cond_t ? 1 : 0, &out.f, &iters));
        CHECK(gt_field_save(out.f, (or_out + "/oracle.map").c_str()));
        CHECK(gt_field_render(out.f, (or_out + "/oracle.ppm").c_str(), 4));
        std::printf("oracle max_rise=%.6g K outer_iterations=%d\n", gt_field_max(out.f),
                    iters);
        return 0;
    }

    if (mc_cmd->parsed()) {
        GreensGuard g;
        FieldGuard power;
        CHECK(gt_greens_load(mc_greens.c_str(), &g.g));
        CHECK(gt_field_load(mc_power.c_str(), &power.f));
        std::vector<unsigned long long> seeds;
        if (!mc_seeds.empty()) {
            seeds = read_seed_file(mc_seeds);
            if (seeds.empty()) {
                std::fprintf(stderr,
                             "error stage=cli status=config msg=\"seed file is empty\"\n");
                return 2;
            }
        } else {
            for (int i = 0; i < mc_runs; ++i) seeds.push_back(mc_seed_start + i);
        }
        std::filesystem::create_directories(mc_out);
        double mean_max = 0.0, std_max = 0.0;
        CHECK(gt_monte_carlo(g.g, mc_var.empty() ? nullptr : mc_var.c_str(), nullptr,
                             mc_leak_total, power.f, seeds.data(),
                             static_cast<int>(seeds.size()), mc_jobs,
                             (mc_out + "/runs.csv").c_str(), &mean_max, &std_max));
        std::ofstream sum(mc_out + "/summary.txt");
        sum.precision(12);
        sum << "runs " << seeds.size() << "\nmean_max " << mean_max << "\nstd_max "
            << std_max << '\n';
        std::printf("montecarlo runs=%zu mean_max=%.6g std_max=%.6g\n", seeds.size(),
                    mean_max, std_max);
        return 0;
    }

    if (val_cmd->parsed()) {
        if (val_generate)
            CHECK(gt_write_builtin_suite(val_stack.empty() ? nullptr : val_stack.c_str(),
                                         val_suite.c_str()));
        int n_sc = 0, n_pass = 0;
        gt_status st = gt_validate_suite(val_suite.c_str(),
                                         val_out.empty() ? nullptr : val_out.c_str(),
                                         val_jobs, &n_sc, &n_pass);
        std::printf("validate scenarios=%d passed=%d\n", n_sc, n_pass);
        if (st != GT_OK) return fail(st);
        return 0;
    }

    return 2;
}
