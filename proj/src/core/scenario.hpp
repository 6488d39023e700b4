#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdm.hpp"
#include "greens.hpp"
#include "solver.hpp"
#include "stack.hpp"
#include "variation.hpp"

namespace gtherm {

// One run description: stack + variation + power input + mode. Loaded from a
// key-value scenario file; CLI overrides take precedence over file values,
// file values over built-in defaults.
struct Scenario {
    std::string name = "scenario";
    ChipStack stack;
    VariationParams var;
    FieldMap p_dyn;
    std::optional<PowerTrace> trace;
    FieldMap nominal_leak;
    std::string mode = "steady";  // steady | step | trace | montecarlo
    std::vector<double> step_times = {0.5e-3, 1e-3, 2e-3, 5e-3};
    int window = 0;  // 0 = ceil(5 ms / dt)
    int runs = 100;
    std::vector<uint64_t> seeds;
    std::string out_dir;
};

// `overrides` are "key=value" strings referencing scenario-file keys only.
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

// Uniform leakage map with the given total (the default nominal baseline).
FieldMap uniform_leak(int n, double pitch, double total_watts);

// The five steady test scenarios: floorplan, stress, variance, uniform,
// checkerboard. Grid size and leakage total come from the stack defaults.
std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name, const ChipStack& stack);
// Writes scenario + referenced input files under dir/<name>/.
void write_scenario_files(const Scenario& sc, const std::string& dir);

// --- oracle-vs-Green's comparisons ------------------------------------------

// Total steady rise above ambient from the oracle with both temperature
// effects on (the reference role).
FieldMap oracle_total_steady(const Calibration& cal, const FieldMap& p_dyn);

// Total steady rise from the Green's composition: f_det convolved with the
// combined dynamic + leakage map plus the shift-variant term.
ThermalResult greens_total_steady(const PreparedGreens& pg, const Calibration& cal,
                                  const FieldMap& p_dyn, bool with_rand = true);

struct ScenarioComparison {
    std::string name;
    ErrorReport full;      // Green's full composition vs oracle
    ErrorReport no_rand;   // f_rand omitted (--no-rand ablation)
    double max_rise = 0.0; // oracle reference max rise
    double oracle_ms = 0.0;
    double greens_online_ms = 0.0;
};

ScenarioComparison compare_scenario_steady(const Scenario& sc, const Calibration& cal);

// Table-6-style ablation ladder on one scenario; returns the MAE (kelvin) of
// each model tier against the all-effects oracle:
//   0 baseline response, mean leakage only
//   1 + leakage variability (actual varied map as input power)
//   2 + temperature-dependent leakage (modified response, alpha = 0)
//   3 + temperature-dependent conductivity (full model)
struct AblationResult {
    std::vector<std::string> labels;
    std::vector<double> mae;
    std::vector<double> pct;  // 100 * mae / max oracle rise
};

AblationResult ablation_ladder(const Calibration& cal, const FieldMap& p_dyn,
                               const FieldMap& oracle_ref);

// Full-suite validation: every scenario file in `suite_dir` is compared
// against the oracle at the acceptance thresholds. Returns per-scenario
// comparisons; `all_pass` captures the exit gate.
struct SuiteResult {
    std::vector<ScenarioComparison> scenarios;
    bool all_pass = false;
    double mae_pct_limit = 2.5;
    double max_pct_limit = 4.0;
};

SuiteResult validate_suite(const std::string& suite_dir, const std::string& out_dir,
                           int jobs = 1);

void write_error_report(const ErrorReport& r, const std::string& path);

} // namespace gtherm
