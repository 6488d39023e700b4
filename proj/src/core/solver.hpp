#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "field.hpp"
#include "greens.hpp"
#include "variation.hpp"

namespace gtherm {

struct PowerTrace {
    double dt = 0.0;               // seconds between samples
    std::vector<FieldMap> frames;  // watts/cell

    void validate() const;
};

PowerTrace load_trace(const std::string& dir);
void save_trace(const PowerTrace& trace, const std::string& dir);

struct SolveTiming {
    double prep_ms = 0.0;   // GreensSet spectra preparation (offline)
    double solve_ms = 0.0;  // online composition
};

struct ThermalResult {
    std::vector<FieldMap> rise;  // kelvin above the leakage-converged ambient state
    std::vector<double> times;   // empty for a steady result
    std::string scenario;
    uint64_t seed = 0;
    SolveTiming timing;
    int clamped_cells = 0;   // negatives clamped to zero (spectral ringing)
    double min_raw = 0.0;    // most negative raw value before clamping

    const FieldMap& map() const { return rise.front(); }
};

struct ErrorReport {
    double mae = 0.0;              // kelvin
    double max_err = 0.0;          // kelvin
    double pct_of_max_rise = 0.0;  // 100 * mae / max reference rise
    double max_pct_of_max_rise = 0.0;
    bool hotspot_hit = false;      // argmax cells coincide within a 1-cell radius
};

// Cached spectra of an immutable GreensSet; build once, then the online
// steady path is a pad + two FFT passes. Thread-safe to share (const).
class PreparedGreens {
public:
    explicit PreparedGreens(const GreensSet& gs);

    const GreensSet& gs() const { return *gs_; }
    int n() const { return gs_->n; }
    double det_center() const { return det_center_; }

    // Deterministic convolution part only (kernel = f_det).
    FieldMap convolve_det(const FieldMap& p_dyn) const;
    // Saturation fraction of the deterministic center cell at elapsed t.
    double saturation(double t) const;
    // Transient spectra at elapsed t (kernel layout).
    std::vector<cplx> transient_spectrum(double t) const;

    const std::vector<cplx>& fk_det() const { return fk_det_; }
    const std::vector<cplx>& fk_sp0() const { return fk_sp0_; }
    const std::vector<double>& g_mult() const { return g_mult_; }

private:
    const GreensSet* gs_;
    int m_;
    std::vector<cplx> fk_det_;
    std::vector<cplx> fk_sp0_;
    std::vector<double> g_mult_;
    double det_center_ = 0.0;
};

struct ProfileOptions {
    bool with_rand = true;  // false reproduces the f_rand-omission ablation
};

// Steady composition: crop(ifft(F(f_det) . F(mirror_pad(p_dyn)))) plus the
// shift-variant term f_rand o p_var scaled by the total applied power.
ThermalResult steady_profile(const PreparedGreens& pg, const FieldMap& p_dyn,
                             const FieldMap& p_var, const ProfileOptions& opts = {});

// Step response of a held power map at the given elapsed times.
ThermalResult step_response(const PreparedGreens& pg, const FieldMap& p_dyn,
                            const FieldMap& p_var, const std::vector<double>& times,
                            const ProfileOptions& opts = {});

// Windowed superposition over a time-varying trace (k most recent steps plus
// the saturated tail). k_window <= 0 selects ceil(5 ms / dt).
ThermalResult time_varying_profile(const PreparedGreens& pg, const PowerTrace& trace,
                                   int k_window, const FieldMap& p_var,
                                   const ProfileOptions& opts = {});

ErrorReport error_metrics(const ThermalResult& calc, const ThermalResult& ref);
ErrorReport error_metrics(const FieldMap& calc, const FieldMap& ref);

struct MonteCarloRun {
    uint64_t seed = 0;
    double max_rise = 0.0;
    double mean_rise = 0.0;
    double runtime_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct MonteCarloSummary {
    std::vector<MonteCarloRun> runs;
    double mean_max = 0.0;
    double std_max = 0.0;
    std::array<double, 3> percentiles_max{};  // p5, p50, p95
};

// Per-seed leakage realizations against a fixed calibration: f_sp0 and
// f_det are reused, f_rand is rebuilt, and the steady composition runs on
// the combined dynamic + leakage map (total rise above ambient).
MonteCarloSummary monte_carlo(const GreensSet& gs, const VariationParams& var,
                              const FieldMap& nominal_leak, const FieldMap& p_dyn,
                              const std::vector<uint64_t>& seeds, int jobs = 1);

void write_monte_carlo_csv(const MonteCarloSummary& s, const std::string& path);

} // namespace gtherm
