#pragma once

#include <string>
#include <vector>

#include "fdm.hpp"
#include "field.hpp"
#include "spectral.hpp"
#include "stack.hpp"
#include "variation.hpp"

namespace gtherm {

// Calibrated Green's function family for one chip: the measured baseline
// response, the shift construction, the closed-form deterministic and random
// modified responses, and the transient saturation parameters. Immutable
// once calibrated; share freely across solver invocations.
struct GreensSet {
    int n = 0;
    double pitch = 0.0;
    FieldMap f_sp0;          // baseline impulse response (K/W), center source
    double phi = 0.0;        // spreader constant: outer-ring mean of f_sp0
    double kappa_inf = 0.0;  // far-field stand-in: f_sp0 at the farthest corner
    FieldMap g_sp0;          // f_sp0 - kappa_inf + f_sp0(center)
    double alpha = 0.0;      // response sensitivity to conductivity heating (1/K)
    double beta = 0.0;       // leakage-temperature coefficient (1/K)
    double mu = 0.0;         // mean leakage per cell (W)
    FieldMap f_det;          // deterministic modified response (K/W)
    FieldMap f_rand;         // shift-variant correction map
    FieldMap p_var;          // zero-mean leakage variation f_rand was built for
    double capacitance = 0.0;  // fitted thermal capacitance (J/K)
    double rand_scale = 1.0;   // calibrated gain of the shift-variant term
    std::vector<double> t_samples;  // seconds
    std::vector<FieldMap> tran;     // step-response tensor at t_samples

    int center() const { return n / 2; }
    double det_center() const { return f_det(center(), center()); }
    void validate() const;
};

struct CalibrationReport {
    double c_prime = 0.0;   // response-vs-conductivity slope (per W/(m K))
    double fit_r2 = 0.0;
    std::vector<std::pair<double, double>> sweep;  // (conductivity, peak response)
    double c = 0.0;         // linearized kappa(T) slope used (1/K)
    double alpha = 0.0;     // composed c' * c * k0'
    double cap_residual = 0.0;  // rms transient fit error / steady center
};

// --- calibration primitives -------------------------------------------------

struct BaselineExtract {
    FieldMap f_sp0;
    double phi = 0.0;
    double kappa_inf = 0.0;
};

// Oracle 1 W center-source run with temperature effects off.
BaselineExtract extract_baseline(const ChipStack& stack, const ConductivityMap& k_die);

struct AlphaFit {
    double alpha = 0.0;
    CalibrationReport report;
};

// Sweeps uniform die conductivities through the oracle, fits the peak
// response line f(kappa) = f0 * (1 - c'(kappa - k0_prime)), and composes
// alpha = c' * c * k0_prime. Throws CalibrationError when r^2 < 0.95 or the
// sweep is degenerate.
AlphaFit fit_alpha(const ChipStack& stack, const std::vector<double>& sweep, double c,
                   double k0_prime);

// Elementwise f_sp0 - kappa_inf + center_value (the shift construction that
// turns products with the response map into spectral multipliers).
FieldMap make_g_shift(const FieldMap& f_sp0, double kappa_inf, double center_value);

// Same shift applied to the leakage variation: p_var - far_corner + center.
FieldMap q_rand(const FieldMap& p_var);

// Closed-form deterministic modified response:
//   F(f_det) = F(f_sp0) / (1 - alpha g (1 + F(mu)) - mu beta F(f_sp0)).
// All spectra in the center-origin kernel layout on the 2n grid; throws
// RunawayError when any denominator magnitude drops below 1e-6.
FieldMap deterministic_greens(const FieldMap& f_sp0, double phi, const FieldMap& g_sp0,
                              double alpha, double beta, double mu);

// Full 2n x 2n deterministic spectrum F(f_det). The composition convolves
// with this directly: re-transforming the cropped die map would discard the
// feedback tail that spreads past the die window (a measured ~5% global
// undershoot on spread workloads).
std::vector<cplx> deterministic_spectrum(const FieldMap& f_sp0, double phi,
                                         const FieldMap& g_sp0, double alpha, double beta,
                                         double mu);

// Discrete stand-in for the Lemma-I multiplier in the alpha terms:
// g(center) - g(radial arrangement), which vanishes at zero frequency. The
// raw radial arrangement over-amplifies the zero-frequency mode by the
// factor the lemma itself loses there.
std::vector<double> alpha_multiplier(const FieldMap& g_sp0);

// Spectrum of the baseline response as a convolution kernel, split into the
// rapidly decaying part and the spreader constant: F(mask(f_sp0 - phi)) with
// the constant handled exactly at zero frequency (phi/4 per padded cell, so
// each die source counts once across its four mirror images). Masking the
// raw response instead would zero the true far field that every source
// contributes through the spreader and sink.
std::vector<cplx> baseline_kernel_spectrum(const FieldMap& f_sp0, double phi);

// Closed-form shift-variant correction:
//   F(f_rand) = F(f_det) (beta F(f_sp0) Q + alpha F(p_var) g) /
//               (1 - alpha (1 + F(mu) + F(p_var)) g - mu beta F(f_sp0)
//                  - beta F(f_sp0) Q).
// f_det_spec is the full deterministic spectrum (deterministic_spectrum).
FieldMap random_greens(const std::vector<cplx>& f_det_spec, const FieldMap& f_sp0,
                       double phi, const FieldMap& g_sp0, const FieldMap& p_var,
                       double alpha, double beta, double mu);

// Transient response at elapsed time t for a held source:
//   F(T) = F(T_ss) (1 - exp(-t / (C F(f_sp0) + alpha C g F(T_ss)))).
// `steady` is the deterministic steady response (the non-split choice).
FieldMap transient_greens(const FieldMap& steady, const FieldMap& f_sp0, double phi,
                          const FieldMap& g_sp0, double alpha, double capacitance, double t);

struct CapacitanceFit {
    double capacitance = 0.0;
    double residual = 0.0;  // rms error / steady center value
};

// Least-squares C against the oracle center-cell step response using the
// alpha = 0 reduction (per-mode exponentials with time constants C F(f_sp0)).
CapacitanceFit fit_capacitance(const ChipStack& stack, const ConductivityMap& k_die,
                               const FieldMap& f_sp0, double phi,
                               const std::vector<double>& sample_times = {},
                               double oracle_dt = 2e-5);

// --- orchestration ------------------------------------------------------------

struct CalibrateOptions {
    std::vector<double> conductivity_sweep;  // empty = k0' * {0.75 .. 1.05}
    int tran_samples = 100;
    double tran_horizon = 0.010;  // seconds
    bool fit_transient = true;
    bool fit_rand_scale = true;
    double rand_probe_watts = 100.0;  // uniform probe power for the scale fit
};

struct Calibration {
    GreensSet gs;
    CalibrationReport report;
    ChipStack stack;
    ConductivityMap k_die;
    LeakageBaseline leak;
    double cond_c = 0.0;  // linearized kappa(T) slope shared with the oracle
};

Calibration calibrate(const ChipStack& stack, const VariationParams& var,
                      const FieldMap& nominal_leak, const CalibrateOptions& opts = {});

// Rebuild f_rand (and stored p_var) for a new leakage variation realization,
// reusing the calibrated f_sp0 / f_det. Deterministic part is untouched.
void refresh_random(GreensSet& gs, const FieldMap& p_var);

// GreensSet directory layout: manifest.txt plus one FieldMap text file per
// stored map (f_sp0, g_sp0, f_det, f_rand, p_var, tran_###).
void save_greens(const GreensSet& gs, const CalibrationReport& report, const std::string& dir);
GreensSet load_greens(const std::string& dir);
CalibrationReport load_calibration_report(const std::string& dir);

} // namespace gtherm
