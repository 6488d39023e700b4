#pragma once

#include <cstdint>
#include <string>

#include "field.hpp"

namespace gtherm {

// Within-die process variation knobs. Sigmas are fractions of nominal;
// corr_range is the spherical correlogram range as a fraction of the die
// edge. Every generated field is a pure function of (params, n, pitch).
struct VariationParams {
    double sigma_sys = 0.025;
    double sigma_rand = 0.015;
    double corr_range = 0.5;
    uint64_t seed = 1;
    double beta = 0.0275;        // leakage-temperature coefficient (1/K)
    double beta_l = -10.0;       // leakage log-sensitivity to gate-length deviation
    double beta_tox = -5.0;      // leakage log-sensitivity to oxide-thickness deviation
    double dopant_spread = 0.05; // fractional sigma of silicon conductivity
    double eta = 1.3;            // power-law exponent of kappa(T)
    double cond_clamp = 0.3;     // |k/k_nominal - 1| cap
    double exponent_cap = 6.0;   // |beta_l*dL + beta_tox*dTox| guard

    void validate() const;
};

VariationParams load_variation(const std::string& path);
void save_variation(const VariationParams& p, const std::string& path);

// Derived deterministic seeds for the independent fields of one scenario.
enum class FieldPurpose : uint64_t {
    GateLengthSys = 0x11,
    GateLengthRand = 0x12,
    OxideSys = 0x21,
    OxideRand = 0x22,
    Conductivity = 0x31,
};
uint64_t derived_seed(uint64_t base, FieldPurpose purpose, uint64_t run = 0);

// Zero-mean Gaussian random field with spherical correlogram
// rho(d) = 1 - 1.5 (d/phi) + 0.5 (d/phi)^3 for d <= phi (phi = corr_range *
// die edge), synthesized spectrally via circulant embedding on the doubled
// grid. Marginal std-dev = sigma_sys.
FieldMap gen_systematic_map(const VariationParams& p, int n, double pitch,
                            uint64_t seed_override);
FieldMap gen_systematic_map(const VariationParams& p, int n, double pitch);

// i.i.d. zero-mean Gaussian per cell, std-dev sigma_rand.
FieldMap gen_random_map(const VariationParams& p, int n, double pitch,
                        uint64_t seed_override);
FieldMap gen_random_map(const VariationParams& p, int n, double pitch);

// Variation-affected leakage at ambient temperature, split into mean and
// zero-mean parts. p_leak0 = mu + p_var exactly.
struct LeakageBaseline {
    FieldMap p_leak0;  // watts/cell, >= 0
    double mu = 0.0;   // mean of p_leak0
    FieldMap p_var;    // p_leak0 - mu
    double beta = 0.0; // 1/K

    void validate() const;
};

LeakageBaseline leakage_baseline(const FieldMap& nominal_leak, const FieldMap& d_length,
                                 const FieldMap& d_tox, double beta_l, double beta_tox,
                                 double beta, double exponent_cap = 6.0);

// Both variation components folded into the gate-length / oxide fields.
LeakageBaseline make_leakage_baseline(const FieldMap& nominal_leak, const VariationParams& p,
                                      uint64_t run = 0);

// Elementwise (1 + beta * dT) * p_leak0.
FieldMap leakage_at_temperature(const LeakageBaseline& base, const FieldMap& d_t);

struct ConductivityMap {
    FieldMap k_map;          // W/(m K), > 0
    double k_nominal = 0.0;  // W/(m K)
};

// k_nominal * (1 + r), r uncorrelated Gaussian of std-dev dopant_spread
// clamped to +-cond_clamp.
ConductivityMap conductivity_map(double k_nominal, const VariationParams& p, int n,
                                 double pitch);

// Linearization kappa(T) = k0_prime * (1 - c * dT) of the power law
// kappa = k0 * (T/300)^-eta, least-squares fitted over the operating range.
struct ConductivityLinearization {
    double k0_prime = 0.0;  // conductivity at ambient (W/(m K))
    double c = 0.0;         // 1/K
    double max_rel_err = 0.0;  // fit quality over the range
};

ConductivityLinearization linearize_conductivity(double k0_300, double eta, double t_ambient,
                                                 double t_low = 313.15, double t_high = 373.15);

// Scalar linearized conductivity; throws if the result is non-positive.
double conductivity_at_temperature(double k0_prime, double c, double d_t);

} // namespace gtherm
