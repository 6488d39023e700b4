#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "field.hpp"
#include "stack.hpp"
#include "variation.hpp"

namespace gtherm {

struct SolveOptions {
    bool temp_dep_conductivity = false;
    double cond_c = 0.0;  // 1/K, linearized kappa(T) slope (required when above is on)
    bool temp_dep_leakage = false;
    std::optional<LeakageBaseline> leakage;  // static injection when temp_dep_leakage is off
    int max_iters = 50;
    double tol = 0.01;        // kelvin, outer fixed-point loop
    double dt = 1e-4;         // seconds, transient stepping
    double linear_tol = 1e-9; // relative residual of the inner solve

    void validate() const;
};

struct SteadyResult {
    FieldMap die_rise;          // kelvin above ambient, die layer
    Eigen::VectorXd full_state; // all layers, rise above ambient
    int outer_iterations = 0;
    double last_delta = 0.0;    // max |dT| change of the final outer iteration
};

// Finite-difference discretization of the layered package: one node per
// layer per lateral cell, 4-neighbor lateral coupling plus vertical
// die/TIM/spreader/sink path. Solves are const; run them concurrently at
// will. The reference role of the paper's modified HotSpot.
class ThermalNetwork {
public:
    ThermalNetwork(const ChipStack& stack, const ConductivityMap& k_die,
                   bool lateral_enabled = true);

    const ChipStack& stack() const { return stack_; }
    int n() const { return stack_.n; }
    int node_count() const { return 3 * stack_.n * stack_.n; }
    int index(int layer, int i, int j) const { return (layer * stack_.n + i) * stack_.n + j; }

    // Conductance matrix for the given die temperature-rise map (empty =
    // ambient). Diagonal carries the sink terms.
    Eigen::SparseMatrix<double> matrix(const FieldMap* die_rise, double cond_c) const;
    const Eigen::VectorXd& capacitances() const { return cap_; }
    double sink_conductance_per_cell() const { return g_sink_cell_; }

    // Heat leaving through the sink for a converged state (energy balance).
    double sink_heat(const Eigen::VectorXd& rise) const;

    SteadyResult steady_solve(const FieldMap& p_dyn, const SolveOptions& opts) const;

    // Backward-Euler stepping. Frames are held for trace_dt each; opts.dt
    // subdivides the frame interval. Returns the die rise at each frame end;
    // final_state (when given) receives the full node state for chaining.
    std::vector<FieldMap> transient_solve(const std::vector<FieldMap>& frames, double trace_dt,
                                          const SolveOptions& opts,
                                          const Eigen::VectorXd* initial_state = nullptr,
                                          Eigen::VectorXd* final_state = nullptr) const;

    // Die rise maps for a held 1 W center source sampled at `times`,
    // temperature-dependent effects off. The baseline Green's measurement.
    std::vector<FieldMap> transient_impulse(const std::vector<double>& times,
                                            double dt) const;

private:
    ChipStack stack_;
    ConductivityMap k_die_;
    bool lateral_enabled_;
    Eigen::VectorXd cap_;
    double g_sink_cell_ = 0.0;

    Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& a,
                                 const Eigen::VectorXd& b, const Eigen::VectorXd* guess,
                                 double tol) const;
    Eigen::VectorXd power_vector(const FieldMap& p_die) const;
    FieldMap die_map(const Eigen::VectorXd& state) const;
};

// Steady 1 W center-source response with temperature effects off (f_sp0
// samples, K/W); mode "transient" is covered by transient_impulse above.
FieldMap impulse_response(const ChipStack& stack, const ConductivityMap& k_die);

} // namespace gtherm
