#include "fdm.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>

#include "errors.hpp"

namespace gtherm {

void SolveOptions::validate() const {
    if (!(tol > 0.0)) throw ConfigError("oracle", "outer tolerance must be positive");
    if (max_iters < 1) throw ConfigError("oracle", "max_iters must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("oracle", "dt must be positive");
    if (temp_dep_conductivity && !(cond_c > 0.0))
        throw ConfigError("oracle", "temp-dependent conductivity needs cond_c > 0");
    if (temp_dep_leakage && !leakage)
        throw ConfigError("oracle", "temp-dependent leakage needs a leakage baseline");
}

ThermalNetwork::ThermalNetwork(const ChipStack& stack, const ConductivityMap& k_die,
                               bool lateral_enabled)
    : stack_(stack), k_die_(k_die), lateral_enabled_(lateral_enabled) {
    stack_.validate();
    if (k_die_.k_map.n() != stack_.n)
        throw ConfigError("oracle", "conductivity map does not match the stack grid");
    if (k_die_.k_map.min() <= 0.0)
        throw ConfigError("oracle", "non-positive die conductivity");
    const int n = stack_.n;
    const double area = stack_.pitch() * stack_.pitch();
    cap_.resize(node_count());
    for (int l = 0; l < 3; ++l) {
        double c_node = stack_.layers[l].heat_capacity * area * stack_.layers[l].thickness;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                cap_[index(l, i, j)] = c_node;
    }
    // Spreader half-thickness plus the cell's share of the lumped sink.
    const double r_spread_half = stack_.spreader().thickness / (2.0 * stack_.spreader().conductivity * area);
    g_sink_cell_ = 1.0 / (r_spread_half + static_cast<double>(n) * n * stack_.sink_resistance);
}

Eigen::SparseMatrix<double> ThermalNetwork::matrix(const FieldMap* die_rise,
                                                   double cond_c) const {
    const int n = stack_.n;
    const double pitch = stack_.pitch();
    const double area = pitch * pitch;
    const Layer& die = stack_.die();
    const Layer& tim = stack_.tim();
    const Layer& spr = stack_.spreader();

    // Effective per-cell die conductivity at the current temperature.
    auto k_cell = [&](int i, int j) {
        double k0 = k_die_.k_map(i, j);
        if (!die_rise) return k0;
        double k = k0 * (1.0 - cond_c * (*die_rise)(i, j));
        if (!(k > 0.0))
            throw ValidationError("oracle", "die conductivity went non-positive at (" +
                                                std::to_string(i) + "," + std::to_string(j) +
                                                "); outside linearization validity");
        return k;
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(node_count()) * 7);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(node_count());

    auto add_edge = [&](int a, int b, double g) {
        trip.emplace_back(a, b, -g);
        trip.emplace_back(b, a, -g);
        diag[a] += g;
        diag[b] += g;
    };

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int nd = index(0, i, j);
            const int nt = index(1, i, j);
            const int ns = index(2, i, j);
            if (lateral_enabled_) {
                if (j + 1 < n) {
                    double kd0 = k_cell(i, j), kd1 = k_cell(i, j + 1);
                    add_edge(nd, index(0, i, j + 1),
                             2.0 * die.thickness * kd0 * kd1 / (kd0 + kd1));
                    add_edge(nt, index(1, i, j + 1), tim.thickness * tim.conductivity);
                    add_edge(ns, index(2, i, j + 1), spr.thickness * spr.conductivity);
                }
                if (i + 1 < n) {
                    double kd0 = k_cell(i, j), kd1 = k_cell(i + 1, j);
                    add_edge(nd, index(0, i + 1, j),
                             2.0 * die.thickness * kd0 * kd1 / (kd0 + kd1));
                    add_edge(nt, index(1, i + 1, j), tim.thickness * tim.conductivity);
                    add_edge(ns, index(2, i + 1, j), spr.thickness * spr.conductivity);
                }
            }
            add_edge(nd, nt, area / (die.thickness / (2.0 * k_cell(i, j)) +
                                     tim.thickness / (2.0 * tim.conductivity)));
            add_edge(nt, ns, area / (tim.thickness / (2.0 * tim.conductivity) +
                                     spr.thickness / (2.0 * spr.conductivity)));
            diag[ns] += g_sink_cell_;  // ambient is the ground node
        }
    }
    for (int k = 0; k < node_count(); ++k) trip.emplace_back(k, k, diag[k]);

    Eigen::SparseMatrix<double> a(node_count(), node_count());
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

double ThermalNetwork::sink_heat(const Eigen::VectorXd& rise) const {
    const int n = stack_.n;
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q += rise[index(2, i, j)] * g_sink_cell_;
    return q;
}

Eigen::VectorXd ThermalNetwork::solve_linear(const Eigen::SparseMatrix<double>& a,
                                             const Eigen::VectorXd& b,
                                             const Eigen::VectorXd* guess,
                                             double tol) const {
    if (stack_.n <= 16) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> direct(a);
        if (direct.info() != Eigen::Success)
            throw ConvergenceError("oracle", "direct factorization failed");
        return direct.solve(b);
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(40000);
    cg.compute(a);
    Eigen::VectorXd x;
    if (guess)
        x = cg.solveWithGuess(b, *guess);
    else
        x = cg.solve(b);
    if (cg.info() != Eigen::Success)
        throw ConvergenceError("oracle", "conjugate gradient stalled, residual " +
                                             std::to_string(cg.error()));
    return x;
}

Eigen::VectorXd ThermalNetwork::power_vector(const FieldMap& p_die) const {
    const int n = stack_.n;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(node_count());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p[index(0, i, j)] = p_die(i, j);
    return p;
}

FieldMap ThermalNetwork::die_map(const Eigen::VectorXd& state) const {
    const int n = stack_.n;
    FieldMap out(n, stack_.pitch(), Unit::Kelvin);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = state[index(0, i, j)];
    out.validate("oracle die map");
    return out;
}

SteadyResult ThermalNetwork::steady_solve(const FieldMap& p_dyn,
                                          const SolveOptions& opts) const {
    opts.validate();
    if (p_dyn.n() != stack_.n)
        throw ConfigError("oracle", "power map does not match the stack grid");
    if (p_dyn.min() < 0.0) throw ConfigError("oracle", "dynamic power must be >= 0");
    if (opts.leakage && opts.leakage->p_leak0.n() != stack_.n)
        throw ConfigError("oracle", "leakage map does not match the stack grid");

    const bool iterate = opts.temp_dep_conductivity || opts.temp_dep_leakage;
    SteadyResult res;
    FieldMap die_rise(stack_.n, stack_.pitch(), Unit::Kelvin);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(node_count());

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        FieldMap p = p_dyn;
        if (opts.leakage)
            p += opts.temp_dep_leakage ? leakage_at_temperature(*opts.leakage, die_rise)
                                       : opts.leakage->p_leak0;
        Eigen::SparseMatrix<double> a =
            matrix(opts.temp_dep_conductivity && iter > 1 ? &die_rise : nullptr, opts.cond_c);
        Eigen::VectorXd xn = solve_linear(a, power_vector(p), iter > 1 ? &x : nullptr,
                                          opts.linear_tol);
        double delta = (xn - x).cwiseAbs().maxCoeff();
        x = xn;
        die_rise = die_map(x);
        res.outer_iterations = iter;
        res.last_delta = delta;
        if (!iterate || (iter > 1 && delta < opts.tol)) break;
        if (iter == opts.max_iters)
            throw ConvergenceError("oracle",
                                   "fixed-point loop hit max_iters with |dT| change " +
                                       std::to_string(delta) +
                                       " K (thermal runaway or tolerance too tight)");
    }
    res.die_rise = die_rise;
    res.full_state = x;
    return res;
}

std::vector<FieldMap> ThermalNetwork::transient_solve(const std::vector<FieldMap>& frames,
                                                      double trace_dt,
                                                      const SolveOptions& opts,
                                                      const Eigen::VectorXd* initial,
                                                      Eigen::VectorXd* final_state) const {
    opts.validate();
    if (frames.empty()) throw ConfigError("oracle", "transient trace is empty");
    if (!(trace_dt > 0.0)) throw ConfigError("oracle", "trace dt must be positive");
    int sub = std::max(1, static_cast<int>(std::round(trace_dt / opts.dt)));
    if (std::abs(sub * opts.dt - trace_dt) > 1e-9 * trace_dt)
        throw ConfigError("oracle", "opts.dt must subdivide the trace interval evenly");
    const double dt = trace_dt / sub;

    Eigen::VectorXd x =
        initial ? *initial : Eigen::VectorXd::Zero(node_count());
    Eigen::VectorXd cap_dt = cap_ / dt;
    std::vector<FieldMap> out;
    out.reserve(frames.size());

    Eigen::SparseMatrix<double> a_static;
    if (!opts.temp_dep_conductivity) {
        a_static = matrix(nullptr, 0.0);
        for (int k = 0; k < node_count(); ++k) a_static.coeffRef(k, k) += cap_dt[k];
    }

    for (const FieldMap& frame : frames) {
        if (frame.n() != stack_.n)
            throw ConfigError("oracle", "trace frame does not match the stack grid");
        if (frame.min() < 0.0) throw ConfigError("oracle", "trace powers must be >= 0");
        for (int s = 0; s < sub; ++s) {
            FieldMap die_rise = die_map(x);
            FieldMap p = frame;
            if (opts.leakage)
                p += opts.temp_dep_leakage ? leakage_at_temperature(*opts.leakage, die_rise)
                                           : opts.leakage->p_leak0;
            Eigen::VectorXd rhs = power_vector(p) + cap_dt.asDiagonal() * x;
            if (opts.temp_dep_conductivity) {
                Eigen::SparseMatrix<double> a = matrix(&die_rise, opts.cond_c);
                for (int k = 0; k < node_count(); ++k) a.coeffRef(k, k) += cap_dt[k];
                x = solve_linear(a, rhs, &x, opts.linear_tol);
            } else {
                x = solve_linear(a_static, rhs, &x, opts.linear_tol);
            }
        }
        out.push_back(die_map(x));
    }
    if (final_state) *final_state = x;
    return out;
}

std::vector<FieldMap> ThermalNetwork::transient_impulse(const std::vector<double>& times,
                                                        double dt) const {
    FieldMap p(stack_.n, stack_.pitch(), Unit::Watts);
    p(stack_.n / 2, stack_.n / 2) = 1.0;
    SolveOptions opts;
    opts.dt = dt;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(node_count());
    Eigen::VectorXd cap_dt = cap_ / dt;
    Eigen::SparseMatrix<double> a = matrix(nullptr, 0.0);
    for (int k = 0; k < node_count(); ++k) a.coeffRef(k, k) += cap_dt[k];
    Eigen::VectorXd pvec = power_vector(p);

    std::vector<FieldMap> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        if (target < t - 1e-12)
            throw ConfigError("oracle", "impulse sample times must be non-decreasing");
        while (t + 0.5 * dt < target) {
            Eigen::VectorXd rhs = pvec + cap_dt.asDiagonal() * x;
            x = solve_linear(a, rhs, &x, opts.linear_tol);
            t += dt;
        }
        FieldMap m = die_map(x);
        m.set_unit(Unit::KelvinPerWatt);
        out.push_back(m);
    }
    return out;
}

FieldMap impulse_response(const ChipStack& stack, const ConductivityMap& k_die) {
    ThermalNetwork net(stack, k_die);
    FieldMap p(stack.n, stack.pitch(), Unit::Watts);
    p(stack.n / 2, stack.n / 2) = 1.0;
    SolveOptions opts;  // temperature-dependent effects off
    FieldMap rise = net.steady_solve(p, opts).die_rise;
    rise.set_unit(Unit::KelvinPerWatt);
    return rise;
}

} // namespace gtherm
