#ifndef MAGSTRICT_BENCHMARK_HPP
#define MAGSTRICT_BENCHMARK_HPP

#include <cmath>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "magstrict/config.hpp"
#include "magstrict/diagnostics.hpp"
#include "magstrict/midpoint_integrator.hpp"
#include "magstrict/tangent_integrator.hpp"

namespace magstrict {

struct BenchmarkResult {
    std::vector<DiagnosticsRow> series;
    std::optional<double> blow_up_time;  // argmax of W1inf; empty for a flat seminorm
    int steps = 0;
    std::vector<std::string> warnings;
};

namespace detail {

/// Empirical blow-up time: the recorded time at which the W^{1,inf}
/// seminorm attains its maximum (first occurrence); none if the seminorm
/// never rises above zero.
inline std::optional<double> blow_up_time(const std::vector<DiagnosticsRow>& series) {
    double best = 0.0;
    std::optional<double> at;
    for (const auto& row : series) {
        if (row.w1inf > best) {
            best = row.w1inf;
            at = row.t;
        }
    }
    return at;
}

} // namespace detail

inline Params params_from_config(const RunConfig& cfg) {
    Params p;
    p.alpha = cfg.alpha;
    p.theta = cfg.theta;
    p.c_exch = cfg.Cexch;
    p.rho = cfg.rho;
    p.k = cfg.k;
    p.lambda_e = diagonal_tensor(2, cfg.Ce, TensorRole::elastic);
    p.lambda_m = diagonal_tensor(2, cfg.Cm, TensorRole::magnetic);
    p.pi = cfg.contribution(cfg.T, 1.0);
    p.quadrature = cfg.quadrature == "lumped" ? QuadratureMode::lumped : QuadratureMode::consistent;
    p.solver.tol_rel = cfg.tol;
    p.check_invariants = cfg.check_invariants;
    return p;
}

/// Run the 2D benchmark: T_r mesh, the paper's initial magnetization with
/// parameter s, elastic subsystem at rest, ceil(T/k) steps of the selected
/// scheme, diagnostics at the configured cadence.
inline BenchmarkResult run_benchmark(const RunConfig& cfg, std::ostream* log = nullptr) {
    cfg.validate();
    const Mesh mesh = build_structured_mesh(cfg.r);
    const Params params = params_from_config(cfg);
    const double h = 1.0 / (1 << cfg.r);  // grid spacing of T_r

    BenchmarkResult result;
    if (cfg.scheme == "tangent") {
        const Advisory adv = stability_advisory(cfg.theta, h, cfg.k);
        if (!adv.ok) result.warnings.push_back(adv.message);
    } else {
        const Advisory adv = midpoint_coupling_advisory(h, cfg.k);
        if (!adv.ok) result.warnings.push_back(adv.message);
    }
    if (params.pi.kind != PiKind::zero)
        verify_bound(params.pi, cfg.T, 1.0);
    if (log)
        for (const auto& w : result.warnings) *log << "warning: " << w << '\n';

    SimulationState state = init_state(mesh, interpolate_initial_m(mesh, cfg.s),
                                       NodalVectorField(mesh, 2, FieldKind::displacement),
                                       NodalVectorField(mesh, 2, FieldKind::velocity), params);
    const Workspace ws(mesh, params);
    const DiagnosticsContext ctx(mesh);
    const FixedPointConfig fp{cfg.midpoint_eps, cfg.midpoint_max_sweeps, 1.0};

    const int n_steps = static_cast<int>(std::ceil(cfg.T / cfg.k - 1e-12));
    result.series.reserve(static_cast<std::size_t>(n_steps / cfg.cadence) + 2);

    auto record = [&](double tangency, int iters_llg, int iters_mom) {
        DiagnosticsRow row;
        row.t = state.time();
        row.exchange_energy = compute_energy(ctx, state.m);
        row.w1inf = compute_w1inf(mesh, state.m);
        row.elastic_energy = elastic_energy(state, ws, ctx.mass_scalar);
        row.m1_l2 = compute_component_average(ctx, state.m, 1);
        row.m3_l2 = compute_component_average(ctx, state.m, 3);
        row.mod_dev = max_modulus_deviation(state.m);
        row.tangency_res = tangency;
        row.iters_llg = iters_llg;
        row.iters_mom = iters_mom;
        result.series.push_back(row);
    };

    record(0.0, 0, 0);
    try {
        for (int step = 0; step < n_steps; ++step) {
            double tangency = 0.0;
            int iters_llg = 0, iters_mom = 0;
            if (cfg.scheme == "tangent") {
                const StepReport rep = advance(state, ws);
                tangency = rep.tangency_res;
                iters_llg = rep.llg.iterations;
                iters_mom = rep.momentum.iterations;
            } else {
                const MidpointStepReport rep = advance_midpoint(state, ws, fp);
                tangency = rep.mod_drift;
                iters_llg = rep.sweeps;
                iters_mom = rep.momentum.iterations;
            }
            result.steps = step + 1;
            if ((step + 1) % cfg.cadence == 0 || step + 1 == n_steps)
                record(tangency, iters_llg, iters_mom);
        }
    } catch (const SolverError& err) {
        throw SolverError("step " + std::to_string(result.steps) + " (t = " +
                              std::to_string(state.time()) + "): " + err.what(),
                          err.residual, err.iterations);
    } catch (const InvariantError& err) {
        throw InvariantError("step " + std::to_string(result.steps) + " (t = " +
                             std::to_string(state.time()) + "): " + err.what());
    }
    result.blow_up_time = detail::blow_up_time(result.series);
    return result;
}

struct SweepEntry {
    std::string value;
    std::string out_path;
    BenchmarkResult result;
    std::string error;  // empty on success
};

namespace detail {

inline std::string sweep_output_path(const std::string& base, const std::string& key,
                                     const std::string& value) {
    const auto dot = base.rfind('.');
    const std::string stem = (dot == std::string::npos) ? base : base.substr(0, dot);
    const std::string ext = (dot == std::string::npos) ? ".csv" : base.substr(dot);
    return stem + "." + key + "=" + value + ext;
}

} // namespace detail

/// Run one benchmark per value of a single varied key; runs execute in
/// parallel worker threads, each owning its state and output file.
inline std::vector<SweepEntry> run_sweep(const RunConfig& base, const std::string& key,
                                         const std::vector<std::string>& values) {
    std::vector<SweepEntry> entries(values.size());
    std::vector<std::thread> workers;
    const unsigned max_workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t i = 0; i < values.size(); ++i) {
        entries[i].value = values[i];
        entries[i].out_path = detail::sweep_output_path(base.out, key, values[i]);
    }
    std::size_t next = 0;
    std::mutex mu;
    for (unsigned w = 0; w < std::min<std::size_t>(max_workers, values.size()); ++w) {
        workers.emplace_back([&entries, &base, &key, &values, &next, &mu]() {
            while (true) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= values.size()) return;
                    i = next++;
                }
                try {
                    RunConfig cfg = base;
                    apply_config_key(cfg, key, values[i]);
                    cfg.out = entries[i].out_path;
                    entries[i].result = run_benchmark(cfg);
                    write_csv(entries[i].result.series, cfg.out);
                } catch (const std::exception& err) {
                    entries[i].error = err.what();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    return entries;
}

} // namespace magstrict

#endif
