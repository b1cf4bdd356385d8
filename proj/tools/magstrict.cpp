// Command-line driver for the coupled LLG / momentum benchmark runs.
//
// Subcommands:
//   run        execute a benchmark and emit the diagnostics CSV + plot script
//   check-mesh build (or load) a mesh and report the angle-condition check
//   sweep      run a benchmark once per value of a varied config key
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 invariant violation.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magstrict/magstrict.hpp"

namespace {

struct CliOverrides {
    std::vector<std::pair<std::string, std::string>> pairs;
};

void add_run_options(CLI::App* cmd, std::string& config_path, CliOverrides& overrides) {
    cmd->add_option("--config", config_path, "config file (flat key=value lines)");
    // every config key gets a same-named flag; CLI values override the file
    static const char* keys[] = {"r", "scheme", "k", "T", "alpha", "theta", "Cexch", "Ce",
                                 "Cm", "rho", "s", "pi.kind", "pi.f", "pi.axis", "pi.C_ani",
                                 "pi.sign", "out", "cadence", "quadrature", "tol",
                                 "midpoint.eps", "midpoint.max_sweeps", "check_invariants"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [&overrides, key](const std::string& value) { overrides.pairs.emplace_back(key, value); },
            std::string("override config key ") + key);
    }
}

magstrict::RunConfig assemble_config(const std::string& config_path, const CliOverrides& overrides) {
    magstrict::RunConfig cfg;
    if (!config_path.empty()) cfg = magstrict::parse_config_file(config_path);
    for (const auto& [key, value] : overrides.pairs) magstrict::apply_config_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

std::string format_tb(const std::optional<double>& tb) {
    return tb ? magstrict::detail::format_g17(*tb) : std::string("none");
}

int run_command(const std::string& config_path, const CliOverrides& overrides) {
    const magstrict::RunConfig cfg = assemble_config(config_path, overrides);
    const auto start = std::chrono::steady_clock::now();
    const magstrict::BenchmarkResult result = magstrict::run_benchmark(cfg, &std::cerr);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    magstrict::write_csv(result.series, cfg.out);
    const auto dot = cfg.out.rfind('.');
    const std::string script = (dot == std::string::npos ? cfg.out : cfg.out.substr(0, dot)) + "_plot.py";
    magstrict::write_plot_script(cfg.out, script);

    const auto& last = result.series.back();
    std::cout << "scheme: " << cfg.scheme << "  r: " << cfg.r << "  steps: " << result.steps
              << "  wall: " << seconds << " s\n"
              << "T_B: " << format_tb(result.blow_up_time) << '\n'
              << "final E_exchange: " << last.exchange_energy
              << "  final E_elastic: " << last.elastic_energy << '\n'
              << "max mod_dev (final row): " << last.mod_dev << '\n'
              << "wrote " << cfg.out << " and " << script << '\n';
    return 0;
}

int check_mesh_command(int r, const std::string& mesh_path) {
    magstrict::Mesh mesh;
    if (!mesh_path.empty()) {
        mesh = magstrict::load_mesh(mesh_path);
        std::cout << "mesh: " << mesh_path << '\n';
    } else {
        mesh = magstrict::build_structured_mesh(r);
        std::cout << "mesh: T_" << r << '\n';
    }
    double area = 0.0;
    for (int e = 0; e < mesh.n_elems(); ++e) area += magstrict::element_volume(mesh, e);
    std::cout << "nodes: " << mesh.n_nodes() << "  elements: " << mesh.n_elems()
              << "  h_max: " << mesh.h_max << "  area: " << area << '\n';
    const magstrict::AngleReport report = magstrict::check_angle_condition(mesh);
    if (report.pass) {
        std::cout << "angle condition: pass (worst off-diagonal " << report.worst_entry << ")\n";
        return 0;
    }
    std::cout << "angle condition: FAIL (off-diagonal " << report.worst_entry << " between nodes "
              << report.node_i << " and " << report.node_j << ")\n";
    return 4;
}

int sweep_command(const std::string& config_path, const CliOverrides& overrides,
                  const std::string& vary) {
    const auto eq = vary.find('=');
    if (eq == std::string::npos || eq == 0)
        throw magstrict::ConfigError("--vary expects key=v1,v2,...");
    const std::string key = vary.substr(0, eq);
    std::vector<std::string> values;
    std::istringstream in(vary.substr(eq + 1));
    std::string cell;
    while (std::getline(in, cell, ',')) values.push_back(cell);
    if (values.empty()) throw magstrict::ConfigError("--vary needs at least one value");

    const magstrict::RunConfig base = assemble_config(config_path, overrides);
    const auto entries = magstrict::run_sweep(base, key, values);
    int rc = 0;
    for (const auto& entry : entries) {
        if (!entry.error.empty()) {
            std::cout << key << "=" << entry.value << "  ERROR: " << entry.error << '\n';
            rc = 3;
        } else {
            std::cout << key << "=" << entry.value << "  T_B: "
                      << format_tb(entry.result.blow_up_time) << "  -> " << entry.out_path << '\n';
        }
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-element simulation of LLG with magnetostriction"};
    app.require_subcommand(1);

    std::string run_config, sweep_config, vary, mesh_path;
    int check_r = 0;
    CliOverrides run_overrides, sweep_overrides;

    CLI::App* run = app.add_subcommand("run", "execute one benchmark run");
    add_run_options(run, run_config, run_overrides);

    CLI::App* check = app.add_subcommand("check-mesh", "report mesh stats and the angle condition");
    check->add_option("--r", check_r, "structured mesh refinement level");
    check->add_option("--mesh", mesh_path, "load a mesh file instead of building T_r");

    CLI::App* sweep = app.add_subcommand("sweep", "run once per value of a varied key");
    add_run_options(sweep, sweep_config, sweep_overrides);
    sweep->add_option("--vary", vary, "key=v1,v2,... (one key, several values)")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_command(run_config, run_overrides);
        if (check->parsed()) {
            if (mesh_path.empty() && check_r < 1)
                throw magstrict::ConfigError("check-mesh needs --r N or --mesh PATH");
            return check_mesh_command(check_r, mesh_path);
        }
        if (sweep->parsed()) return sweep_command(sweep_config, sweep_overrides, vary);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const magstrict::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const magstrict::MeshIoError& e) {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 2;
    } catch (const magstrict::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const magstrict::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
