#ifndef MAGSTRICT_DIAGNOSTICS_HPP
#define MAGSTRICT_DIAGNOSTICS_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "magstrict/fem.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/sparse.hpp"
#include "magstrict/tangent_integrator.hpp"

namespace magstrict {

/// One line of the time-series output. Schema (exact CSV header):
/// t,E_exchange,W1inf,E_elastic,m1_L2,m3_L2,mod_dev,tangency_res,iters_llg,iters_mom
struct DiagnosticsRow {
    double t = 0.0;
    double exchange_energy = 0.0;   // E(m,t) = 1/2 |grad m|^2
    double w1inf = 0.0;             // max_K |grad m|_F
    double elastic_energy = 0.0;    // rho |d_t u|^2 + (lambda^e eps(u), eps(u))
    double m1_l2 = 0.0;             // (1/|Omega|) (int m_1^2)^(1/2)
    double m3_l2 = 0.0;
    double mod_dev = 0.0;           // max_z ||m(z)| - 1|
    double tangency_res = 0.0;      // tangent scheme: max_z |m.v|; midpoint: modulus drift
    int iters_llg = 0;              // Krylov iterations (tangent) or fixed-point sweeps (midpoint)
    int iters_mom = 0;
};

inline const char* diagnostics_csv_header() {
    return "t,E_exchange,W1inf,E_elastic,m1_L2,m3_L2,mod_dev,tangency_res,iters_llg,iters_mom";
}

/// Matrices used by the observables; assembled once per mesh.
struct DiagnosticsContext {
    CsrMatrix k_scalar;       // P1 stiffness, one component
    CsrMatrix mass_scalar;    // consistent P1 mass, one component
    double domain_area = 0.0;

    explicit DiagnosticsContext(const Mesh& mesh)
        : k_scalar(assemble_stiffness(mesh, 1)), mass_scalar(assemble_mass(mesh, 1, false)) {
        for (int e = 0; e < mesh.n_elems(); ++e) domain_area += element_volume(mesh, e);
    }
};

namespace detail {

inline double scalar_quadratic_form(const CsrMatrix& a, const NodalVectorField& f, int comp) {
    double acc = 0.0;
    for (int i = 0; i < a.n_rows; ++i) {
        double row = 0.0;
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            row += a.values[s] * f(a.col_indices[s], comp);
        acc += row * f(i, comp);
    }
    return acc;
}

} // namespace detail

/// Exchange energy E(m) = 1/2 |grad m|^2 via the assembled stiffness form.
inline double compute_energy(const DiagnosticsContext& ctx, const NodalVectorField& m) {
    double acc = 0.0;
    for (int c = 0; c < m.n_comp; ++c) acc += detail::scalar_quadratic_form(ctx.k_scalar, m, c);
    return 0.5 * acc;
}

inline double compute_energy(const Mesh& mesh, const NodalVectorField& m) {
    return compute_energy(DiagnosticsContext(mesh), m);
}

/// W^{1,inf} seminorm: max over elements of the Frobenius norm of the
/// piecewise-constant gradient of m.
inline double compute_w1inf(const Mesh& mesh, const NodalVectorField& m) {
    double worst = 0.0;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const TriangleGeometry g = triangle_geometry(mesh, e);
        double frob_sq = 0.0;
        for (int c = 0; c < m.n_comp; ++c) {
            Vec2 grad{0.0, 0.0};
            for (int a = 0; a < 3; ++a) {
                const double v = m(mesh.elem_node(e, a), c);
                grad[0] += v * g.grad[a][0];
                grad[1] += v * g.grad[a][1];
            }
            frob_sq += grad[0] * grad[0] + grad[1] * grad[1];
        }
        worst = std::max(worst, std::sqrt(frob_sq));
    }
    return worst;
}

/// Component average (1/|Omega|) (int m_j^2)^(1/2) via the consistent mass
/// form; j is 1-based to match the usual m_1, m_3 notation.
inline double compute_component_average(const DiagnosticsContext& ctx, const NodalVectorField& m,
                                        int j) {
    if (j < 1 || j > m.n_comp) throw ConfigError("component index out of range");
    const double q = detail::scalar_quadratic_form(ctx.mass_scalar, m, j - 1);
    return std::sqrt(std::max(q, 0.0)) / ctx.domain_area;
}

inline double compute_component_average(const Mesh& mesh, const NodalVectorField& m, int j) {
    return compute_component_average(DiagnosticsContext(mesh), m, j);
}

/// Discrete elastic energy rho |d_t u|^2 + (lambda^e eps(u), eps(u)); the
/// quantity the momentum step keeps nonincreasing when the magnetic forcing
/// is off.
inline double elastic_energy(const SimulationState& st, const Workspace& ws,
                             const CsrMatrix& mass_scalar) {
    double kinetic = 0.0;
    for (int c = 0; c < st.dtu.n_comp; ++c)
        kinetic += detail::scalar_quadratic_form(mass_scalar, st.dtu, c);
    double strain = 0.0;
    {
        std::vector<double> ku(st.u.values.size());
        spmv(ws.elasticity_full, st.u.values, ku);
        for (std::size_t i = 0; i < ku.size(); ++i) strain += ku[i] * st.u.values[i];
    }
    return st.params.rho * kinetic + strain;
}

inline void write_csv(const std::vector<DiagnosticsRow>& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << diagnostics_csv_header() << '\n';
    for (const auto& row : series) {
        out << detail::format_g17(row.t) << ',' << detail::format_g17(row.exchange_energy) << ','
            << detail::format_g17(row.w1inf) << ',' << detail::format_g17(row.elastic_energy) << ','
            << detail::format_g17(row.m1_l2) << ',' << detail::format_g17(row.m3_l2) << ','
            << detail::format_g17(row.mod_dev) << ',' << detail::format_g17(row.tangency_res) << ','
            << row.iters_llg << ',' << row.iters_mom << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

inline std::vector<DiagnosticsRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != diagnostics_csv_header())
        throw ConfigError("unexpected CSV header in " + path);
    std::vector<DiagnosticsRow> series;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10) throw ConfigError("malformed CSV row in " + path);
        DiagnosticsRow row;
        row.t = std::stod(cells[0]);
        row.exchange_energy = std::stod(cells[1]);
        row.w1inf = std::stod(cells[2]);
        row.elastic_energy = std::stod(cells[3]);
        row.m1_l2 = std::stod(cells[4]);
        row.m3_l2 = std::stod(cells[5]);
        row.mod_dev = std::stod(cells[6]);
        row.tangency_res = std::stod(cells[7]);
        row.iters_llg = std::stoi(cells[8]);
        row.iters_mom = std::stoi(cells[9]);
        series.push_back(row);
    }
    return series;
}

/// Companion matplotlib script rendering the energy, W1inf and component
/// average curves of an emitted CSV.
inline void write_plot_script(const std::string& csv_path, const std::string& script_path) {
    std::ofstream out(script_path);
    if (!out) throw ConfigError("cannot open output file: " + script_path);
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Render the time series of a simulation CSV (energy, W1inf, component averages).\"\"\"\n"
           "import sys\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n"
           "import csv\n\n"
           "path = sys.argv[1] if len(sys.argv) > 1 else \""
        << csv_path
        << "\"\n"
           "cols = {}\n"
           "with open(path) as f:\n"
           "    reader = csv.DictReader(f)\n"
           "    for row in reader:\n"
           "        for key, value in row.items():\n"
           "            cols.setdefault(key, []).append(float(value))\n\n"
           "for keys, ylabel, name in [ ([\"E_exchange\", \"E_elastic\"], \"energy\", \"energy\"),\n"
           "                            ([\"W1inf\"], \"$|m|_{1,\\\\infty}$\", \"w1inf\"),\n"
           "                            ([\"m1_L2\", \"m3_L2\"], \"$\\\\|m_j\\\\|_{L^2}$\", \"components\") ]:\n"
           "    plt.figure()\n"
           "    for key in keys:\n"
           "        plt.plot(cols[\"t\"], cols[key], label=key)\n"
           "    plt.xlabel(\"t\")\n"
           "    plt.ylabel(ylabel)\n"
           "    plt.legend()\n"
           "    plt.tight_layout()\n"
           "    plt.savefig(path.rsplit(\".\", 1)[0] + \"_\" + name + \".png\", dpi=150)\n"
           "    plt.close()\n"
           "print(\"wrote plots next to\", path)\n";
    if (!out) throw ConfigError("write failed: " + script_path);
}

} // namespace magstrict

#endif
