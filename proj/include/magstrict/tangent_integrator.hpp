#ifndef MAGSTRICT_TANGENT_INTEGRATOR_HPP
#define MAGSTRICT_TANGENT_INTEGRATOR_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "magstrict/contributions.hpp"
#include "magstrict/fem.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/material.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/solvers.hpp"
#include "magstrict/sparse.hpp"

namespace magstrict {

struct Params {
    double alpha = 1.0;
    double theta = 1.0;
    double c_exch = 1.0;  // exchange constant C_e
    double rho = 1.0;
    double k = 1e-5;  // timestep
    Rank4Tensor lambda_e = diagonal_tensor(2, 0.0, TensorRole::elastic);
    Rank4Tensor lambda_m = diagonal_tensor(2, 0.0, TensorRole::magnetic);
    Contribution pi = Contribution::zero();
    QuadratureMode quadrature = QuadratureMode::lumped;
    SolverConfig solver;
    bool check_invariants = true;

    void validate() const {
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        if (theta < 0.0 || theta > 1.0) throw ConfigError("theta must lie in [0,1]");
        if (!(k > 0.0)) throw ConfigError("timestep k must be positive");
        if (!(rho > 0.0)) throw ConfigError("density rho must be positive");
        if (!(c_exch > 0.0)) throw ConfigError("exchange constant must be positive");
    }
};

/// Full per-timestep state of the coupled system.
struct SimulationState {
    int step = 0;  // time level l; current time is step * params.k
    const Mesh* mesh = nullptr;
    NodalVectorField m;    // magnetization, |m(z)| = 1
    NodalVectorField u;    // displacement, zero on the Dirichlet boundary
    NodalVectorField dtu;  // backward difference quotient d_t u^l (d_t u^0 := udot^0)
    Params params;

    double time() const { return step * params.k; }
};

inline SimulationState init_state(const Mesh& mesh, NodalVectorField m0, NodalVectorField u0,
                                  NodalVectorField dtu0, Params params) {
    params.validate();
    if (mesh.dim != 2) throw ConfigError("integrators support dim=2 meshes only");
    require_kind_invariants(m0, "m0");
    require_kind_invariants(u0, "u0");
    require_kind_invariants(dtu0, "udot0");
    SimulationState st;
    st.mesh = &mesh;
    st.m = std::move(m0);
    st.u = std::move(u0);
    st.dtu = std::move(dtu0);
    st.params = std::move(params);
    return st;
}

/// Matrices that stay fixed over a run (the LLG system matrix itself changes
/// with m and is rebuilt each step).
struct Workspace {
    CsrMatrix k3;             // stiffness, 3 components
    CsrMatrix mass3;          // LLG mass (lumped diagonal or consistent)
    std::vector<double> lumped_w;
    FreeNodeMap free_map;
    CsrMatrix elasticity_free;   // (lambda^e eps, eps) on free DOFs
    CsrMatrix elasticity_full;   // same over all DOFs (diagnostics)
    CsrMatrix mass_free;         // consistent mass on free DOFs, dim components
    CsrMatrix momentum_matrix;   // mass_free + (k^2/rho) * elasticity_free

    Workspace(const Mesh& mesh, const Params& p)
        : k3(assemble_stiffness(mesh, 3)),
          mass3(assemble_mass(mesh, 3, p.quadrature == QuadratureMode::lumped)),
          lumped_w(lumped_mass_weights(mesh)),
          free_map(mesh),
          elasticity_free(assemble_elasticity(mesh, p.lambda_e)),
          elasticity_full(assemble_elasticity_full(mesh, p.lambda_e)),
          mass_free(restrict_to_free(assemble_mass(mesh, mesh.dim, false), mesh, free_map, mesh.dim)) {
        CsrBuilder builder(mass_free.n_rows, mass_free.n_cols);
        const double scale = p.k * p.k / p.rho;
        for (int i = 0; i < mass_free.n_rows; ++i) {
            for (std::int64_t s = mass_free.row_offsets[i]; s < mass_free.row_offsets[i + 1]; ++s)
                builder.add(i, mass_free.col_indices[s], mass_free.values[s]);
            for (std::int64_t s = elasticity_free.row_offsets[i]; s < elasticity_free.row_offsets[i + 1]; ++s)
                builder.add(i, elasticity_free.col_indices[s], scale * elasticity_free.values[s]);
        }
        momentum_matrix = builder.compress();
    }
};

inline Workspace make_workspace(const Mesh& mesh, const Params& p) { return Workspace(mesh, p); }

struct LlgSystem {
    CsrMatrix a;                    // alpha M + S(m) + theta k C_e K
    std::vector<double> rhs;        // -C_e K m + h-load - pi-load
    std::vector<Vec3> constraints;  // nodal m, unit vectors
};

inline LlgSystem build_llg_system(const SimulationState& st, const Workspace& ws) {
    const Mesh& mesh = *st.mesh;
    const Params& p = st.params;
    const int n = mesh.n_nodes() * 3;

    LlgSystem sys;
    sys.constraints.resize(mesh.n_nodes());
    for (int z = 0; z < mesh.n_nodes(); ++z) sys.constraints[z] = st.m.vec3_at(z);

    CsrBuilder builder(n, n);
    const double kfac = p.theta * p.k * p.c_exch;
    for (int i = 0; i < n; ++i)
        for (std::int64_t s = ws.k3.row_offsets[i]; s < ws.k3.row_offsets[i + 1]; ++s)
            builder.add(i, ws.k3.col_indices[s], kfac * ws.k3.values[s]);
    for (int i = 0; i < n; ++i)
        for (std::int64_t s = ws.mass3.row_offsets[i]; s < ws.mass3.row_offsets[i + 1]; ++s)
            builder.add(i, ws.mass3.col_indices[s], p.alpha * ws.mass3.values[s]);
    const CsrMatrix skew = assemble_skew(mesh, st.m, p.quadrature);
    for (int i = 0; i < n; ++i)
        for (std::int64_t s = skew.row_offsets[i]; s < skew.row_offsets[i + 1]; ++s)
            builder.add(i, skew.col_indices[s], skew.values[s]);
    sys.a = builder.compress();

    sys.rhs.assign(n, 0.0);
    spmv_axpby(ws.k3, -p.c_exch, st.m.values, 0.0, sys.rhs);
    if (!p.lambda_m.is_zero()) {
        const auto h = assemble_h_load(mesh, st.u, st.m, p.lambda_e, p.lambda_m, p.quadrature);
        for (int i = 0; i < n; ++i) sys.rhs[i] += h[i];
    }
    if (p.pi.kind != PiKind::zero) {
        const auto pl = assemble_pi_load(mesh, p.pi, st.m, p.quadrature);
        for (int i = 0; i < n; ++i) sys.rhs[i] -= pl[i];
    }
    return sys;
}

struct LlgStepResult {
    NodalVectorField v;       // tangent update, v(z).m(z) = 0
    NodalVectorField m_next;  // nodewise projected magnetization
    SolveInfo info;
    double tangency_res = 0.0;  // max_z |m(z).v(z)|
};

/// Algorithm step (i)-(ii): constrained linear solve for v in the discrete
/// tangent space of m^l, then the nodewise sphere projection
/// m^{l+1}(z) = (m^l(z) + k v(z)) / |m^l(z) + k v(z)|.
inline LlgStepResult step_llg(const SimulationState& st, const Workspace& ws) {
    const Mesh& mesh = *st.mesh;
    const LlgSystem sys = build_llg_system(st, ws);

    LlgStepResult result;
    result.v = NodalVectorField(mesh, 3, FieldKind::tangent);
    result.v.values = solve_constrained(sys.a, sys.rhs, sys.constraints, st.params.solver,
                                        &result.info);

    double max_v = 0.0;
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        const Vec3 vz = result.v.vec3_at(z);
        result.tangency_res = std::max(result.tangency_res, std::abs(dot(st.m.vec3_at(z), vz)));
        max_v = std::max(max_v, norm(vz));
    }
    if (st.params.check_invariants &&
        result.tangency_res > 10.0 * st.params.solver.tol_rel * std::max(max_v, 1.0))
        throw InvariantError("tangency residual " + std::to_string(result.tangency_res) +
                             " above solver-tolerance threshold");

    result.m_next = NodalVectorField(mesh, 3, FieldKind::magnetization);
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        const Vec3 w = st.m.vec3_at(z) + st.params.k * result.v.vec3_at(z);
        const double len = norm(w);
        // |m + k v| >= 1 by nodal orthogonality; only rounding can undercut
        if (len < 1.0 - 1e-9)
            throw InvariantError("projection denominator " + std::to_string(len) +
                                 " below 1 at node " + std::to_string(z));
        result.m_next.set_vec3(z, {w[0] / len, w[1] / len, w[2] / len});
    }
    return result;
}

struct MomentumStepResult {
    NodalVectorField u_next;
    NodalVectorField dtu_next;
    SolveInfo info;
};

/// Algorithm step (iii): implicit solve of the momentum equation with the
/// already-updated magnetization on the right-hand side,
///   rho (d_t^2 u^{l+1}, psi) + (lambda^e eps(u^{l+1}), eps(psi))
///     = (lambda^e eps^m(m^{l+1}), eps(psi)),
/// scaled by k^2/rho so the system reads
///   (M + (k^2/rho) K_el) u^{l+1} = (k^2/rho) rhs + M (u^l + k d_t u^l).
inline MomentumStepResult step_momentum(const SimulationState& st, const NodalVectorField& m_next,
                                        const Workspace& ws) {
    const Mesh& mesh = *st.mesh;
    const Params& p = st.params;
    const int d = mesh.dim;
    const int nf = ws.free_map.n_free();

    const auto rhs_full = assemble_elastic_rhs(mesh, m_next, p.lambda_e, p.lambda_m, p.quadrature);
    std::vector<double> ukdtu(static_cast<std::size_t>(nf) * d);
    for (int f = 0; f < nf; ++f) {
        const std::int32_t z = ws.free_map.free_to_node[f];
        for (int c = 0; c < d; ++c) ukdtu[static_cast<std::size_t>(f) * d + c] = st.u(z, c) + p.k * st.dtu(z, c);
    }
    std::vector<double> b(static_cast<std::size_t>(nf) * d);
    spmv(ws.mass_free, ukdtu, b);
    const double scale = p.k * p.k / p.rho;
    for (int f = 0; f < nf; ++f) {
        const std::int32_t z = ws.free_map.free_to_node[f];
        for (int c = 0; c < d; ++c)
            b[static_cast<std::size_t>(f) * d + c] += scale * rhs_full[static_cast<std::size_t>(z) * d + c];
    }

    MomentumStepResult result;
    const auto u_free = solve_spd(ws.momentum_matrix, b, p.solver, &result.info);
    result.u_next = NodalVectorField(mesh, d, FieldKind::displacement);
    result.dtu_next = NodalVectorField(mesh, d, FieldKind::velocity);
    for (int f = 0; f < nf; ++f) {
        const std::int32_t z = ws.free_map.free_to_node[f];
        for (int c = 0; c < d; ++c) {
            result.u_next(z, c) = u_free[static_cast<std::size_t>(f) * d + c];
            result.dtu_next(z, c) = (result.u_next(z, c) - st.u(z, c)) / p.k;
        }
    }
    return result;
}

struct StepReport {
    SolveInfo llg;
    SolveInfo momentum;
    double tangency_res = 0.0;
    double mod_dev = 0.0;
    double grad_sq_next = 0.0;  // |grad m^{l+1}|^2
    double grad_sq_pred = 0.0;  // |grad (m^l + k v^l)|^2
};

inline double stiffness_quadratic_form(const CsrMatrix& k3, const std::vector<double>& values) {
    double acc = 0.0;
    for (int i = 0; i < k3.n_rows; ++i) {
        double row = 0.0;
        for (std::int64_t s = k3.row_offsets[i]; s < k3.row_offsets[i + 1]; ++s)
            row += k3.values[s] * values[k3.col_indices[s]];
        acc += row * values[i];
    }
    return acc;
}

/// One full time step: LLG solve, projection, momentum solve. Mutates the
/// state, increments the step index, and re-checks the discrete invariants
/// (unit modulus, energy decay) unless disabled.
inline StepReport advance(SimulationState& st, const Workspace& ws) {
    const Params& p = st.params;
    LlgStepResult llg = step_llg(st, ws);
    MomentumStepResult mom = step_momentum(st, llg.m_next, ws);

    StepReport report;
    report.llg = llg.info;
    report.momentum = mom.info;
    report.tangency_res = llg.tangency_res;
    report.mod_dev = max_modulus_deviation(llg.m_next);
    report.grad_sq_next = stiffness_quadratic_form(ws.k3, llg.m_next.values);
    {
        std::vector<double> pred = st.m.values;
        for (std::size_t i = 0; i < pred.size(); ++i) pred[i] += p.k * llg.v.values[i];
        report.grad_sq_pred = stiffness_quadratic_form(ws.k3, pred);
    }
    if (p.check_invariants) {
        if (report.mod_dev > 1e-12)
            throw InvariantError("nodal modulus deviation " + std::to_string(report.mod_dev) +
                                 " after projection at step " + std::to_string(st.step));
        // energy decay |grad m^{l+1}|^2 <= |grad (m^l + k v^l)|^2, a theorem
        // for angle-condition meshes
        const double slack = 1e-10 * std::max(report.grad_sq_pred, 1.0);
        if (report.grad_sq_next > report.grad_sq_pred + slack)
            throw InvariantError("projection energy decay violated at step " + std::to_string(st.step));
    }
    st.m = std::move(llg.m_next);
    st.u = std::move(mom.u_next);
    st.dtu = std::move(mom.dtu_next);
    ++st.step;
    return report;
}

struct Advisory {
    bool ok = true;
    std::string message;
};

/// Heuristic stability note for the theta-method: theta > 1/2 is
/// unconditional, theta = 1/2 wants k/h -> 0, theta < 1/2 wants k/h^2 -> 0.
inline Advisory stability_advisory(double theta, double h, double k) {
    if (!(h > 0.0) || !(k > 0.0)) throw ConfigError("stability_advisory needs positive h and k");
    Advisory adv;
    if (theta > 0.5) return adv;
    if (theta == 0.5) {
        if (k / h > 1.0) {
            adv.ok = false;
            adv.message = "theta = 1/2 convergence needs k/h -> 0, but k/h = " + std::to_string(k / h);
        }
        return adv;
    }
    if (k / (h * h) > 1.0) {
        adv.ok = false;
        adv.message = "theta < 1/2 convergence needs k/h^2 -> 0, but k/h^2 = " +
                      std::to_string(k / (h * h));
    }
    return adv;
}

} // namespace magstrict

#endif
