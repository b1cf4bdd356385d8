#ifndef MAGSTRICT_FEM_HPP
#define MAGSTRICT_FEM_HPP

#include <array>
#include <cmath>
#include <vector>

#include "magstrict/contributions.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/material.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/sparse.hpp"

namespace magstrict {

/// Treatment of the L2 pairings that involve the nonlinear-in-m integrands
/// (and of the mass in the LLG step). `lumped` evaluates nodewise with
/// vertex quadrature; `consistent` integrates the P1-composed integrand
/// exactly with a degree-5 rule and uses the consistent mass matrix.
enum class QuadratureMode { lumped, consistent };

namespace detail {

struct QuadPoint {
    double l0, l1, l2;  // barycentric coordinates
    double weight;      // relative to the element area
};

/// 7-point degree-5 rule on the reference triangle.
inline const std::array<QuadPoint, 7>& quad_deg5() {
    static const std::array<QuadPoint, 7> rule = [] {
        const double a1 = (6.0 - std::sqrt(15.0)) / 21.0;
        const double a2 = (6.0 + std::sqrt(15.0)) / 21.0;
        const double w1 = (155.0 - std::sqrt(15.0)) / 1200.0;
        const double w2 = (155.0 + std::sqrt(15.0)) / 1200.0;
        std::array<QuadPoint, 7> r{};
        r[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0};
        r[1] = {a1, a1, 1.0 - 2.0 * a1, w1};
        r[2] = {a1, 1.0 - 2.0 * a1, a1, w1};
        r[3] = {1.0 - 2.0 * a1, a1, a1, w1};
        r[4] = {a2, a2, 1.0 - 2.0 * a2, w2};
        r[5] = {a2, 1.0 - 2.0 * a2, a2, w2};
        r[6] = {1.0 - 2.0 * a2, a2, a2, w2};
        return r;
    }();
    return rule;
}

} // namespace detail

/// Row-sum lumped P1 mass diagonal (scalar): weight of node z is a third of
/// its patch area.
inline std::vector<double> lumped_mass_weights(const Mesh& mesh) {
    std::vector<double> w(mesh.n_nodes(), 0.0);
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double share = element_volume(mesh, e) / 3.0;
        for (int a = 0; a < 3; ++a) w[mesh.elem_node(e, a)] += share;
    }
    return w;
}

/// Consistent or lumped P1 mass matrix, block-replicated over n_comp
/// components (interleaved DOF layout: dof = node * n_comp + comp).
inline CsrMatrix assemble_mass(const Mesh& mesh, int n_comp, bool lumped) {
    const int n = mesh.n_nodes() * n_comp;
    CsrBuilder builder(n, n);
    if (lumped) {
        const auto w = lumped_mass_weights(mesh);
        for (int z = 0; z < mesh.n_nodes(); ++z)
            for (int c = 0; c < n_comp; ++c) builder.add(z * n_comp + c, z * n_comp + c, w[z]);
        return builder.compress();
    }
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double area = element_volume(mesh, e);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double value = area / 12.0 * (a == b ? 2.0 : 1.0);
                for (int c = 0; c < n_comp; ++c)
                    builder.add(mesh.elem_node(e, a) * n_comp + c, mesh.elem_node(e, b) * n_comp + c,
                                value);
            }
        }
    }
    return builder.compress();
}

/// Scalar P1 stiffness (cotangent weights), block-replicated over n_comp.
inline CsrMatrix assemble_stiffness(const Mesh& mesh, int n_comp) {
    const int n = mesh.n_nodes() * n_comp;
    CsrBuilder builder(n, n);
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const TriangleGeometry g = triangle_geometry(mesh, e);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double value = g.area * dot2(g.grad[a], g.grad[b]);
                for (int c = 0; c < n_comp; ++c)
                    builder.add(mesh.elem_node(e, a) * n_comp + c, mesh.elem_node(e, b) * n_comp + c,
                                value);
            }
        }
    }
    return builder.compress();
}

/// Mapping between full node numbering and the free (non-Dirichlet) subset.
struct FreeNodeMap {
    std::vector<std::int32_t> node_to_free;  // -1 for boundary nodes
    std::vector<std::int32_t> free_to_node;

    explicit FreeNodeMap(const Mesh& mesh) : node_to_free(mesh.n_nodes(), -1) {
        for (int z = 0; z < mesh.n_nodes(); ++z) {
            if (!mesh.boundary[z]) {
                node_to_free[z] = static_cast<std::int32_t>(free_to_node.size());
                free_to_node.push_back(z);
            }
        }
    }
    int n_free() const { return static_cast<int>(free_to_node.size()); }
};

/// Elasticity form (lambda^e eps(u), eps(psi)) over all nodes (dim
/// components, interleaved). Symmetric; positive semidefinite with rigid
/// motions in the kernel.
inline CsrMatrix assemble_elasticity_full(const Mesh& mesh, const Rank4Tensor& lambda_e) {
    const int d = mesh.dim;
    const int n = mesh.n_nodes() * d;
    CsrBuilder builder(n, n);
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const TriangleGeometry g = triangle_geometry(mesh, e);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int i = 0; i < d; ++i) {
                    for (int p = 0; p < d; ++p) {
                        double value = 0.0;
                        for (int j = 0; j < d; ++j)
                            for (int q = 0; q < d; ++q)
                                value += lambda_e(i, j, p, q) * g.grad[a][j] * g.grad[b][q];
                        builder.add(mesh.elem_node(e, a) * d + i, mesh.elem_node(e, b) * d + p,
                                    g.area * value);
                    }
                }
            }
        }
    }
    return builder.compress();
}

/// Extract the free-DOF submatrix (symmetric Dirichlet elimination with
/// boundary values pinned to zero).
inline CsrMatrix restrict_to_free(const CsrMatrix& full, const Mesh& mesh, const FreeNodeMap& map,
                                  int n_comp) {
    const int n = map.n_free() * n_comp;
    CsrBuilder builder(n, n);
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        if (map.node_to_free[z] < 0) continue;
        for (int c = 0; c < n_comp; ++c) {
            const int row = z * n_comp + c;
            for (std::int64_t s = full.row_offsets[row]; s < full.row_offsets[row + 1]; ++s) {
                const int col_node = full.col_indices[s] / n_comp;
                if (map.node_to_free[col_node] < 0) continue;
                builder.add(map.node_to_free[z] * n_comp + c,
                            map.node_to_free[col_node] * n_comp + full.col_indices[s] % n_comp,
                            full.values[s]);
            }
        }
    }
    return builder.compress();
}

/// Elasticity form on the zero-boundary subspace (dim * n_free unknowns);
/// positive definite there by Korn's inequality.
inline CsrMatrix assemble_elasticity(const Mesh& mesh, const Rank4Tensor& lambda_e) {
    const FreeNodeMap map(mesh);
    return restrict_to_free(assemble_elasticity_full(mesh, lambda_e), mesh, map, mesh.dim);
}

/// Skew form ((m x v), phi). Lumped mode: one 3x3 block w_z [m(z)]_x per
/// node. Consistent mode: exact integration of the cubic integrand, blocks
/// int zeta_a zeta_b zeta_c [m(z_c)]_x. Either way S + S^T = 0.
inline CsrMatrix assemble_skew(const Mesh& mesh, const NodalVectorField& m,
                               QuadratureMode mode = QuadratureMode::lumped) {
    if (m.kind != FieldKind::magnetization)
        throw InvariantError("assemble_skew expects a magnetization field");
    const int n = mesh.n_nodes() * 3;
    CsrBuilder builder(n, n);
    auto add_block = [&builder](int za, int zb, const Vec3& mm, double scale) {
        // block = scale * [mm]_x
        builder.add(za * 3 + 0, zb * 3 + 1, -scale * mm[2]);
        builder.add(za * 3 + 0, zb * 3 + 2, scale * mm[1]);
        builder.add(za * 3 + 1, zb * 3 + 0, scale * mm[2]);
        builder.add(za * 3 + 1, zb * 3 + 2, -scale * mm[0]);
        builder.add(za * 3 + 2, zb * 3 + 0, -scale * mm[1]);
        builder.add(za * 3 + 2, zb * 3 + 1, scale * mm[0]);
    };
    if (mode == QuadratureMode::lumped) {
        const auto w = lumped_mass_weights(mesh);
        for (int z = 0; z < mesh.n_nodes(); ++z) add_block(z, z, m.vec3_at(z), w[z]);
        return builder.compress();
    }
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double area = element_volume(mesh, e);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int c = 0; c < 3; ++c) {
                    // int_K zeta_a zeta_b zeta_c
                    int rep = 1 + (a == b) + (b == c) + (a == c) + 2 * (a == b && b == c);
                    const double integral = area / 60.0 * rep;
                    add_block(mesh.elem_node(e, a), mesh.elem_node(e, b),
                              m.vec3_at(mesh.elem_node(e, c)), integral);
                }
            }
        }
    }
    return builder.compress();
}

namespace detail {

/// Per-element nodal magnetostrictive field: sigma^h uses the
/// element-constant strain of u and the vertex value of eps^m(m).
inline std::array<Vec3, 3> element_nodal_h(const Mesh& mesh, const NodalVectorField& u,
                                           const NodalVectorField& m, const Rank4Tensor& lambda_e,
                                           const Rank4Tensor& lambda_m, int elem) {
    const SymMatrix eps_u = p1_strain(mesh, u, elem);
    std::array<Vec3, 3> h;
    for (int a = 0; a < 3; ++a) {
        const Vec3 mz = m.vec3_at(mesh.elem_node(elem, a));
        const SymMatrix sigma = stress(lambda_e, eps_u, magnetic_strain(lambda_m, mz));
        h[a] = magnetostrictive_field(lambda_m, sigma, mz);
    }
    return h;
}

} // namespace detail

/// Load vector of the magnetostrictive pairing (h_m(u, m), phi) over 3
/// components per node.
inline std::vector<double> assemble_h_load(const Mesh& mesh, const NodalVectorField& u,
                                           const NodalVectorField& m, const Rank4Tensor& lambda_e,
                                           const Rank4Tensor& lambda_m,
                                           QuadratureMode mode = QuadratureMode::lumped) {
    std::vector<double> load(static_cast<std::size_t>(mesh.n_nodes()) * 3, 0.0);
    if (lambda_m.is_zero()) return load;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double area = element_volume(mesh, e);
        if (mode == QuadratureMode::lumped) {
            const auto h = detail::element_nodal_h(mesh, u, m, lambda_e, lambda_m, e);
            for (int a = 0; a < 3; ++a)
                for (int q = 0; q < 3; ++q)
                    load[static_cast<std::size_t>(mesh.elem_node(e, a)) * 3 + q] += area / 3.0 * h[a][q];
        } else {
            const SymMatrix eps_u = p1_strain(mesh, u, e);
            const std::array<Vec3, 3> mv = {m.vec3_at(mesh.elem_node(e, 0)),
                                            m.vec3_at(mesh.elem_node(e, 1)),
                                            m.vec3_at(mesh.elem_node(e, 2))};
            for (const auto& qp : detail::quad_deg5()) {
                const std::array<double, 3> zeta = {qp.l0, qp.l1, qp.l2};
                Vec3 mh{0.0, 0.0, 0.0};
                for (int a = 0; a < 3; ++a) mh = mh + zeta[a] * mv[a];
                const SymMatrix sigma = stress(lambda_e, eps_u, magnetic_strain(lambda_m, mh));
                const Vec3 h = magnetostrictive_field(lambda_m, sigma, mh);
                for (int a = 0; a < 3; ++a)
                    for (int q = 0; q < 3; ++q)
                        load[static_cast<std::size_t>(mesh.elem_node(e, a)) * 3 + q] +=
                            area * qp.weight * zeta[a] * h[q];
            }
        }
    }
    return load;
}

/// Load vector of (lambda^e eps^m(m), eps(psi)) over dim components per
/// node (all nodes; Dirichlet restriction happens at solve time).
inline std::vector<double> assemble_elastic_rhs(const Mesh& mesh, const NodalVectorField& m,
                                                const Rank4Tensor& lambda_e, const Rank4Tensor& lambda_m,
                                                QuadratureMode mode = QuadratureMode::lumped) {
    const int d = mesh.dim;
    std::vector<double> load(static_cast<std::size_t>(mesh.n_nodes()) * d, 0.0);
    if (lambda_m.is_zero() || lambda_e.is_zero()) return load;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const TriangleGeometry g = triangle_geometry(mesh, e);
        SymMatrix t(d);  // effective lambda^e eps^m(m) integrated over K, divided by area
        if (mode == QuadratureMode::lumped) {
            for (int a = 0; a < 3; ++a) {
                const SymMatrix eps_m = magnetic_strain(lambda_m, m.vec3_at(mesh.elem_node(e, a)));
                const SymMatrix contrib = stress(lambda_e, eps_m, SymMatrix(d));
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) t.a[i][j] += contrib(i, j) / 3.0;
            }
        } else {
            const std::array<Vec3, 3> mv = {m.vec3_at(mesh.elem_node(e, 0)),
                                            m.vec3_at(mesh.elem_node(e, 1)),
                                            m.vec3_at(mesh.elem_node(e, 2))};
            for (const auto& qp : detail::quad_deg5()) {
                const std::array<double, 3> zeta = {qp.l0, qp.l1, qp.l2};
                Vec3 mh{0.0, 0.0, 0.0};
                for (int a = 0; a < 3; ++a) mh = mh + zeta[a] * mv[a];
                const SymMatrix contrib = stress(lambda_e, magnetic_strain(lambda_m, mh), SymMatrix(d));
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) t.a[i][j] += qp.weight * contrib(i, j);
            }
        }
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int j = 0; j < d; ++j) acc += t.a[i][j] * g.grad[a][j];
                load[static_cast<std::size_t>(mesh.elem_node(e, a)) * d + i] += g.area * acc;
            }
    }
    return load;
}

/// Load vector of (pi(m), phi) over 3 components per node.
inline std::vector<double> assemble_pi_load(const Mesh& mesh, const Contribution& pi,
                                            const NodalVectorField& m,
                                            QuadratureMode mode = QuadratureMode::lumped) {
    std::vector<double> load(static_cast<std::size_t>(mesh.n_nodes()) * 3, 0.0);
    if (pi.kind == PiKind::zero) return load;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const double area = element_volume(mesh, e);
        if (mode == QuadratureMode::lumped) {
            for (int a = 0; a < 3; ++a) {
                const std::int32_t z = mesh.elem_node(e, a);
                const Vec3 p = pi_at(pi, m.vec3_at(z));
                for (int q = 0; q < 3; ++q) load[static_cast<std::size_t>(z) * 3 + q] += area / 3.0 * p[q];
            }
        } else {
            const std::array<Vec3, 3> mv = {m.vec3_at(mesh.elem_node(e, 0)),
                                            m.vec3_at(mesh.elem_node(e, 1)),
                                            m.vec3_at(mesh.elem_node(e, 2))};
            for (const auto& qp : detail::quad_deg5()) {
                const std::array<double, 3> zeta = {qp.l0, qp.l1, qp.l2};
                Vec3 mh{0.0, 0.0, 0.0};
                for (int a = 0; a < 3; ++a) mh = mh + zeta[a] * mv[a];
                const Vec3 p = pi_at(pi, mh);
                for (int a = 0; a < 3; ++a)
                    for (int q = 0; q < 3; ++q)
                        load[static_cast<std::size_t>(mesh.elem_node(e, a)) * 3 + q] +=
                            area * qp.weight * zeta[a] * p[q];
            }
        }
    }
    return load;
}

/// Nodal interpolant of the benchmark initial magnetization
///   m0(x) = (2 x A, A^2 - |x|^2) / (A^2 + |x|^2),  A = (1 - 2|x|)^4 / s
/// for |x| <= 0.5 and (0, 0, -1) beyond, renormalized against rounding.
inline NodalVectorField interpolate_initial_m(const Mesh& mesh, double s) {
    if (!(s > 0.0)) throw ConfigError("initial-data parameter s must be positive");
    NodalVectorField m(mesh, 3, FieldKind::magnetization);
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        const Vec2 x = mesh.node2(z);
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        Vec3 value{0.0, 0.0, -1.0};
        if (r < 0.5) {
            const double a = std::pow(1.0 - 2.0 * r, 4) / s;
            const double denom = a * a + r * r;
            value = {2.0 * x[0] * a / denom, 2.0 * x[1] * a / denom, (a * a - r * r) / denom};
        }
        m.set_vec3(z, normalized(value));
    }
    return m;
}

} // namespace magstrict

#endif
