// Test-only oracles, deliberately independent of the library's solve and
// assembly paths: a Gauss-Jordan full-pivot dense solver, a saddle-system
// assembler, and a Duffy-transform Gauss quadrature over triangles.
#ifndef MAGSTRICT_TESTS_ORACLES_HPP
#define MAGSTRICT_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "magstrict/fields.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/sparse.hpp"
#include "magstrict/vec.hpp"

namespace oracles {

/// Dense solve by Gauss-Jordan elimination with full pivoting (row and
/// column swaps). Written independently of magstrict::detail::dense_lu_solve.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j)
                if (std::abs(a[i * n + j]) > best) {
                    best = std::abs(a[i * n + j]);
                    pr = i;
                    pc = j;
                }
        if (best == 0.0) throw std::runtime_error("oracle: singular matrix");
        for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[pr * n + j]);
        std::swap(b[k], b[pr]);
        for (int i = 0; i < n; ++i) std::swap(a[i * n + k], a[i * n + pc]);
        std::swap(perm[k], perm[pc]);
        const double piv = a[k * n + k];
        for (int j = 0; j < n; ++j) a[k * n + j] /= piv;
        b[k] /= piv;
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a[i * n + k];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[perm[i]] = b[i];
    return x;
}

inline std::vector<double> csr_to_dense(const magstrict::CsrMatrix& a) {
    std::vector<double> dense(static_cast<std::size_t>(a.n_rows) * a.n_cols, 0.0);
    for (int i = 0; i < a.n_rows; ++i)
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            dense[static_cast<std::size_t>(i) * a.n_cols + a.col_indices[s]] = a.values[s];
    return dense;
}

/// Solve [A B^T; B 0] [v; lambda] = [b; 0] densely; returns v.
inline std::vector<double> saddle_solve(const magstrict::CsrMatrix& a, const std::vector<double>& b,
                                        const std::vector<magstrict::Vec3>& constraints) {
    const int n = a.n_rows;
    const int nc = static_cast<int>(constraints.size());
    const int m = n + nc;
    std::vector<double> dense(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < n; ++i)
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            dense[static_cast<std::size_t>(i) * m + a.col_indices[s]] = a.values[s];
    for (int z = 0; z < nc; ++z) {
        for (int c = 0; c < 3; ++c) {
            dense[static_cast<std::size_t>(3 * z + c) * m + (n + z)] = constraints[z][c];
            dense[static_cast<std::size_t>(n + z) * m + (3 * z + c)] = constraints[z][c];
        }
    }
    std::vector<double> rhs(m, 0.0);
    for (int i = 0; i < n; ++i) rhs[i] = b[i];
    const auto x = dense_solve(dense, rhs, m);
    return std::vector<double>(x.begin(), x.begin() + n);
}

/// High-order quadrature of f over triangle (p0,p1,p2) via the Duffy map
/// with tensor Gauss-Legendre points; exact for polynomials far beyond the
/// library's degree-5 rule and built from different points and weights.
inline double duffy_integrate(const magstrict::Vec2& p0, const magstrict::Vec2& p1,
                              const magstrict::Vec2& p2,
                              const std::function<double(double, double)>& f) {
    // 10-point Gauss-Legendre nodes/weights on [0,1]
    static const double gx[10] = {0.013046735741414128, 0.06746831665550773, 0.16029521585048778,
                                  0.2833023029353764,  0.4255628305091844,  0.5744371694908156,
                                  0.7166976970646236,  0.8397047841495122,  0.9325316833444923,
                                  0.9869532642585859};
    static const double gw[10] = {0.033335672154344034, 0.07472567457529018, 0.109543181257991,
                                  0.13463335965499826, 0.1477621123573765,  0.1477621123573765,
                                  0.13463335965499826, 0.109543181257991,   0.07472567457529018,
                                  0.033335672154344034};
    const double jac = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double u = gx[i];
            const double v = gx[j] * (1.0 - u);  // collapsed coordinate
            const double x = p0[0] + u * (p1[0] - p0[0]) + v * (p2[0] - p0[0]);
            const double y = p0[1] + u * (p1[1] - p0[1]) + v * (p2[1] - p0[1]);
            acc += gw[i] * gw[j] * (1.0 - u) * f(x, y);
        }
    }
    return acc * jac;
}

/// Hat-function value of local vertex a at point (x, y) of element e.
inline double hat_value(const magstrict::Mesh& mesh, int e, int a, double x, double y) {
    const magstrict::Vec2 pa = mesh.node2(mesh.elem_node(e, a));
    const magstrict::TriangleGeometry g = magstrict::triangle_geometry(mesh, e);
    return 1.0 + g.grad[a][0] * (x - pa[0]) + g.grad[a][1] * (y - pa[1]);
}

// --- small meshes -----------------------------------------------------------

/// Two triangles sharing the long edge (0)-(1) whose opposite angles are both
/// obtuse; violates the angle condition on that edge.
inline magstrict::Mesh obtuse_pair_mesh() {
    magstrict::Mesh mesh;
    mesh.dim = 2;
    mesh.coords = {0.0, 0.0, 1.0, 0.0, 0.5, 0.15, 0.5, -0.15};
    mesh.conn = {0, 1, 2, 0, 3, 1};
    mesh.boundary = {1, 1, 1, 1};
    mesh.h_max = 1.0;
    return mesh;
}

inline magstrict::Mesh single_triangle_mesh(magstrict::Vec2 p0, magstrict::Vec2 p1,
                                            magstrict::Vec2 p2) {
    magstrict::Mesh mesh;
    mesh.dim = 2;
    mesh.coords = {p0[0], p0[1], p1[0], p1[1], p2[0], p2[1]};
    mesh.conn = {0, 1, 2};
    mesh.boundary = {1, 1, 1};
    double h = 0.0;
    auto edge = [](magstrict::Vec2 a, magstrict::Vec2 b) {
        return std::hypot(a[0] - b[0], a[1] - b[1]);
    };
    h = std::max({edge(p0, p1), edge(p1, p2), edge(p2, p0)});
    mesh.h_max = h;
    return mesh;
}

// --- random fields ----------------------------------------------------------

inline magstrict::Vec3 random_unit_vec(std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    magstrict::Vec3 v{};
    do {
        v = {gauss(rng), gauss(rng), gauss(rng)};
    } while (magstrict::norm(v) < 1e-3);
    return magstrict::normalized(v);
}

inline magstrict::NodalVectorField random_magnetization(const magstrict::Mesh& mesh,
                                                        std::mt19937& rng) {
    magstrict::NodalVectorField m(mesh, 3, magstrict::FieldKind::magnetization);
    for (int z = 0; z < mesh.n_nodes(); ++z) m.set_vec3(z, random_unit_vec(rng));
    return m;
}

/// Random displacement-like field, zero at boundary nodes.
inline magstrict::NodalVectorField random_displacement(const magstrict::Mesh& mesh,
                                                       std::mt19937& rng, double scale,
                                                       magstrict::FieldKind kind =
                                                           magstrict::FieldKind::displacement) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    magstrict::NodalVectorField u(mesh, mesh.dim, kind);
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        if (mesh.boundary[z]) continue;
        for (int c = 0; c < mesh.dim; ++c) u(z, c) = uni(rng);
    }
    return u;
}

/// Smooth product-of-sines field interpolated at the nodes of a T_r mesh of
/// (-0.5,0.5)^2; vanishes on the boundary.
inline magstrict::NodalVectorField smooth_displacement(const magstrict::Mesh& mesh, double a0,
                                                       double a1,
                                                       magstrict::FieldKind kind =
                                                           magstrict::FieldKind::displacement) {
    magstrict::NodalVectorField u(mesh, mesh.dim, kind);
    const double pi = 3.14159265358979323846;
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        if (mesh.boundary[z]) continue;
        const magstrict::Vec2 x = mesh.node2(z);
        const double bump = std::sin(pi * (x[0] + 0.5)) * std::sin(pi * (x[1] + 0.5));
        u(z, 0) = a0 * bump;
        u(z, 1) = a1 * bump * std::cos(pi * (x[0] + 0.5));
    }
    return u;
}

} // namespace oracles

#endif
