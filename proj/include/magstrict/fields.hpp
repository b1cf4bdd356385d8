#ifndef MAGSTRICT_FIELDS_HPP
#define MAGSTRICT_FIELDS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "magstrict/errors.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/vec.hpp"

namespace magstrict {

enum class FieldKind { magnetization, tangent, displacement, velocity, general };

/// Piecewise-affine vector field given by nodal values (node-major layout).
/// Magnetization carries 3 components and unit nodal values; displacement
/// and velocity carry dim components and vanish on the Dirichlet boundary.
struct NodalVectorField {
    const Mesh* mesh = nullptr;
    int n_comp = 0;
    FieldKind kind = FieldKind::general;
    std::vector<double> values;

    NodalVectorField() = default;
    NodalVectorField(const Mesh& m, int nc, FieldKind k)
        : mesh(&m), n_comp(nc), kind(k), values(static_cast<std::size_t>(m.n_nodes()) * nc, 0.0) {}

    double operator()(int node, int comp) const {
        return values[static_cast<std::size_t>(node) * n_comp + comp];
    }
    double& operator()(int node, int comp) {
        return values[static_cast<std::size_t>(node) * n_comp + comp];
    }

    Vec3 vec3_at(int node) const {
        Vec3 v{0.0, 0.0, 0.0};
        for (int c = 0; c < n_comp && c < 3; ++c) v[c] = (*this)(node, c);
        return v;
    }
    void set_vec3(int node, const Vec3& v) {
        for (int c = 0; c < n_comp && c < 3; ++c) (*this)(node, c) = v[c];
    }
};

/// First node whose modulus deviates from 1 by more than tol, if any.
inline std::optional<int> find_non_unit_node(const NodalVectorField& m, double tol = 1e-12) {
    for (int z = 0; z < m.mesh->n_nodes(); ++z)
        if (std::abs(norm(m.vec3_at(z)) - 1.0) > tol) return z;
    return std::nullopt;
}

inline double max_modulus_deviation(const NodalVectorField& m) {
    double dev = 0.0;
    for (int z = 0; z < m.mesh->n_nodes(); ++z)
        dev = std::max(dev, std::abs(norm(m.vec3_at(z)) - 1.0));
    return dev;
}

/// First boundary node with a nonzero value, if any.
inline std::optional<int> find_nonzero_boundary_node(const NodalVectorField& f) {
    for (int z = 0; z < f.mesh->n_nodes(); ++z) {
        if (!f.mesh->boundary[z]) continue;
        for (int c = 0; c < f.n_comp; ++c)
            if (f(z, c) != 0.0) return z;
    }
    return std::nullopt;
}

inline void require_kind_invariants(const NodalVectorField& f, const std::string& name) {
    if (f.kind == FieldKind::magnetization) {
        if (f.n_comp != 3) throw InvariantError(name + ": magnetization must have 3 components");
        if (auto z = find_non_unit_node(f))
            throw InvariantError(name + ": non-unit magnetization at node " + std::to_string(*z) +
                                 " (|m| = " + std::to_string(norm(f.vec3_at(*z))) + ")");
    } else if (f.kind == FieldKind::displacement || f.kind == FieldKind::velocity) {
        if (f.n_comp != f.mesh->dim)
            throw InvariantError(name + ": displacement/velocity must have dim components");
        if (auto z = find_nonzero_boundary_node(f))
            throw InvariantError(name + ": nonzero value at boundary node " + std::to_string(*z));
    }
}

} // namespace magstrict

#endif
