#ifndef MAGSTRICT_MESH_HPP
#define MAGSTRICT_MESH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "magstrict/errors.hpp"
#include "magstrict/vec.hpp"

namespace magstrict {

/// Conforming simplex mesh. Node coordinates are stored with stride `dim`,
/// element connectivity with stride `dim+1` (0-based node indices).
/// Immutable after construction; safe for concurrent reads.
struct Mesh {
    int dim = 2;
    std::vector<double> coords;          // n_nodes * dim
    std::vector<std::int32_t> conn;      // n_elems * (dim+1)
    std::vector<std::uint8_t> boundary;  // per node, 1 = Dirichlet node on the domain boundary
    double h_max = 0.0;                  // maximal element diameter

    int n_nodes() const { return static_cast<int>(boundary.size()); }
    int n_elems() const { return static_cast<int>(conn.size()) / (dim + 1); }

    double node_coord(int node, int c) const { return coords[static_cast<std::size_t>(node) * dim + c]; }
    std::int32_t elem_node(int elem, int a) const { return conn[static_cast<std::size_t>(elem) * (dim + 1) + a]; }

    Vec2 node2(int node) const { return {node_coord(node, 0), node_coord(node, 1)}; }
};

/// Area and constant hat-function gradients of one triangle (dim == 2).
struct TriangleGeometry {
    double area;
    std::array<Vec2, 3> grad;  // grad[a] = gradient of the hat function of local vertex a
};

inline TriangleGeometry triangle_geometry(const Mesh& mesh, int elem) {
    const Vec2 p0 = mesh.node2(mesh.elem_node(elem, 0));
    const Vec2 p1 = mesh.node2(mesh.elem_node(elem, 1));
    const Vec2 p2 = mesh.node2(mesh.elem_node(elem, 2));
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    if (!(det > 0.0))
        throw InvariantError("degenerate or misoriented element " + std::to_string(elem));
    TriangleGeometry g;
    g.area = 0.5 * det;
    // grad of hat at vertex a is the 90-degree rotation of the opposite edge over 2A
    const std::array<Vec2, 3> p = {p0, p1, p2};
    for (int a = 0; a < 3; ++a) {
        const Vec2& u = p[(a + 1) % 3];
        const Vec2& v = p[(a + 2) % 3];
        g.grad[a] = {-(v[1] - u[1]) / det, (v[0] - u[0]) / det};
    }
    return g;
}

inline double element_volume(const Mesh& mesh, int elem) {
    if (mesh.dim == 2) {
        const Vec2 p0 = mesh.node2(mesh.elem_node(elem, 0));
        const Vec2 p1 = mesh.node2(mesh.elem_node(elem, 1));
        const Vec2 p2 = mesh.node2(mesh.elem_node(elem, 2));
        return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
    }
    // signed tetrahedron volume
    double e[3][3];
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
            e[a][c] = mesh.node_coord(mesh.elem_node(elem, a + 1), c) - mesh.node_coord(mesh.elem_node(elem, 0), c);
    const double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                       e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                       e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
    return det / 6.0;
}

/// Nodes touching an edge (face) that belongs to exactly one element.
inline std::vector<std::uint8_t> topological_boundary_nodes(const Mesh& mesh) {
    std::vector<std::uint8_t> flag(mesh.n_nodes(), 0);
    if (mesh.dim == 2) {
        std::map<std::pair<std::int32_t, std::int32_t>, int> edge_count;
        for (int e = 0; e < mesh.n_elems(); ++e) {
            for (int a = 0; a < 3; ++a) {
                std::int32_t i = mesh.elem_node(e, a);
                std::int32_t j = mesh.elem_node(e, (a + 1) % 3);
                if (i > j) std::swap(i, j);
                ++edge_count[{i, j}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            if (count == 1) {
                flag[edge.first] = 1;
                flag[edge.second] = 1;
            }
        }
    } else {
        std::map<std::array<std::int32_t, 3>, int> face_count;
        for (int e = 0; e < mesh.n_elems(); ++e) {
            for (int a = 0; a < 4; ++a) {
                std::array<std::int32_t, 3> f;
                int w = 0;
                for (int b = 0; b < 4; ++b)
                    if (b != a) f[w++] = mesh.elem_node(e, b);
                std::sort(f.begin(), f.end());
                ++face_count[f];
            }
        }
        for (const auto& [face, count] : face_count) {
            if (count == 1)
                for (std::int32_t n : face) flag[n] = 1;
        }
    }
    return flag;
}

/// Structural validation: positive element volumes, index bounds, no orphan
/// nodes, boundary flags consistent with the topological rule.
inline void validate_mesh(const Mesh& mesh) {
    if (mesh.dim != 2 && mesh.dim != 3)
        throw InvariantError("mesh dim must be 2 or 3");
    const int nn = mesh.n_nodes();
    if (static_cast<int>(mesh.coords.size()) != nn * mesh.dim)
        throw InvariantError("coordinate array size inconsistent with node count");
    std::vector<std::uint8_t> referenced(nn, 0);
    for (int e = 0; e < mesh.n_elems(); ++e) {
        for (int a = 0; a <= mesh.dim; ++a) {
            const std::int32_t z = mesh.elem_node(e, a);
            if (z < 0 || z >= nn)
                throw InvariantError("element " + std::to_string(e) + " references node index out of range");
            referenced[z] = 1;
        }
        if (!(element_volume(mesh, e) > 0.0))
            throw InvariantError("element " + std::to_string(e) + " has nonpositive volume");
    }
    for (int z = 0; z < nn; ++z)
        if (!referenced[z])
            throw InvariantError("orphan node " + std::to_string(z));
    const auto topo = topological_boundary_nodes(mesh);
    for (int z = 0; z < nn; ++z)
        if (topo[z] != mesh.boundary[z])
            throw InvariantError("boundary flag of node " + std::to_string(z) +
                                 " disagrees with the topological boundary rule");
    for (double c : mesh.coords)
        if (!std::isfinite(c)) throw InvariantError("non-finite node coordinate");
}

/// Halved-squares triangulation T_r of (-0.5,0.5)^2: 2^(2r+1) right triangles
/// on a (2^r+1)^2 node lattice, every square split along its lower-left to
/// upper-right diagonal. Boundary nodes are those with max-norm 0.5.
inline Mesh build_structured_mesh(int r) {
    if (r < 1)
        throw ConfigError("mesh refinement r must be >= 1, got " + std::to_string(r));
    if (r > 14)
        throw ConfigError("mesh refinement r=" + std::to_string(r) +
                          " exceeds the 32-bit index range of the DOF numbering (max 14)");
    const int n = 1 << r;           // squares per side
    const double h = 1.0 / n;       // grid spacing 2^-r
    Mesh mesh;
    mesh.dim = 2;
    mesh.coords.reserve(static_cast<std::size_t>(n + 1) * (n + 1) * 2);
    mesh.boundary.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.coords.push_back(-0.5 + i * h);
            mesh.coords.push_back(-0.5 + j * h);
            mesh.boundary.push_back((i == 0 || i == n || j == 0 || j == n) ? 1 : 0);
        }
    }
    auto id = [n](int i, int j) { return static_cast<std::int32_t>(j * (n + 1) + i); };
    mesh.conn.reserve(static_cast<std::size_t>(2) * n * n * 3);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::int32_t v00 = id(i, j), v10 = id(i + 1, j);
            const std::int32_t v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            mesh.conn.insert(mesh.conn.end(), {v00, v10, v11});
            mesh.conn.insert(mesh.conn.end(), {v00, v11, v01});
        }
    }
    mesh.h_max = std::sqrt(2.0) * h;
    return mesh;
}

/// Result of the angle-condition check: all off-diagonal entries of the
/// scalar P1 stiffness matrix must be <= tol.
struct AngleReport {
    bool pass = true;
    double worst_entry = 0.0;  // maximal off-diagonal entry found
    std::int32_t node_i = -1;
    std::int32_t node_j = -1;
};

inline AngleReport check_angle_condition(const Mesh& mesh, double tol_angle = 1e-12) {
    if (mesh.dim != 2)
        throw ConfigError("angle condition check implemented for dim=2 only");
    std::map<std::pair<std::int32_t, std::int32_t>, double> offdiag;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        const TriangleGeometry g = triangle_geometry(mesh, e);
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                std::int32_t i = mesh.elem_node(e, a);
                std::int32_t j = mesh.elem_node(e, b);
                if (i > j) std::swap(i, j);
                offdiag[{i, j}] += g.area * dot2(g.grad[a], g.grad[b]);
            }
        }
    }
    AngleReport report;
    bool first = true;
    for (const auto& [pair, value] : offdiag) {
        if (first || value > report.worst_entry) {
            report.worst_entry = value;
            report.node_i = pair.first;
            report.node_j = pair.second;
            first = false;
        }
    }
    report.pass = report.worst_entry <= tol_angle;
    return report;
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Plain-text mesh format:
///   line 1: "dim N_nodes N_elem"
///   N_nodes coordinate lines, N_elem 0-based connectivity lines,
///   N_nodes boundary-flag lines (0/1).
inline void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open mesh file for writing: " + path);
    out << mesh.dim << ' ' << mesh.n_nodes() << ' ' << mesh.n_elems() << '\n';
    for (int z = 0; z < mesh.n_nodes(); ++z) {
        for (int c = 0; c < mesh.dim; ++c)
            out << (c ? " " : "") << detail::format_g17(mesh.node_coord(z, c));
        out << '\n';
    }
    for (int e = 0; e < mesh.n_elems(); ++e) {
        for (int a = 0; a <= mesh.dim; ++a)
            out << (a ? " " : "") << mesh.elem_node(e, a);
        out << '\n';
    }
    for (int z = 0; z < mesh.n_nodes(); ++z)
        out << int(mesh.boundary[z]) << '\n';
    if (!out) throw ConfigError("write failed: " + path);
}

inline Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    long line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                return std::istringstream(line);
        }
        throw MeshIoError("unexpected end of file", line_no + 1);
    };

    Mesh mesh;
    long n_nodes = 0, n_elems = 0;
    {
        std::istringstream header = [&]() {
            if (!std::getline(in, line)) throw MeshIoError("malformed header: empty file", 1);
            ++line_no;
            return std::istringstream(line);
        }();
        if (!(header >> mesh.dim >> n_nodes >> n_elems) || (mesh.dim != 2 && mesh.dim != 3) ||
            n_nodes <= 0 || n_elems <= 0)
            throw MeshIoError("malformed header: expected \"dim N_nodes N_elem\"", line_no);
    }
    mesh.coords.resize(static_cast<std::size_t>(n_nodes) * mesh.dim);
    mesh.boundary.resize(n_nodes);
    for (long z = 0; z < n_nodes; ++z) {
        auto ls = next_line();
        for (int c = 0; c < mesh.dim; ++c) {
            std::string token;
            if (!(ls >> token)) throw MeshIoError("malformed coordinate line", line_no);
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);  // accepts nan/inf tokens
            if (end != token.c_str() + token.size())
                throw MeshIoError("malformed coordinate line", line_no);
            if (!std::isfinite(v)) throw MeshIoError("non-finite coordinate", line_no);
            mesh.coords[static_cast<std::size_t>(z) * mesh.dim + c] = v;
        }
    }
    mesh.conn.resize(static_cast<std::size_t>(n_elems) * (mesh.dim + 1));
    for (long e = 0; e < n_elems; ++e) {
        auto ls = next_line();
        for (int a = 0; a <= mesh.dim; ++a) {
            long idx;
            if (!(ls >> idx)) throw MeshIoError("malformed connectivity line", line_no);
            if (idx < 0 || idx >= n_nodes) throw MeshIoError("index out of range", line_no);
            mesh.conn[static_cast<std::size_t>(e) * (mesh.dim + 1) + a] = static_cast<std::int32_t>(idx);
        }
    }
    for (long z = 0; z < n_nodes; ++z) {
        auto ls = next_line();
        int flag;
        if (!(ls >> flag) || (flag != 0 && flag != 1))
            throw MeshIoError("malformed boundary flag (expected 0 or 1)", line_no);
        mesh.boundary[z] = static_cast<std::uint8_t>(flag);
    }
    double h = 0.0;
    for (int e = 0; e < mesh.n_elems(); ++e) {
        for (int a = 0; a <= mesh.dim; ++a) {
            for (int b = a + 1; b <= mesh.dim; ++b) {
                double d2 = 0.0;
                for (int c = 0; c < mesh.dim; ++c) {
                    const double d = mesh.node_coord(mesh.elem_node(e, a), c) -
                                     mesh.node_coord(mesh.elem_node(e, b), c);
                    d2 += d * d;
                }
                h = std::max(h, d2);
            }
        }
    }
    mesh.h_max = std::sqrt(h);
    validate_mesh(mesh);
    return mesh;
}

} // namespace magstrict

#endif
