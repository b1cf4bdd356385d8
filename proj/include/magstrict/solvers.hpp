#ifndef MAGSTRICT_SOLVERS_HPP
#define MAGSTRICT_SOLVERS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "magstrict/sparse.hpp"
#include "magstrict/vec.hpp"

namespace magstrict {

struct SolverConfig {
    double tol_rel = 1e-10;
    int max_iter = 0;  // 0 = choose 10 * n
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// In-place Gaussian elimination with partial pivoting on a dense row-major
/// matrix. Validation-path helper for small saddle systems, not a production
/// solver.
inline void dense_lu_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double cand = std::abs(a[static_cast<std::size_t>(i) * n + k]);
            if (cand > best) { best = cand; piv = i; }
        }
        if (best == 0.0) throw SolverError("singular dense system", 0.0, 0);
        if (piv != k) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(k) * n + j], a[static_cast<std::size_t>(piv) * n + j]);
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double f = a[static_cast<std::size_t>(i) * n + k] * inv;
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j)
                a[static_cast<std::size_t>(i) * n + j] -= f * a[static_cast<std::size_t>(k) * n + j];
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a[static_cast<std::size_t>(i) * n + j] * b[j];
        b[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
}

} // namespace detail

/// Preconditioned (Jacobi) conjugate gradients for a symmetric positive
/// definite matrix. Returns x with ||Ax - b|| <= tol_rel * ||b||.
inline std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& b,
                                     const SolverConfig& cfg, SolveInfo* info = nullptr) {
    const int n = a.n_rows;
    if (a.n_cols != n || static_cast<int>(b.size()) != n)
        throw InvariantError("solve_spd dimension mismatch");
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * std::max(n, 1);
    const double bnorm = detail::norm2(b);
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) {
        if (info) *info = {0, 0.0};
        return x;
    }
    std::vector<double> inv_diag(n, 1.0);
    for (int i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        if (d > 0.0) inv_diag[i] = 1.0 / d;
    }
    std::vector<double> r = b, z(n), p(n), q(n);
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = detail::dot(r, z);
    double rnorm = bnorm;
    int it = 0;
    while (it < max_iter) {
        ++it;
        spmv(a, p, q);
        const double pq = detail::dot(p, q);
        if (!(pq > 0.0))
            throw SolverError("solve_spd: matrix not positive definite along search direction", rnorm, it);
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = detail::norm2(r);
        if (!std::isfinite(rnorm))
            throw SolverError("solve_spd: non-finite residual", rnorm, it);
        if (rnorm <= cfg.tol_rel * bnorm) break;
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // recurrence residual can drift; verify explicitly
    spmv(a, x, q);
    for (int i = 0; i < n; ++i) q[i] -= b[i];
    rnorm = detail::norm2(q);
    if (rnorm > cfg.tol_rel * bnorm)
        throw SolverError("solve_spd did not converge", rnorm / bnorm, it);
    if (info) *info = {it, rnorm};
    return x;
}

/// Orthonormal basis of the plane orthogonal to a unit vector m:
/// t1 = normalized m x e_a with e_a the axis least aligned with m, t2 = m x t1.
inline std::pair<Vec3, Vec3> tangent_basis(const Vec3& m) {
    int least = 0;
    double best = std::abs(m[0]);
    for (int c = 1; c < 3; ++c)
        if (std::abs(m[c]) < best) { best = std::abs(m[c]); least = c; }
    Vec3 axis{0.0, 0.0, 0.0};
    axis[least] = 1.0;
    const Vec3 t1 = normalized(cross(m, axis));
    const Vec3 t2 = cross(m, t1);
    return {t1, t2};
}

namespace detail {

/// BiCGStab on a generic operator (positive definite, possibly nonsymmetric).
template <class MatVec>
std::vector<double> bicgstab(const MatVec& apply, const std::vector<double>& b,
                             double tol_rel, int max_iter, SolveInfo* info) {
    const int n = static_cast<int>(b.size());
    std::vector<double> x(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        if (info) *info = {0, 0.0};
        return x;
    }
    std::vector<double> r = b, rhat = b, p(n, 0.0), v(n, 0.0), s(n), t(n), tmp(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double rnorm = bnorm;
    int it = 0;
    while (it < max_iter) {
        ++it;
        const double rho_next = dot(rhat, r);
        if (rho_next == 0.0) break;  // breakdown; final check decides
        const double beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        apply(p, v);
        const double rv = dot(rhat, v);
        if (rv == 0.0) break;
        alpha = rho / rv;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= tol_rel * bnorm) {
            for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
            rnorm = norm2(s);
            break;
        }
        apply(s, t);
        const double tt = dot(t, t);
        if (tt == 0.0) break;
        omega = dot(t, s) / tt;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = norm2(r);
        if (!std::isfinite(rnorm))
            throw SolverError("bicgstab: non-finite residual", rnorm, it);
        if (rnorm <= tol_rel * bnorm) break;
        if (omega == 0.0) break;
    }
    apply(x, tmp);
    for (int i = 0; i < n; ++i) tmp[i] -= b[i];
    rnorm = norm2(tmp);
    if (rnorm > tol_rel * bnorm)
        throw SolverError("bicgstab did not converge", rnorm / bnorm, it);
    if (info) *info = {it, rnorm};
    return x;
}

} // namespace detail

/// Constrained solve for the tangent-space system: A v + B^T lambda = b,
/// B v = 0, where row z of B is the unit vector m(z) acting on the three
/// components at node z. Eliminates the constraint onto the per-node
/// orthonormal tangent basis and runs BiCGStab on the reduced (nonsymmetric,
/// positive definite) operator. The returned v is nodally orthogonal to m by
/// construction; the residual contract holds for the reduced system.
inline std::vector<double> solve_constrained(const CsrMatrix& a, const std::vector<double>& b,
                                             const std::vector<Vec3>& constraints,
                                             const SolverConfig& cfg, SolveInfo* info = nullptr) {
    const int n_nodes = static_cast<int>(constraints.size());
    const int n = 3 * n_nodes;
    if (a.n_rows != n || a.n_cols != n || static_cast<int>(b.size()) != n)
        throw InvariantError("solve_constrained dimension mismatch");
    std::vector<Vec3> t1(n_nodes), t2(n_nodes);
    for (int z = 0; z < n_nodes; ++z) {
        const double len = norm(constraints[z]);
        if (std::abs(len - 1.0) > 1e-10)
            throw InvariantError("constraint vector at node " + std::to_string(z) +
                                 " deviates from unit norm by " + std::to_string(std::abs(len - 1.0)));
        auto [u, w] = tangent_basis(constraints[z]);
        t1[z] = u;
        t2[z] = w;
    }
    const int nr = 2 * n_nodes;
    std::vector<double> full(n), image(n);
    auto expand = [&](std::span<const double> y, std::span<double> out) {
        for (int z = 0; z < n_nodes; ++z)
            for (int c = 0; c < 3; ++c)
                out[3 * z + c] = y[2 * z] * t1[z][c] + y[2 * z + 1] * t2[z][c];
    };
    auto restrict_to_tangent = [&](std::span<const double> w, std::span<double> out) {
        for (int z = 0; z < n_nodes; ++z) {
            const Vec3 wz{w[3 * z], w[3 * z + 1], w[3 * z + 2]};
            out[2 * z] = dot(t1[z], wz);
            out[2 * z + 1] = dot(t2[z], wz);
        }
    };
    std::vector<double> rhs(nr);
    restrict_to_tangent(b, rhs);
    auto reduced_apply = [&](const std::vector<double>& y, std::vector<double>& out) {
        expand(y, full);
        spmv(a, full, image);
        restrict_to_tangent(image, out);
    };
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * std::max(nr, 1);
    SolveInfo reduced_info;
    const std::vector<double> y = detail::bicgstab(reduced_apply, rhs, cfg.tol_rel, max_iter,
                                                   &reduced_info);
    std::vector<double> v(n);
    expand(y, v);
    if (info) *info = reduced_info;
    return v;
}

/// Lagrange-multiplier route for the same saddle system, solved densely.
/// Validation path for small meshes; refuses large systems.
inline std::vector<double> solve_constrained_lagrange(const CsrMatrix& a, const std::vector<double>& b,
                                                      const std::vector<Vec3>& constraints) {
    const int n_nodes = static_cast<int>(constraints.size());
    const int n = 3 * n_nodes;
    const int m = n + n_nodes;
    if (a.n_rows != n || static_cast<int>(b.size()) != n)
        throw InvariantError("solve_constrained_lagrange dimension mismatch");
    if (m > 600)
        throw ConfigError("solve_constrained_lagrange is a small-mesh validation path (saddle size " +
                          std::to_string(m) + " > 600)");
    std::vector<double> saddle(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < n; ++i)
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            saddle[static_cast<std::size_t>(i) * m + a.col_indices[s]] = a.values[s];
    for (int z = 0; z < n_nodes; ++z) {
        for (int c = 0; c < 3; ++c) {
            saddle[static_cast<std::size_t>(3 * z + c) * m + (n + z)] = constraints[z][c];
            saddle[static_cast<std::size_t>(n + z) * m + (3 * z + c)] = constraints[z][c];
        }
    }
    std::vector<double> rhs(m, 0.0);
    std::copy(b.begin(), b.end(), rhs.begin());
    detail::dense_lu_solve(saddle, rhs, m);
    return std::vector<double>(rhs.begin(), rhs.begin() + n);
}

} // namespace magstrict

#endif
