#ifndef MAGSTRICT_MATERIAL_HPP
#define MAGSTRICT_MATERIAL_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "magstrict/errors.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/vec.hpp"

namespace magstrict {

/// Symmetric d x d matrix (strain or stress). Storage is zero-padded to 3x3;
/// symmetry is enforced by the setter.
struct SymMatrix {
    int dim = 2;
    std::array<std::array<double, 3>, 3> a{};

    SymMatrix() = default;
    explicit SymMatrix(int d) : dim(d) {}

    double operator()(int i, int j) const { return a[i][j]; }
    void set(int i, int j, double v) {
        a[i][j] = v;
        a[j][i] = v;
    }
    static SymMatrix diag(double d0, double d1) {
        SymMatrix m(2);
        m.a[0][0] = d0;
        m.a[1][1] = d1;
        return m;
    }
    double frobenius_sq() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) s += a[i][j] * a[i][j];
        return s;
    }
};

inline SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
    SymMatrix r(x.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) r.a[i][j] = x.a[i][j] - y.a[i][j];
    return r;
}

inline double double_contract(const SymMatrix& x, const SymMatrix& y) {
    double s = 0.0;
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) s += x.a[i][j] * y.a[i][j];
    return s;
}

enum class TensorRole { elastic, magnetic };
enum class DefinitenessMode {
    strict,       // positive definite on all symmetric matrices
    experimental  // semidefinite with positive definite diagonal (normal-strain) block
};

namespace detail {

/// Cyclic Jacobi eigenvalues of a small symmetric matrix (row-major, n <= 6).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    return eig;
}

} // namespace detail

/// Fourth-order material tensor with the symmetries
/// lambda_{ijpq} = lambda_{jipq} = lambda_{ijqp} = lambda_{pqij};
/// construction rejects inputs that violate them.
class Rank4Tensor {
public:
    Rank4Tensor(int dim, TensorRole role, const std::vector<double>& entries)
        : dim_(dim), role_(role), entries_(entries) {
        if (dim != 2 && dim != 3) throw ConfigError("Rank4Tensor dim must be 2 or 3");
        if (static_cast<int>(entries.size()) != dim * dim * dim * dim)
            throw ConfigError("Rank4Tensor entry count must be dim^4");
        for (double v : entries_)
            if (!std::isfinite(v)) throw InvariantError("Rank4Tensor entry not finite");
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int p = 0; p < dim_; ++p)
                    for (int q = 0; q < dim_; ++q) {
                        const double v = (*this)(i, j, p, q);
                        if (v != (*this)(j, i, p, q) || v != (*this)(i, j, q, p) ||
                            v != (*this)(p, q, i, j))
                            throw InvariantError("Rank4Tensor symmetry violated at (" +
                                                 std::to_string(i) + "," + std::to_string(j) + "," +
                                                 std::to_string(p) + "," + std::to_string(q) + ")");
                    }
    }

    int dim() const { return dim_; }
    TensorRole role() const { return role_; }

    double operator()(int i, int j, int p, int q) const {
        return entries_[((i * dim_ + j) * dim_ + p) * dim_ + q];
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (double v : entries_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_zero() const { return max_abs_entry() == 0.0; }

    /// Smallest eigenvalue of the contraction acting on symmetric matrices,
    /// normalized against the Frobenius norm (the lambda* of the positive
    /// definiteness bound).
    double min_eigenvalue() const {
        const auto v = voigt_matrix();
        const int s = dim_ * (dim_ + 1) / 2;
        const auto eig = detail::symmetric_eigenvalues(v, s);
        double m = eig[0];
        for (double e : eig) m = std::min(m, e);
        return m;
    }

    bool is_positive_definite(DefinitenessMode mode, double tol = 1e-12) const {
        if (mode == DefinitenessMode::strict) return min_eigenvalue() > tol;
        if (min_eigenvalue() < -tol) return false;
        // diagonal (normal strain) block must be positive definite
        std::vector<double> block(static_cast<std::size_t>(dim_) * dim_);
        for (int i = 0; i < dim_; ++i)
            for (int p = 0; p < dim_; ++p) block[i * dim_ + p] = (*this)(i, i, p, p);
        const auto eig = detail::symmetric_eigenvalues(block, dim_);
        for (double e : eig)
            if (e <= tol) return false;
        return true;
    }

private:
    /// Matrix of the quadratic form on an orthonormal basis of symmetric
    /// matrices: E_ii, then (e_ip e_pi) / sqrt(2) for i < p.
    std::vector<double> voigt_matrix() const {
        struct Basis {
            int i, j;
            double scale;
        };
        std::vector<Basis> basis;
        for (int i = 0; i < dim_; ++i) basis.push_back({i, i, 1.0});
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j) basis.push_back({i, j, std::sqrt(2.0)});
        const int s = static_cast<int>(basis.size());
        std::vector<double> v(static_cast<std::size_t>(s) * s, 0.0);
        for (int r = 0; r < s; ++r) {
            for (int c = 0; c < s; ++c) {
                const auto& x = basis[r];
                const auto& y = basis[c];
                double acc = (*this)(x.i, x.j, y.i, y.j);
                if (x.i != x.j) acc += (*this)(x.j, x.i, y.i, y.j);
                if (y.i != y.j) acc += (*this)(x.i, x.j, y.j, y.i);
                if (x.i != x.j && y.i != y.j) acc += (*this)(x.j, x.i, y.j, y.i);
                v[r * s + c] = acc / (x.scale * y.scale);
            }
        }
        return v;
    }

    int dim_;
    TensorRole role_;
    std::vector<double> entries_;
};

/// The experiment's diagonal tensor: lambda_1111 = lambda_2222 = c, all other
/// entries zero. Only semidefinite (zero shear block), so it passes the
/// experimental definiteness mode but not the strict one.
inline Rank4Tensor diagonal_tensor(int dim, double c, TensorRole role) {
    if (c < 0.0) throw ConfigError("diagonal tensor constant must be >= 0");
    std::vector<double> entries(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0);
    auto at = [dim](int i, int j, int p, int q) {
        return ((i * dim + j) * dim + p) * dim + q;
    };
    for (int i = 0; i < dim; ++i) entries[at(i, i, i, i)] = c;
    return Rank4Tensor(dim, role, entries);
}

/// eps^m(m)_{ij} = sum_{p,q <= d} lambda^m_{ijpq} m_p m_q. Only the first d
/// components of m enter; the sphere constraint keeps m three-dimensional.
inline SymMatrix magnetic_strain(const Rank4Tensor& lambda_m, const Vec3& m) {
    const int d = lambda_m.dim();
    SymMatrix eps(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double acc = 0.0;
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) acc += lambda_m(i, j, p, q) * m[p] * m[q];
            eps.set(i, j, acc);
        }
    }
    return eps;
}

/// Converse Hook's law: sigma = lambda^e (eps(u) - eps^m(m)).
inline SymMatrix stress(const Rank4Tensor& lambda_e, const SymMatrix& eps_u, const SymMatrix& eps_m) {
    const int d = lambda_e.dim();
    const SymMatrix elastic = eps_u - eps_m;
    SymMatrix sigma(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double acc = 0.0;
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) acc += lambda_e(i, j, p, q) * elastic(p, q);
            sigma.set(i, j, acc);
        }
    }
    return sigma;
}

/// (h_m)_q = sum_{i,j,p <= d} lambda^m_{ijpq} sigma_{ij} m_p; components of
/// the output beyond the strain-space dimension are zero.
inline Vec3 magnetostrictive_field(const Rank4Tensor& lambda_m, const SymMatrix& sigma, const Vec3& m) {
    const int d = lambda_m.dim();
    Vec3 h{0.0, 0.0, 0.0};
    for (int q = 0; q < d; ++q) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int p = 0; p < d; ++p) acc += lambda_m(i, j, p, q) * sigma(i, j) * m[p];
        h[q] = acc;
    }
    return h;
}

/// Constant strain of the affine interpolant of a displacement field on one
/// element.
inline SymMatrix p1_strain(const Mesh& mesh, const NodalVectorField& u, int elem) {
    if (mesh.dim != 2) throw ConfigError("p1_strain implemented for dim=2");
    const TriangleGeometry g = triangle_geometry(mesh, elem);
    double grad[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // grad[i][j] = du_i / dx_j
    for (int a = 0; a < 3; ++a) {
        const std::int32_t z = mesh.elem_node(elem, a);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) grad[i][j] += u(z, i) * g.grad[a][j];
    }
    SymMatrix eps(2);
    eps.set(0, 0, grad[0][0]);
    eps.set(1, 1, grad[1][1]);
    eps.set(0, 1, 0.5 * (grad[0][1] + grad[1][0]));
    return eps;
}

} // namespace magstrict

#endif
