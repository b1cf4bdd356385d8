#ifndef MAGSTRICT_SPARSE_HPP
#define MAGSTRICT_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "magstrict/errors.hpp"

namespace magstrict {

/// Compressed-row sparse matrix. Column indices are strictly increasing
/// within each row; immutable after assembly.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::int64_t> row_offsets;  // size n_rows + 1
    std::vector<std::int32_t> col_indices;
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

    double coeff(int i, int j) const {
        for (std::int64_t s = row_offsets[i]; s < row_offsets[i + 1]; ++s)
            if (col_indices[s] == j) return values[s];
        return 0.0;
    }
};

/// Triplet accumulator; duplicate entries are summed on compression.
class CsrBuilder {
public:
    CsrBuilder(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

    void add(int row, int col, double value) {
        entries_.emplace_back(row, col, value);
    }

    CsrMatrix compress() {
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        CsrMatrix m;
        m.n_rows = n_rows_;
        m.n_cols = n_cols_;
        m.row_offsets.assign(n_rows_ + 1, 0);
        for (std::size_t s = 0; s < entries_.size();) {
            std::size_t t = s;
            double acc = 0.0;
            while (t < entries_.size() && entries_[t].row == entries_[s].row &&
                   entries_[t].col == entries_[s].col)
                acc += entries_[t++].value;
            m.col_indices.push_back(entries_[s].col);
            m.values.push_back(acc);
            ++m.row_offsets[entries_[s].row + 1];
            s = t;
        }
        std::partial_sum(m.row_offsets.begin(), m.row_offsets.end(), m.row_offsets.begin());
        return m;
    }

private:
    struct Entry {
        int row;
        int col;
        double value;
        Entry(int r, int c, double v) : row(r), col(c), value(v) {}
    };
    int n_rows_;
    int n_cols_;
    std::vector<Entry> entries_;
};

inline void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != a.n_cols || static_cast<int>(y.size()) != a.n_rows)
        throw InvariantError("spmv dimension mismatch");
    for (int i = 0; i < a.n_rows; ++i) {
        double acc = 0.0;
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            acc += a.values[s] * x[a.col_indices[s]];
        y[i] = acc;
    }
}

inline std::vector<double> spmv(const CsrMatrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.n_rows);
    spmv(a, x, y);
    return y;
}

/// y = alpha * A x + beta * y
inline void spmv_axpby(const CsrMatrix& a, double alpha, std::span<const double> x,
                       double beta, std::span<double> y) {
    for (int i = 0; i < a.n_rows; ++i) {
        double acc = 0.0;
        for (std::int64_t s = a.row_offsets[i]; s < a.row_offsets[i + 1]; ++s)
            acc += a.values[s] * x[a.col_indices[s]];
        y[i] = alpha * acc + beta * y[i];
    }
}

inline CsrMatrix identity_matrix(int n, double scale = 1.0) {
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_offsets.resize(n + 1);
    m.col_indices.resize(n);
    m.values.assign(n, scale);
    for (int i = 0; i <= n; ++i) m.row_offsets[i] = i;
    for (int i = 0; i < n; ++i) m.col_indices[i] = i;
    return m;
}

} // namespace magstrict

#endif
