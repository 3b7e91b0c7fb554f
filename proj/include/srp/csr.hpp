// csr.hpp: compressed sparse row storage with a reusable pattern, plus the
// small dense vector helpers shared by the solvers and assembly.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

namespace srp {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vector& x, Vector& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

struct CsrPattern {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // size rows+1, nondecreasing
    std::vector<int> col_idx;  // sorted and unique within each row

    int nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }

    void validate() const {
        if (static_cast<int>(row_ptr.size()) != rows + 1)
            throw std::runtime_error("CsrPattern: row_ptr size mismatch");
        for (int r = 0; r < rows; ++r) {
            if (row_ptr[r + 1] < row_ptr[r]) throw std::runtime_error("CsrPattern: decreasing row offsets");
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                if (col_idx[k] < 0 || col_idx[k] >= cols)
                    throw std::runtime_error("CsrPattern: column index out of range");
                if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
                    throw std::runtime_error("CsrPattern: columns not sorted unique");
            }
        }
    }

    // Builds a pattern from per-row column sets.
    static CsrPattern from_sets(int rows, int cols, const std::vector<std::set<int>>& row_sets) {
        CsrPattern p;
        p.rows = rows;
        p.cols = cols;
        p.row_ptr.resize(rows + 1, 0);
        for (int r = 0; r < rows; ++r) p.row_ptr[r + 1] = p.row_ptr[r] + static_cast<int>(row_sets[r].size());
        p.col_idx.reserve(p.row_ptr.back());
        for (int r = 0; r < rows; ++r)
            for (int c : row_sets[r]) p.col_idx.push_back(c);
        return p;
    }
};

class CsrMatrix {
public:
    CsrMatrix() = default;
    explicit CsrMatrix(std::shared_ptr<const CsrPattern> pattern)
        : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

    int rows() const { return pattern_->rows; }
    int cols() const { return pattern_->cols; }
    const CsrPattern& pattern() const { return *pattern_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    void set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

    // Position of entry (r,c) in the value array; -1 if not in the pattern.
    int find(int r, int c) const {
        const auto& p = *pattern_;
        const int* lo = p.col_idx.data() + p.row_ptr[r];
        const int* hi = p.col_idx.data() + p.row_ptr[r + 1];
        const int* it = std::lower_bound(lo, hi, c);
        if (it == hi || *it != c) return -1;
        return static_cast<int>(it - p.col_idx.data());
    }

    void add(int r, int c, double v) {
        int k = find(r, c);
        if (k < 0) throw std::runtime_error("CsrMatrix::add: entry outside pattern");
        values_[k] += v;
    }

    double get(int r, int c) const {
        int k = find(r, c);
        return k < 0 ? 0.0 : values_[k];
    }

    void mul(const Vector& x, Vector& y) const {
        const auto& p = *pattern_;
        y.assign(p.rows, 0.0);
        for (int r = 0; r < p.rows; ++r) {
            double s = 0.0;
            for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) s += values_[k] * x[p.col_idx[k]];
            y[r] = s;
        }
    }

    Vector mul(const Vector& x) const {
        Vector y;
        mul(x, y);
        return y;
    }

    // y = A^T x (x has rows() entries, y gets cols()).
    void mul_transpose(const Vector& x, Vector& y) const {
        const auto& p = *pattern_;
        y.assign(p.cols, 0.0);
        for (int r = 0; r < p.rows; ++r) {
            double xr = x[r];
            if (xr == 0.0) continue;
            for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) y[p.col_idx[k]] += values_[k] * xr;
        }
    }

    Vector diagonal() const {
        Vector d(rows(), 0.0);
        for (int r = 0; r < rows(); ++r) {
            int k = find(r, r);
            if (k >= 0) d[r] = values_[k];
        }
        return d;
    }

    double max_symmetry_defect() const {
        double defect = 0.0;
        const auto& p = *pattern_;
        for (int r = 0; r < p.rows; ++r)
            for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                defect = std::max(defect, std::abs(values_[k] - get(p.col_idx[k], r)));
        return defect;
    }

private:
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<double> values_;
};

}  // namespace srp
