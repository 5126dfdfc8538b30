#pragma once

#include <vector>

#include "qclip/complex_matrix.hpp"
#include "qclip/kernels.hpp"

namespace qclip {

// Dense real matrix, row-major; the classical-network counterpart of
// ComplexMatrix.
class RealMatrix {
  public:
    RealMatrix() = default;
    RealMatrix(index_t rows, index_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
    RealMatrix(index_t rows, index_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_) {
            throw DimensionMismatch("entry count does not match rows*cols");
        }
    }

    static RealMatrix identity(index_t n) {
        RealMatrix m(n, n);
        for (index_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    double& operator()(index_t i, index_t j) { return entries_[i * cols_ + j]; }
    const double& operator()(index_t i, index_t j) const { return entries_[i * cols_ + j]; }
    double* row_ptr(index_t i) { return entries_.data() + i * cols_; }
    const double* row_ptr(index_t i) const { return entries_.data() + i * cols_; }
    const std::vector<double>& entries() const { return entries_; }
    std::vector<double>& entries() { return entries_; }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols_) {
            throw DimensionMismatch("matrix-vector shape mismatch");
        }
        const auto& k = kernels::active();
        std::vector<double> y(rows_);
        for (index_t i = 0; i < rows_; ++i) {
            y[i] = k.ddot(cols_, row_ptr(i), x.data());
        }
        return y;
    }

    // W^T v, accumulated row-wise so the inner loop stays contiguous.
    std::vector<double> apply_transpose(const std::vector<double>& v) const {
        if (v.size() != rows_) {
            throw DimensionMismatch("transpose matrix-vector shape mismatch");
        }
        const auto& k = kernels::active();
        std::vector<double> y(cols_, 0.0);
        for (index_t i = 0; i < rows_; ++i) {
            k.daxpy(cols_, v[i], row_ptr(i), y.data());
        }
        return y;
    }

    RealMatrix transpose() const {
        RealMatrix m(cols_, rows_);
        for (index_t i = 0; i < rows_; ++i) {
            for (index_t j = 0; j < cols_; ++j) {
                m(j, i) = (*this)(i, j);
            }
        }
        return m;
    }

    ComplexMatrix to_complex() const {
        ComplexMatrix m(rows_, cols_);
        for (index_t i = 0; i < rows_; ++i) {
            for (index_t j = 0; j < cols_; ++j) {
                m(i, j) = (*this)(i, j);
            }
        }
        return m;
    }

  private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> entries_;
};

}  // namespace qclip
