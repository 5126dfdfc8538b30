#pragma once

#include <vector>

#include "qclip/common.hpp"

namespace qclip {

// Dense complex matrix, row-major.  Values are immutable by convention once
// built by the producing operation; all library operations return fresh
// matrices instead of mutating shared state.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(index_t rows, index_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, cplx{0.0, 0.0}) {}
    ComplexMatrix(index_t rows, index_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(index_t n);
    static ComplexMatrix diagonal(const std::vector<cplx>& d);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    cplx& operator()(index_t i, index_t j) { return entries_[i * cols_ + j]; }
    const cplx& operator()(index_t i, index_t j) const { return entries_[i * cols_ + j]; }

    cplx* row_ptr(index_t i) { return entries_.data() + i * cols_; }
    const cplx* row_ptr(index_t i) const { return entries_.data() + i * cols_; }
    const std::vector<cplx>& entries() const { return entries_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;
    cplx trace() const;

    double max_abs() const;         // max_ij |a_ij|
    double frobenius_norm() const;  // sqrt(sum |a_ij|^2)
    bool all_finite() const;
    bool is_hermitian(double tol = 1e-9) const;

    ComplexMatrix operator+(const ComplexMatrix& other) const;
    ComplexMatrix operator-(const ComplexMatrix& other) const;
    ComplexMatrix operator*(const ComplexMatrix& other) const;
    ComplexMatrix operator*(cplx scalar) const;

    std::vector<cplx> apply(const std::vector<cplx>& v) const;         // A v
    std::vector<cplx> apply_adjoint(const std::vector<cplx>& v) const; // A^dagger v

    bool approx_equal(const ComplexMatrix& other, double tol) const;

  private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<cplx> entries_;
};

ComplexMatrix operator*(cplx scalar, const ComplexMatrix& m);

// Kronecker product; dimensions multiply.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Outer product v w^dagger as a matrix.
ComplexMatrix outer(const std::vector<cplx>& v, const std::vector<cplx>& w);

}  // namespace qclip
