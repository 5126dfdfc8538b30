#include "qclip/complex_matrix.hpp"

#include <cmath>

#include "qclip/kernels.hpp"

namespace qclip {

ComplexMatrix::ComplexMatrix(index_t rows, index_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionMismatch("entry count does not match rows*cols");
    }
}

ComplexMatrix ComplexMatrix::identity(index_t n) {
    ComplexMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (index_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i) {
        for (index_t j = 0; j < cols_; ++j) {
            m(j, i) = std::conj((*this)(i, j));
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i) {
        for (index_t j = 0; j < cols_; ++j) {
            m(j, i) = (*this)(i, j);
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m(rows_, cols_);
    for (index_t i = 0; i < entries_.size(); ++i) {
        m.entries_[i] = std::conj(entries_[i]);
    }
    return m;
}

cplx ComplexMatrix::trace() const {
    cplx t{0.0, 0.0};
    const index_t n = rows_ < cols_ ? rows_ : cols_;
    for (index_t i = 0; i < n; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& z : entries_) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : entries_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
    for (const cplx& z : entries_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) {
        return false;
    }
    for (index_t i = 0; i < rows_; ++i) {
        for (index_t j = i; j < cols_; ++j) {
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionMismatch("matrix addition shape mismatch");
    }
    ComplexMatrix m(rows_, cols_);
    for (index_t i = 0; i < entries_.size(); ++i) {
        m.entries_[i] = entries_[i] + other.entries_[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionMismatch("matrix subtraction shape mismatch");
    }
    ComplexMatrix m(rows_, cols_);
    for (index_t i = 0; i < entries_.size(); ++i) {
        m.entries_[i] = entries_[i] - other.entries_[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
    if (cols_ != other.rows_) {
        throw DimensionMismatch("matrix product shape mismatch");
    }
    const auto& k = kernels::active();
    ComplexMatrix out(rows_, other.cols_);
    // C[i,:] += A[i,k] * B[k,:], rows are contiguous.
    for (index_t i = 0; i < rows_; ++i) {
        cplx* ci = out.row_ptr(i);
        for (index_t j = 0; j < cols_; ++j) {
            const cplx aij = (*this)(i, j);
            if (aij != cplx{0.0, 0.0}) {
                k.caxpy(other.cols_, aij, other.row_ptr(j), ci);
            }
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx scalar) const {
    ComplexMatrix m = *this;
    kernels::active().cscal(m.entries_.size(), scalar, m.entries_.data());
    return m;
}

ComplexMatrix operator*(cplx scalar, const ComplexMatrix& m) { return m * scalar; }

std::vector<cplx> ComplexMatrix::apply(const std::vector<cplx>& v) const {
    if (v.size() != cols_) {
        throw DimensionMismatch("matrix-vector shape mismatch");
    }
    const auto& k = kernels::active();
    std::vector<cplx> out(rows_);
    for (index_t i = 0; i < rows_; ++i) {
        out[i] = k.cdotu(cols_, row_ptr(i), v.data());
    }
    return out;
}

std::vector<cplx> ComplexMatrix::apply_adjoint(const std::vector<cplx>& v) const {
    if (v.size() != rows_) {
        throw DimensionMismatch("adjoint matrix-vector shape mismatch");
    }
    const auto& k = kernels::active();
    std::vector<cplx> out(cols_, cplx{0.0, 0.0});
    // (A^dagger v)_j = sum_i conj(A[i][j]) v_i accumulated one row at a time.
    for (index_t i = 0; i < rows_; ++i) {
        k.caxpyc(cols_, v[i], row_ptr(i), out.data());
    }
    return out;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double tol) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        return false;
    }
    for (index_t i = 0; i < entries_.size(); ++i) {
        if (std::abs(entries_[i] - other.entries_[i]) > tol) {
            return false;
        }
    }
    return true;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() || b.empty()) {
        throw DimensionMismatch("kron of empty matrix");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (index_t ia = 0; ia < a.rows(); ++ia) {
        for (index_t ja = 0; ja < a.cols(); ++ja) {
            const cplx f = a(ia, ja);
            if (f == cplx{0.0, 0.0}) {
                continue;
            }
            for (index_t ib = 0; ib < b.rows(); ++ib) {
                cplx* dst = out.row_ptr(ia * b.rows() + ib) + ja * b.cols();
                kernels::active().caxpy(b.cols(), f, b.row_ptr(ib), dst);
            }
        }
    }
    return out;
}

ComplexMatrix outer(const std::vector<cplx>& v, const std::vector<cplx>& w) {
    ComplexMatrix out(v.size(), w.size());
    for (index_t i = 0; i < v.size(); ++i) {
        kernels::active().caxpyc(w.size(), v[i], w.data(), out.row_ptr(i));
    }
    return out;
}

}  // namespace qclip
