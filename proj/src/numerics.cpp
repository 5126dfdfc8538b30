#include "qclip/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qclip/kernels.hpp"
#include "qclip/rng.hpp"

namespace qclip::numerics {

namespace {

constexpr double kHermTol = 1e-9;

double offdiag_frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (index_t i = 0; i < a.rows(); ++i) {
        for (index_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

void require_hermitian(const ComplexMatrix& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw InvalidOperator(std::string(who) + ": matrix is not square");
    }
    if (!a.all_finite()) {
        throw InvalidOperator(std::string(who) + ": non-finite entries");
    }
    if (!a.is_hermitian(kHermTol)) {
        throw InvalidOperator(std::string(who) + ": matrix is not Hermitian");
    }
}

}  // namespace

HermEigResult herm_eig(const ComplexMatrix& a, double tol) {
    require_hermitian(a, "herm_eig");
    const index_t n = a.rows();
    // Round-off within the Hermiticity tolerance is absorbed up front.
    ComplexMatrix work = (a + a.adjoint()) * cplx{0.5, 0.0};
    // Accumulate V^T row-wise so every rotation is a contiguous kernel call.
    ComplexMatrix vt = ComplexMatrix::identity(n);

    const double fnorm = work.frobenius_norm();
    const double target = tol * std::max(fnorm, 1e-300);
    const auto& k = kernels::active();

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (offdiag_frobenius(work) <= target) {
            break;
        }
        for (index_t p = 0; p + 1 < n; ++p) {
            for (index_t q = p + 1; q < n; ++q) {
                const cplx apq = work(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300) {
                    continue;
                }
                const double app = work(p, p).real();
                const double aqq = work(q, q).real();
                // Small-magnitude root of t^2 - 2*theta*t - 1 = 0.
                const double theta = (aqq - app) / (2.0 * r);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta > 0.0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx phase = apq / r;

                // work <- J^dagger * work * J, rows first, then columns.
                k.crot(n, work.row_ptr(p), 1, work.row_ptr(q), 1, c, s * phase);
                k.crot(n, &work(0, p), static_cast<std::ptrdiff_t>(n), &work(0, q),
                       static_cast<std::ptrdiff_t>(n), c, s * std::conj(phase));
                k.crot(n, vt.row_ptr(p), 1, vt.row_ptr(q), 1, c, s * std::conj(phase));
            }
        }
    }
    if (sweep == kMaxSweeps) {
        throw NumericFailure("herm_eig: Jacobi sweeps did not converge");
    }

    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(),
              [&](index_t i, index_t j) { return work(i, i).real() < work(j, j).real(); });

    HermEigResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors = ComplexMatrix(n, n);
    for (index_t col = 0; col < n; ++col) {
        const index_t src = order[col];
        result.eigenvalues[col] = work(src, src).real();
        for (index_t i = 0; i < n; ++i) {
            result.eigenvectors(i, col) = vt(src, i);  // column of V = row of V^T
        }
    }
    return result;
}

double spectral_norm(const ComplexMatrix& a, index_t iters, double tol) {
    if (a.empty()) {
        throw DimensionMismatch("spectral_norm: empty matrix");
    }
    if (a.max_abs() == 0.0) {
        return 0.0;
    }
    Rng rng(0xc3f5a97d2b01ULL);
    std::vector<cplx> v(a.cols());
    double nv = 0.0;
    for (auto& z : v) {
        z = {rng.normal(), rng.normal()};
        nv += std::norm(z);
    }
    nv = std::sqrt(nv);
    for (auto& z : v) {
        z /= nv;
    }

    double lambda_prev = 0.0;
    double lambda = 0.0;
    for (index_t it = 0; it < iters; ++it) {
        const std::vector<cplx> w = a.apply(v);
        double nw2 = 0.0;
        for (const auto& z : w) {
            nw2 += std::norm(z);
        }
        lambda = nw2;  // v is unit, so ||Av||^2 is the Rayleigh quotient of a^dagger a
        if (it > 0 && std::abs(lambda - lambda_prev) <= tol * std::max(lambda, 1e-300)) {
            break;
        }
        lambda_prev = lambda;

        std::vector<cplx> u = a.apply_adjoint(w);
        double nu = 0.0;
        for (const auto& z : u) {
            nu += std::norm(z);
        }
        nu = std::sqrt(nu);
        if (nu <= 1e-300) {
            break;  // start vector fell into the null space
        }
        for (index_t i = 0; i < u.size(); ++i) {
            v[i] = u[i] / nu;
        }
    }
    return std::sqrt(lambda);
}

double trace_norm(const ComplexMatrix& a) {
    require_hermitian(a, "trace_norm");
    const HermEigResult eig = herm_eig(a);
    double s = 0.0;
    for (double lam : eig.eigenvalues) {
        s += std::abs(lam);
    }
    return s;
}

double default_psd_shift(const ComplexMatrix& a) { return 1e-9 * std::max(1.0, a.max_abs()); }

bool psd_feasible(const ComplexMatrix& a, double shift) {
    if (a.rows() != a.cols() || a.empty() || !a.all_finite()) {
        return false;
    }
    const index_t n = a.rows();
    ComplexMatrix l = (a + a.adjoint()) * cplx{0.5, 0.0};
    for (index_t i = 0; i < n; ++i) {
        l(i, i) += shift;
    }
    const auto& k = kernels::active();
    for (index_t j = 0; j < n; ++j) {
        const cplx diag_dot = k.cdotc(j, l.row_ptr(j), l.row_ptr(j));
        const double pivot = l(j, j).real() - diag_dot.real();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            return false;
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (index_t i = j + 1; i < n; ++i) {
            // L(i,j) = (B(i,j) - sum_k L(i,k) conj(L(j,k))) / L(j,j)
            const cplx partial = std::conj(k.cdotc(j, l.row_ptr(i), l.row_ptr(j)));
            l(i, j) = (l(i, j) - partial) / ljj;
        }
    }
    return true;
}

}  // namespace qclip::numerics
