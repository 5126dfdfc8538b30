#pragma once

#include <vector>

#include "qclip/complex_matrix.hpp"

namespace qclip::numerics {

struct HermEigResult {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns; A = V diag(lambda) V^dagger
};

// Cyclic complex Jacobi on the symmetrized input.  `tol` is the target for
// the off-diagonal Frobenius norm relative to ||A||_F.  Inputs farther than
// 1e-9 (max-entry) from Hermitian are rejected.
HermEigResult herm_eig(const ComplexMatrix& a, double tol = 1e-12);

// Largest singular value via power iteration on a^dagger a with a fixed
// deterministic start vector.  Zero matrix returns 0.
double spectral_norm(const ComplexMatrix& a, index_t iters = 5000, double tol = 1e-13);

// sum_i |lambda_i| for Hermitian input.
double trace_norm(const ComplexMatrix& a);

double default_psd_shift(const ComplexMatrix& a);

// True iff a + shift*I admits a Cholesky factorization with all pivots > 0.
bool psd_feasible(const ComplexMatrix& a, double shift);
inline bool psd_feasible(const ComplexMatrix& a) { return psd_feasible(a, default_psd_shift(a)); }

}  // namespace qclip::numerics
