#include <doctest.h>

#include <cmath>

#include "qclip/numerics.hpp"
#include "test_util.hpp"

using namespace qclip;
using namespace qclip::numerics;
using testutil::random_hermitian;
using testutil::random_matrix;
using testutil::random_unitary;

namespace {

ComplexMatrix pauli_z() {
    return ComplexMatrix::diagonal({cplx{1, 0}, cplx{-1, 0}});
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("herm_eig on Pauli matrices") {
    const auto rz = herm_eig(pauli_z());
    CHECK(rz.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rz.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));

    const auto rx = herm_eig(pauli_x());
    CHECK(rx.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rx.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("herm_eig reconstruction and orthonormality on random matrices") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const index_t n = 8;
        const ComplexMatrix a = random_hermitian(n, rng);
        const auto r = herm_eig(a);

        for (index_t i = 0; i + 1 < n; ++i) {
            CHECK(r.eigenvalues[i] <= r.eigenvalues[i + 1]);
        }

        const ComplexMatrix v = r.eigenvectors;
        const ComplexMatrix gram = v.adjoint() * v;
        CHECK((gram - ComplexMatrix::identity(n)).max_abs() <= 1e-10);

        ComplexMatrix lam(n, n);
        for (index_t i = 0; i < n; ++i) {
            lam(i, i) = r.eigenvalues[i];
        }
        const ComplexMatrix recon = v * lam * v.adjoint();
        CHECK((a - recon).max_abs() <= 1e-9 * std::max(1.0, a.max_abs()));

        double sum = 0.0;
        for (double l : r.eigenvalues) {
            sum += l;
        }
        CHECK(std::abs(sum - a.trace().real()) <= 1e-9 * static_cast<double>(n));
    }
}

TEST_CASE("herm_eig input validation") {
    CHECK_THROWS_AS(herm_eig(ComplexMatrix(2, 3)), InvalidOperator);
    ComplexMatrix bad(2, 2);
    bad(0, 1) = {1.0, 0.0};
    bad(1, 0) = {0.5, 0.0};  // far from conj-symmetric
    CHECK_THROWS_AS(herm_eig(bad), InvalidOperator);
}

TEST_CASE("spectral_norm basics") {
    CHECK(spectral_norm(ComplexMatrix::identity(2) * cplx{2.0, 0.0}) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spectral_norm(ComplexMatrix::diagonal({cplx{3, 0}, cplx{0.5, 0}})) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(spectral_norm(ComplexMatrix(3, 3)) == 0.0);
}

TEST_CASE("spectral_norm matches eigensolver oracle on random rectangles") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = random_matrix(8, 4, rng);
        const ComplexMatrix ata = a.adjoint() * a;
        const auto eig = herm_eig(ata);
        const double oracle = std::sqrt(eig.eigenvalues.back());
        CHECK(spectral_norm(a) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("spectral_norm is submultiplicative on random pairs") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(6, 5, rng);
        const ComplexMatrix b = random_matrix(5, 7, rng);
        CHECK(spectral_norm(a * b) <= spectral_norm(a) * spectral_norm(b) + 1e-8);
    }
}

TEST_CASE("trace_norm basics") {
    CHECK(trace_norm(ComplexMatrix::diagonal({cplx{0.5, 0}, cplx{-0.5, 0}})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_norm(ComplexMatrix(4, 4)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(trace_norm(ComplexMatrix(2, 3)), InvalidOperator);
}

TEST_CASE("trace_norm equals the positive/negative eigenspace split") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = testutil::random_density(8, rng);
        const auto sigma = testutil::random_density(8, rng);
        const ComplexMatrix delta = rho.mat - sigma.mat;

        // Oracle: split delta into tau_+ - tau_- through its eigenspaces.
        const auto eig = herm_eig(delta);
        const index_t n = delta.rows();
        ComplexMatrix lam_pos(n, n);
        ComplexMatrix lam_neg(n, n);
        for (index_t i = 0; i < n; ++i) {
            const double l = eig.eigenvalues[i];
            lam_pos(i, i) = l > 0.0 ? l : 0.0;
            lam_neg(i, i) = l < 0.0 ? -l : 0.0;
        }
        const ComplexMatrix v = eig.eigenvectors;
        const ComplexMatrix tau_pos = v * lam_pos * v.adjoint();
        const ComplexMatrix tau_neg = v * lam_neg * v.adjoint();

        const double tp = tau_pos.trace().real();
        const double tn = tau_neg.trace().real();
        CHECK(std::abs(tp - tn) <= 1e-9);
        CHECK((tau_pos * tau_neg).max_abs() <= 1e-9);
        CHECK(trace_norm(delta) == doctest::Approx(tp + tn).epsilon(1e-10));
        CHECK(trace_norm(delta) == doctest::Approx(2.0 * tp).epsilon(1e-9));
    }
}

TEST_CASE("trace_norm dominates |trace| with equality only for semidefinite input") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = random_hermitian(6, rng);
        CHECK(trace_norm(a) >= std::abs(a.trace().real()) - 1e-12);
    }
    // PSD: equality
    const ComplexMatrix g = random_matrix(4, 4, rng);
    const ComplexMatrix psd = g * g.adjoint();
    CHECK(trace_norm(psd) == doctest::Approx(psd.trace().real()).epsilon(1e-10));
    // Indefinite: strict
    const ComplexMatrix indef = ComplexMatrix::diagonal({cplx{1, 0}, cplx{-1, 0}});
    CHECK(trace_norm(indef) > std::abs(indef.trace().real()) + 0.5);
}

TEST_CASE("psd_feasible") {
    CHECK(psd_feasible(ComplexMatrix::identity(2)));
    CHECK_FALSE(psd_feasible(ComplexMatrix::diagonal({cplx{1, 0}, cplx{-1, 0}})));

    Rng rng(5);
    const ComplexMatrix v = random_unitary(4, rng);
    ComplexMatrix lam(4, 4);
    lam(0, 0) = 1e-12;
    lam(1, 1) = 1.0;
    lam(2, 2) = 0.5;
    lam(3, 3) = 2.0;
    CHECK(psd_feasible(v * lam * v.adjoint()));
}

TEST_CASE("psd_feasible at zero shift implies nonnegative spectrum") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix a = random_hermitian(6, rng);
        if (psd_feasible(a, 0.0)) {
            const auto eig = herm_eig(a);
            CHECK(eig.eigenvalues.front() >= -1e-8 * a.max_abs());
        }
    }
    // Definitely hits the feasible branch at least once:
    const ComplexMatrix g = random_matrix(5, 5, rng);
    ComplexMatrix psd = g * g.adjoint() + ComplexMatrix::identity(5);
    REQUIRE(psd_feasible(psd, 0.0));
    CHECK(herm_eig(psd).eigenvalues.front() >= -1e-8 * psd.max_abs());
}

TEST_CASE("kron identities") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(kron(i2, i2).approx_equal(ComplexMatrix::identity(4), 1e-15));

    const ComplexMatrix zi = kron(pauli_z(), i2);
    const ComplexMatrix want = ComplexMatrix::diagonal(
        {cplx{1, 0}, cplx{1, 0}, cplx{-1, 0}, cplx{-1, 0}});
    CHECK(zi.approx_equal(want, 1e-15));

    Rng rng(17);
    const ComplexMatrix a = random_matrix(2, 2, rng);
    const ComplexMatrix b = random_matrix(2, 2, rng);
    const ComplexMatrix c = random_matrix(2, 2, rng);
    const ComplexMatrix d = random_matrix(2, 2, rng);
    CHECK((kron(a, b) * kron(c, d)).approx_equal(kron(a * c, b * d), 1e-12));
}
