#include <doctest.h>

#include <cmath>

#include "qclip/qlip.hpp"
#include "test_util.hpp"

using namespace qclip;
using namespace qclip::qlip;
using quantum::CircuitSpec;
using quantum::Povm;

namespace {

CircuitSpec identity_1q() {
    CircuitSpec c;
    c.qubits = 1;
    c.povm = Povm::computational(1);
    return c;
}

CircuitSpec single_outcome_1q() {
    CircuitSpec c;
    c.qubits = 1;
    c.povm = Povm::from_ops({ComplexMatrix::identity(2)});
    return c;
}

}  // namespace

TEST_CASE("exact K* of the identity circuit is 1") {
    const auto r = lipschitz_exact(identity_1q());
    CHECK(r.k_star == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(r.sign_pattern.has_value());
    CHECK((*r.sign_pattern)[0] == 1);
    CHECK((*r.sign_pattern)[1] == -1);
    REQUIRE(r.witness.has_value());
    const auto& [rho, sigma] = *r.witness;
    const double d = quantum::trace_distance(rho, sigma);
    const double tv = quantum::total_variation(quantum::measure_probs(identity_1q(), rho),
                                               quantum::measure_probs(identity_1q(), sigma));
    CHECK(tv / d == doctest::Approx(r.k_star).epsilon(1e-8));
}

TEST_CASE("single-outcome POVM has K* = 0 under every method") {
    const auto c = single_outcome_1q();
    CHECK(lipschitz_exact(c).k_star == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lipschitz_subgradient(c, 100, 3).k_star <= 1e-9);
    CHECK(lipschitz_sampling(c, 50, 3).k_star == doctest::Approx(0.0));
}

TEST_CASE("subgradient reaches the identity-circuit optimum") {
    const auto r = lipschitz_subgradient(identity_1q(), 500, 0);
    CHECK(r.k_star == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sampling approaches K* = 1 for the identity circuit") {
    const auto r = lipschitz_sampling(identity_1q(), 10000, 0);
    CHECK(r.k_star >= 0.95);
    CHECK(r.k_star <= 1.0 + 1e-9);
}

TEST_CASE("outcome cap rejects wide POVMs") {
    CircuitSpec c;
    c.qubits = 5;
    c.povm = Povm::computational(5);  // 32 outcomes
    CHECK_THROWS_AS(lipschitz_exact(c), OutcomeLimitExceeded);
}

TEST_CASE("sign pattern symmetry: s and -s give the same spread") {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = testutil::random_circuit(2, 6, 4, rng);
        const auto obs = quantum::heisenberg_observables(c);
        Rng pick(trial);
        std::vector<int> signs(obs.size());
        for (auto& s : signs) {
            s = pick.below(2) ? 1 : -1;
        }
        ComplexMatrix h_pos(c.dim(), c.dim());
        ComplexMatrix h_neg(c.dim(), c.dim());
        for (index_t i = 0; i < obs.size(); ++i) {
            h_pos = signs[i] > 0 ? h_pos + obs[i] : h_pos - obs[i];
            h_neg = signs[i] > 0 ? h_neg - obs[i] : h_neg + obs[i];
        }
        const auto ep = numerics::herm_eig(h_pos);
        const auto en = numerics::herm_eig(h_neg);
        const double spread_p = ep.eigenvalues.back() - ep.eigenvalues.front();
        const double spread_n = en.eigenvalues.back() - en.eigenvalues.front();
        CHECK(spread_p == doctest::Approx(spread_n).epsilon(1e-10));
    }
}

TEST_CASE("cross-oracle agreement on random 2-qubit circuits") {
    Rng rng(101);
    for (int trial = 0; trial < 8; ++trial) {
        const auto c = testutil::random_circuit(2, 8, 4, rng);
        const auto exact = lipschitz_exact(c);
        const auto sub = lipschitz_subgradient(c, 500, 17);
        const auto samp = lipschitz_sampling(c, 2000, 17);
        CHECK(sub.k_star <= exact.k_star + 1e-6);
        CHECK(exact.k_star <= sub.k_star + 1e-3);
        CHECK(samp.k_star <= exact.k_star + 1e-9);
        CHECK(exact.k_star <= 1.0 + 1e-9);
    }
}

TEST_CASE("subgradient matches exact closely on a fixed 2-qubit circuit") {
    Rng rng(555);
    const auto c = testutil::random_circuit(2, 8, 4, rng);
    const auto exact = lipschitz_exact(c);
    const auto sub = lipschitz_subgradient(c, 4000, 9);
    CHECK(sub.k_star == doctest::Approx(exact.k_star).epsilon(1e-5));
}

TEST_CASE("sampling never exceeds the exact bound") {
    Rng rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        const index_t qubits = 1 + rng.below(3);
        const auto c =
            testutil::random_circuit(qubits, 5, index_t{1} << std::min<index_t>(qubits, 2), rng);
        const auto exact = lipschitz_exact(c);
        const auto samp = lipschitz_sampling(c, 200, trial);
        CHECK(samp.k_star <= exact.k_star + 1e-9);
    }
}

TEST_CASE("oracles are deterministic per seed") {
    Rng rng(404);
    const auto c = testutil::random_circuit(2, 6, 4, rng);
    const auto s1 = lipschitz_sampling(c, 500, 42);
    const auto s2 = lipschitz_sampling(c, 500, 42);
    CHECK(s1.k_star == s2.k_star);
    const auto g1 = lipschitz_subgradient(c, 200, 42);
    const auto g2 = lipschitz_subgradient(c, 200, 42);
    CHECK(g1.k_star == g2.k_star);
}

TEST_CASE("sandwich property on random circuits") {
    Rng rng(88);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = testutil::random_circuit(3, 10, 4, rng);
        const auto exact = lipschitz_exact(c);
        const auto sub = lipschitz_subgradient(c, 500, 1);
        const auto samp = lipschitz_sampling(c, 1000, 1);
        CHECK(samp.k_star <= sub.k_star + 1e-6);
        CHECK(sub.k_star <= exact.k_star + 2e-6);
    }
}
