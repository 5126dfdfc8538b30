#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qclip/quantum.hpp"

namespace qclip::qlip {

enum class Method { exact, subgradient, sampling };

std::string method_string(Method m);

// K* of a circuit together with the state pair that attains (exact,
// subgradient) or approaches (sampling) it.  The witness pair always
// reproduces k_star as a TV / trace-distance ratio.
struct QuantumBoundReport {
    double k_star = 0.0;
    Method method = Method::exact;
    std::optional<std::pair<quantum::DensityOperator, quantum::DensityOperator>> witness;
    std::optional<std::vector<int>> sign_pattern;  // +1/-1 per outcome
};

// Exact K* by enumerating outcome sign patterns: K* is half the largest
// spectral spread of sum_i s_i A_i over s in {+-1}^outcomes (first component
// pinned to +1), with A_i the Heisenberg observables.  Outcome count is
// capped at 16.
QuantumBoundReport lipschitz_exact(const quantum::CircuitSpec& c);

// Projected subgradient ascent of sum_i |tr(A_i Delta)| over traceless
// Hermitian Delta with trace norm 1.  Best-effort lower estimate of the
// exact optimum; never exceeds it beyond round-off.
QuantumBoundReport lipschitz_subgradient(const quantum::CircuitSpec& c, index_t iters = 500,
                                         std::uint64_t seed = 0);

// Best TV / trace-distance ratio over `pairs` random pure-state pairs.
QuantumBoundReport lipschitz_sampling(const quantum::CircuitSpec& c, index_t pairs,
                                      std::uint64_t seed);

}  // namespace qclip::qlip
