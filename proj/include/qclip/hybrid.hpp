#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qclip/classical.hpp"
#include "qclip/qlip.hpp"

namespace qclip::hybrid {

// Every certified constant carries one input and one output space; bounds
// compose only when the tags chain.
enum class NormTag { euclidean_l1, euclidean_l2, euclidean_linf, trace, total_variation };

std::string norm_tag_string(NormTag t);
NormTag euclidean_tag(classical::Norm n);

// Quantum stage: RY angle encoder feeding a variational circuit whose POVM
// outcomes (usually grouped) form the classical output vector.
struct QuantumBlock {
    index_t qubits = 1;
    quantum::CircuitSpec circuit;

    index_t input_dim() const { return qubits; }
    index_t output_dim() const { return circuit.povm.outcomes(); }
};

// Alternation f_1, q_1, f_2, ..., stored as a flat block list.
struct HybridModel {
    using Block = std::variant<classical::DenseNet, QuantumBlock>;
    std::vector<Block> blocks;

    index_t input_dim() const;
    index_t output_dim() const;
    void validate() const;  // dimension chaining across the alternation
};

// Cached per-parameter-set evaluator: the Heisenberg observables depend only
// on the circuit parameters, so encoder-side work reduces to one encode and
// a handful of traces.
class QuantumBlockEval {
  public:
    explicit QuantumBlockEval(const QuantumBlock& block);
    std::vector<double> probs(const std::vector<double>& x) const;
    index_t qubits() const { return qubits_; }
    const std::vector<ComplexMatrix>& observables() const { return observables_; }

  private:
    index_t qubits_;
    std::vector<ComplexMatrix> observables_;
};

std::vector<double> hybrid_forward(const HybridModel& m, const std::vector<double>& x);

// Certified constant of the RY angle encoder from the given euclidean input
// norm into trace distance: 1/2 for l1, sqrt(d)/2 for l2, d/2 for linf.
double encoder_constant(index_t qubits, NormTag in_norm);

struct PerBlockEntry {
    std::string block_id;  // "f1", "q1.encoder", "q1.circuit", "q1.readout"
    double constant = 1.0;
    std::string method;  // "sdp" | "product" | "exact" | "encoder" | "norm-conversion"
    NormTag in_norm = NormTag::euclidean_l2;
    NormTag out_norm = NormTag::euclidean_l2;
};

struct HybridBoundReport {
    double total = 1.0;
    std::vector<PerBlockEntry> per_block;  // conversion hops included
    double lower_witness = 0.0;            // sampled, never above total
};

// Composed certified bound: classical blocks via LipSDP (product fallback for
// activation-free segments and non-l2 norms), quantum blocks via encoder
// constant x exact circuit K* x TV-to-vector-norm conversion.  All hops and
// conversion factors appear in per_block; total is their plain product.
HybridBoundReport hybrid_lip_bound(const HybridModel& m, classical::Norm norm = classical::Norm::l2);

// Max sampled ratio ||f(x1)-f(x2)|| / ||x1-x2|| in the given vector norm.
double hybrid_lip_lower_norm(const HybridModel& m, index_t samples, std::uint64_t seed,
                             classical::Norm norm);

inline double hybrid_lip_lower(const HybridModel& m, index_t samples, std::uint64_t seed) {
    return hybrid_lip_lower_norm(m, samples, seed, classical::Norm::l2);
}

}  // namespace qclip::hybrid
