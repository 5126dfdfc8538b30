#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qclip/complex_matrix.hpp"
#include "qclip/numerics.hpp"

namespace qclip::quantum {

// Full 2^n x 2^n density matrix.  Qubit 0 is the most significant bit of the
// basis-state index (leftmost Kronecker factor).
struct DensityOperator {
    ComplexMatrix mat;

    index_t dim() const { return mat.rows(); }

    // Validating factory for states arriving from the outside world.
    static DensityOperator checked(ComplexMatrix m);
};

enum class GateName { rx, ry, rz, h, x, z, cnot };

bool gate_takes_angle(GateName g);
std::string gate_name_string(GateName g);
GateName gate_name_from_string(const std::string& s);

struct GateParam {
    enum class Kind { none, fixed, trainable };
    Kind kind = Kind::none;
    double value = 0.0;   // fixed
    index_t index = 0;    // trainable slot

    static GateParam none() { return {}; }
    static GateParam fixed(double v) { return {Kind::fixed, v, 0}; }
    static GateParam trainable(index_t i) { return {Kind::trainable, 0.0, i}; }
};

struct GateSpec {
    GateName name = GateName::h;
    index_t target = 0;
    std::optional<index_t> control;  // cnot only
    GateParam param;
};

// Measurement (POVM): completeness sum_i M_i^dagger M_i = I is validated to
// 1e-8 max-entry at construction.
class Povm {
  public:
    static Povm computational(index_t qubits);
    // Coarse-grained projective measurement; groups must partition the basis.
    static Povm grouped(index_t qubits, const std::vector<std::vector<index_t>>& groups);
    // Contiguous coarse-graining by basis-state index, the default when only
    // an outcome count is given (larger groups come first).
    static Povm grouped_contiguous(index_t qubits, index_t outcomes);
    static Povm from_ops(std::vector<ComplexMatrix> ops, std::vector<std::string> labels = {});

    index_t outcomes() const { return ops_.size(); }
    index_t dim() const { return ops_.empty() ? 0 : ops_[0].rows(); }
    const std::vector<ComplexMatrix>& ops() const { return ops_; }
    // Effects E_i = M_i^dagger M_i (Hermitian, sum to I).
    const std::vector<ComplexMatrix>& effects() const { return effects_; }
    const std::vector<std::string>& labels() const { return labels_; }

  private:
    Povm() = default;
    void finalize();  // builds effects, checks completeness

    std::vector<ComplexMatrix> ops_;
    std::vector<ComplexMatrix> effects_;
    std::vector<std::string> labels_;
};

struct CircuitSpec {
    index_t qubits = 1;
    std::vector<GateSpec> gates;
    Povm povm = Povm::computational(1);
    std::vector<double> params;  // values for trainable slots

    index_t dim() const { return index_t{1} << qubits; }
    // Number of trainable slots referenced by the gate list (max index + 1).
    index_t trainable_count() const;
    void validate() const;

    // Binding returns a new value; a bound CircuitSpec is immutable.
    CircuitSpec with_params(std::vector<double> values) const;
};

// Ordered gate product as one dense unitary.
ComplexMatrix circuit_unitary(const CircuitSpec& c);

// U rho U^dagger.
DensityOperator apply_circuit(const CircuitSpec& c, const DensityOperator& rho);

// p_i = tr(M_i E(rho) M_i^dagger), clamped at -1e-10 and renormalized.
std::vector<double> measure_probs(const CircuitSpec& c, const DensityOperator& rho);

// Dual picture: A_i = U^dagger M_i^dagger M_i U, so p_i = tr(A_i rho).
std::vector<ComplexMatrix> heisenberg_observables(const CircuitSpec& c);

// Re tr(a b) for Hermitian a, b of equal shape.
double herm_trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Probabilities straight from precomputed observables (hot path for training
// and sampling; equals measure_probs on the same circuit).
std::vector<double> probs_from_observables(const std::vector<ComplexMatrix>& obs,
                                           const DensityOperator& rho);

// D = trace_norm(rho - sigma) / 2.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// d = sum_i |p_i - q_i| / 2.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

// Product state  (x) RY(x_j)|0><0|RY(x_j)^dagger.
DensityOperator angle_encode(const std::vector<double>& x, index_t qubits);

// |psi><psi| with psi a normalized complex Gaussian vector.
DensityOperator random_pure_state(index_t dim, std::uint64_t seed);

}  // namespace qclip::quantum
