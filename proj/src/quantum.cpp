#include "qclip/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "qclip/kernels.hpp"
#include "qclip/rng.hpp"

namespace qclip::quantum {

namespace {

constexpr index_t kMaxQubits = 6;
constexpr double kProbClamp = -1e-10;
constexpr double kCompletenessTol = 1e-8;

ComplexMatrix single_qubit_matrix(GateName g, double angle) {
    ComplexMatrix m(2, 2);
    const double half = angle / 2.0;
    switch (g) {
        case GateName::rx:
            m(0, 0) = std::cos(half);
            m(0, 1) = cplx{0.0, -std::sin(half)};
            m(1, 0) = cplx{0.0, -std::sin(half)};
            m(1, 1) = std::cos(half);
            break;
        case GateName::ry:
            m(0, 0) = std::cos(half);
            m(0, 1) = -std::sin(half);
            m(1, 0) = std::sin(half);
            m(1, 1) = std::cos(half);
            break;
        case GateName::rz:
            m(0, 0) = std::exp(cplx{0.0, -half});
            m(1, 1) = std::exp(cplx{0.0, half});
            break;
        case GateName::h:
            m(0, 0) = m(0, 1) = m(1, 0) = M_SQRT1_2;
            m(1, 1) = -M_SQRT1_2;
            break;
        case GateName::x:
            m(0, 1) = m(1, 0) = 1.0;
            break;
        case GateName::z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        case GateName::cnot:
            throw InvalidOperator("cnot is not a single-qubit gate");
    }
    return m;
}

// Qubit j occupies bit (qubits-1-j) of the basis index.
ComplexMatrix embed_single(index_t qubits, index_t target, const ComplexMatrix& g) {
    ComplexMatrix out = target == 0 ? g : ComplexMatrix::identity(index_t{1} << target);
    if (target != 0) {
        out = kron(out, g);
    }
    const index_t rest = qubits - target - 1;
    if (rest > 0) {
        out = kron(out, ComplexMatrix::identity(index_t{1} << rest));
    }
    return out;
}

ComplexMatrix cnot_matrix(index_t qubits, index_t control, index_t target) {
    const index_t dim = index_t{1} << qubits;
    const index_t cbit = index_t{1} << (qubits - 1 - control);
    const index_t tbit = index_t{1} << (qubits - 1 - target);
    ComplexMatrix m(dim, dim);
    for (index_t b = 0; b < dim; ++b) {
        const index_t dst = (b & cbit) ? (b ^ tbit) : b;
        m(dst, b) = 1.0;
    }
    return m;
}

double resolve_angle(const GateSpec& gate, const std::vector<double>& params) {
    switch (gate.param.kind) {
        case GateParam::Kind::fixed:
            return gate.param.value;
        case GateParam::Kind::trainable:
            if (gate.param.index >= params.size()) {
                throw UnboundParameter("trainable parameter slot " +
                                       std::to_string(gate.param.index) + " is unbound");
            }
            return params[gate.param.index];
        case GateParam::Kind::none:
            throw UnboundParameter("rotation gate missing its angle parameter");
    }
    return 0.0;
}

}  // namespace

bool gate_takes_angle(GateName g) {
    return g == GateName::rx || g == GateName::ry || g == GateName::rz;
}

std::string gate_name_string(GateName g) {
    switch (g) {
        case GateName::rx: return "rx";
        case GateName::ry: return "ry";
        case GateName::rz: return "rz";
        case GateName::h: return "h";
        case GateName::x: return "x";
        case GateName::z: return "z";
        case GateName::cnot: return "cnot";
    }
    return "?";
}

GateName gate_name_from_string(const std::string& s) {
    if (s == "rx") return GateName::rx;
    if (s == "ry") return GateName::ry;
    if (s == "rz") return GateName::rz;
    if (s == "h") return GateName::h;
    if (s == "x") return GateName::x;
    if (s == "z") return GateName::z;
    if (s == "cnot") return GateName::cnot;
    throw InvalidConfig("unknown gate name: " + s);
}

DensityOperator DensityOperator::checked(ComplexMatrix m) {
    if (m.rows() != m.cols() || m.empty()) {
        throw InvalidOperator("density operator must be square and nonempty");
    }
    if (!m.is_hermitian(1e-9)) {
        throw InvalidOperator("density operator is not Hermitian");
    }
    if (std::abs(m.trace() - cplx{1.0, 0.0}) > 1e-9) {
        throw InvalidOperator("density operator trace is not 1");
    }
    const auto eig = numerics::herm_eig(m);
    if (eig.eigenvalues.front() < -1e-9) {
        throw InvalidOperator("density operator has a negative eigenvalue");
    }
    return DensityOperator{std::move(m)};
}

void Povm::finalize() {
    if (ops_.empty()) {
        throw InvalidPovm("POVM needs at least one operator");
    }
    const index_t d = ops_[0].rows();
    effects_.clear();
    effects_.reserve(ops_.size());
    ComplexMatrix sum(d, d);
    for (const auto& m : ops_) {
        if (m.rows() != d || m.cols() != d) {
            throw InvalidPovm("POVM operators must share one square dimension");
        }
        ComplexMatrix e = m.adjoint() * m;
        sum = sum + e;
        effects_.push_back(std::move(e));
    }
    if (!(sum - ComplexMatrix::identity(d)).all_finite() ||
        (sum - ComplexMatrix::identity(d)).max_abs() > kCompletenessTol) {
        throw InvalidPovm("POVM completeness violated: sum M_i^dagger M_i != I");
    }
    if (labels_.size() != ops_.size()) {
        labels_.resize(ops_.size());
        for (index_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i].empty()) {
                labels_[i] = "m" + std::to_string(i);
            }
        }
    }
}

Povm Povm::computational(index_t qubits) {
    const index_t dim = index_t{1} << qubits;
    Povm p;
    for (index_t i = 0; i < dim; ++i) {
        ComplexMatrix proj(dim, dim);
        proj(i, i) = 1.0;
        p.ops_.push_back(std::move(proj));
        std::string bits(qubits, '0');
        for (index_t q = 0; q < qubits; ++q) {
            if (i & (index_t{1} << (qubits - 1 - q))) {
                bits[q] = '1';
            }
        }
        p.labels_.push_back(bits);
    }
    p.finalize();
    return p;
}

Povm Povm::grouped(index_t qubits, const std::vector<std::vector<index_t>>& groups) {
    const index_t dim = index_t{1} << qubits;
    std::vector<bool> seen(dim, false);
    Povm p;
    for (index_t g = 0; g < groups.size(); ++g) {
        ComplexMatrix proj(dim, dim);
        for (index_t idx : groups[g]) {
            if (idx >= dim) {
                throw InvalidPovm("group index out of range");
            }
            if (seen[idx]) {
                throw InvalidPovm("groups must be disjoint");
            }
            seen[idx] = true;
            proj(idx, idx) = 1.0;
        }
        p.ops_.push_back(std::move(proj));
        p.labels_.push_back("g" + std::to_string(g));
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw InvalidPovm("groups must cover every basis state");
    }
    p.finalize();
    return p;
}

Povm Povm::grouped_contiguous(index_t qubits, index_t outcomes) {
    const index_t dim = index_t{1} << qubits;
    if (outcomes == 0 || outcomes > dim) {
        throw InvalidPovm("outcome count must be in [1, 2^qubits]");
    }
    std::vector<std::vector<index_t>> groups(outcomes);
    const index_t base = dim / outcomes;
    const index_t extra = dim % outcomes;
    index_t next = 0;
    for (index_t g = 0; g < outcomes; ++g) {
        const index_t size = base + (g < extra ? 1 : 0);
        for (index_t k = 0; k < size; ++k) {
            groups[g].push_back(next++);
        }
    }
    return grouped(qubits, groups);
}

Povm Povm::from_ops(std::vector<ComplexMatrix> ops, std::vector<std::string> labels) {
    Povm p;
    p.ops_ = std::move(ops);
    p.labels_ = std::move(labels);
    p.finalize();
    return p;
}

index_t CircuitSpec::trainable_count() const {
    index_t n = 0;
    for (const auto& g : gates) {
        if (g.param.kind == GateParam::Kind::trainable) {
            n = std::max(n, g.param.index + 1);
        }
    }
    return n;
}

void CircuitSpec::validate() const {
    if (qubits == 0 || qubits > kMaxQubits) {
        throw InvalidConfig("qubit count must be between 1 and " + std::to_string(kMaxQubits));
    }
    for (const auto& g : gates) {
        if (g.target >= qubits) {
            throw InvalidConfig("gate target out of range");
        }
        if (g.name == GateName::cnot) {
            if (!g.control.has_value()) {
                throw InvalidConfig("cnot needs a control qubit");
            }
            if (*g.control >= qubits || *g.control == g.target) {
                throw InvalidConfig("cnot control must be a distinct in-range qubit");
            }
        } else if (g.control.has_value()) {
            throw InvalidConfig("only cnot takes a control qubit");
        }
        if (gate_takes_angle(g.name)) {
            if (g.param.kind == GateParam::Kind::none) {
                throw InvalidConfig("rotation gate needs a param");
            }
        } else if (g.param.kind != GateParam::Kind::none) {
            throw UnsupportedGateParam("gate " + gate_name_string(g.name) +
                                       " does not take a parameter");
        }
    }
    if (povm.dim() != dim()) {
        throw InvalidPovm("POVM dimension does not match circuit");
    }
}

CircuitSpec CircuitSpec::with_params(std::vector<double> values) const {
    CircuitSpec out = *this;
    out.params = std::move(values);
    return out;
}

ComplexMatrix circuit_unitary(const CircuitSpec& c) {
    c.validate();
    ComplexMatrix u = ComplexMatrix::identity(c.dim());
    for (const auto& g : c.gates) {
        ComplexMatrix gate;
        if (g.name == GateName::cnot) {
            gate = cnot_matrix(c.qubits, *g.control, g.target);
        } else if (gate_takes_angle(g.name)) {
            gate = embed_single(c.qubits, g.target,
                                single_qubit_matrix(g.name, resolve_angle(g, c.params)));
        } else {
            gate = embed_single(c.qubits, g.target, single_qubit_matrix(g.name, 0.0));
        }
        u = gate * u;  // later gates act on the left
    }
    return u;
}

DensityOperator apply_circuit(const CircuitSpec& c, const DensityOperator& rho) {
    if (rho.dim() != c.dim()) {
        throw DimensionMismatch("state dimension does not match circuit");
    }
    const ComplexMatrix u = circuit_unitary(c);
    return DensityOperator{u * rho.mat * u.adjoint()};
}

double herm_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("trace product shape mismatch");
    }
    const auto& k = kernels::active();
    // tr(a b) = sum_j conj(b_row_j) . a_row_j for Hermitian b.
    double s = 0.0;
    for (index_t j = 0; j < a.rows(); ++j) {
        s += k.cdotc(a.cols(), b.row_ptr(j), a.row_ptr(j)).real();
    }
    return s;
}

std::vector<double> probs_from_observables(const std::vector<ComplexMatrix>& obs,
                                           const DensityOperator& rho) {
    std::vector<double> p(obs.size());
    double sum = 0.0;
    for (index_t i = 0; i < obs.size(); ++i) {
        double v = herm_trace_product(obs[i], rho.mat);
        if (v < 0.0) {
            if (v < kProbClamp) {
                throw InvalidPovm("probability " + std::to_string(v) +
                                  " below round-off tolerance");
            }
            v = 0.0;
        }
        p[i] = v;
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        throw InvalidPovm("probabilities sum to " + std::to_string(sum));
    }
    for (double& v : p) {
        v /= sum;
    }
    return p;
}

std::vector<double> measure_probs(const CircuitSpec& c, const DensityOperator& rho) {
    const DensityOperator evolved = apply_circuit(c, rho);
    std::vector<double> p(c.povm.outcomes());
    double sum = 0.0;
    for (index_t i = 0; i < p.size(); ++i) {
        double v = herm_trace_product(c.povm.effects()[i], evolved.mat);
        if (v < 0.0) {
            if (v < kProbClamp) {
                throw InvalidPovm("probability " + std::to_string(v) +
                                  " below round-off tolerance");
            }
            v = 0.0;
        }
        p[i] = v;
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        throw InvalidPovm("probabilities sum to " + std::to_string(sum));
    }
    for (double& v : p) {
        v /= sum;
    }
    return p;
}

std::vector<ComplexMatrix> heisenberg_observables(const CircuitSpec& c) {
    const ComplexMatrix u = circuit_unitary(c);
    const ComplexMatrix udag = u.adjoint();
    std::vector<ComplexMatrix> obs;
    obs.reserve(c.povm.outcomes());
    for (const auto& e : c.povm.effects()) {
        ComplexMatrix a = udag * e * u;
        obs.push_back((a + a.adjoint()) * cplx{0.5, 0.0});
    }
    return obs;
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionMismatch("trace_distance: dimension mismatch");
    }
    return 0.5 * numerics::trace_norm(rho.mat - sigma.mat);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) {
        throw DimensionMismatch("total_variation: length mismatch");
    }
    double sp = 0.0;
    double sq = 0.0;
    double d = 0.0;
    for (index_t i = 0; i < p.size(); ++i) {
        sp += p[i];
        sq += q[i];
        d += std::abs(p[i] - q[i]);
    }
    if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6) {
        throw Error("total_variation: inputs must sum to 1");
    }
    return 0.5 * d;
}

DensityOperator angle_encode(const std::vector<double>& x, index_t qubits) {
    if (x.size() != qubits) {
        throw DimensionMismatch("angle_encode: need one angle per qubit");
    }
    std::vector<cplx> psi{cplx{1.0, 0.0}};
    for (double angle : x) {
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        std::vector<cplx> next(psi.size() * 2);
        for (index_t i = 0; i < psi.size(); ++i) {
            next[2 * i] = psi[i] * c;
            next[2 * i + 1] = psi[i] * s;
        }
        psi = std::move(next);
    }
    return DensityOperator{outer(psi, psi)};
}

DensityOperator random_pure_state(index_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> psi(dim);
    double norm2 = 0.0;
    for (auto& z : psi) {
        z = {rng.normal(), rng.normal()};
        norm2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : psi) {
        z *= inv;
    }
    return DensityOperator{outer(psi, psi)};
}

}  // namespace qclip::quantum
