#include "qclip/hybrid.hpp"

#include <cmath>

#include "qclip/rng.hpp"

namespace qclip::hybrid {

namespace {

index_t block_input_dim(const HybridModel::Block& b) {
    if (std::holds_alternative<classical::DenseNet>(b)) {
        return std::get<classical::DenseNet>(b).input_dim();
    }
    return std::get<QuantumBlock>(b).input_dim();
}

index_t block_output_dim(const HybridModel::Block& b) {
    if (std::holds_alternative<classical::DenseNet>(b)) {
        return std::get<classical::DenseNet>(b).output_dim();
    }
    return std::get<QuantumBlock>(b).output_dim();
}

std::vector<double> sample_input(index_t dim, Rng& rng) {
    // Feature-box points plus occasional wider excursions; any pair yields a
    // valid lower-bound ratio.
    std::vector<double> x(dim);
    const bool wide = rng.below(4) == 0;
    for (auto& v : x) {
        v = wide ? 2.0 * rng.normal() : rng.uniform(0.0, M_PI);
    }
    return x;
}

}  // namespace

std::string norm_tag_string(NormTag t) {
    switch (t) {
        case NormTag::euclidean_l1: return "l1";
        case NormTag::euclidean_l2: return "l2";
        case NormTag::euclidean_linf: return "linf";
        case NormTag::trace: return "trace";
        case NormTag::total_variation: return "tv";
    }
    return "?";
}

NormTag euclidean_tag(classical::Norm n) {
    switch (n) {
        case classical::Norm::l1: return NormTag::euclidean_l1;
        case classical::Norm::l2: return NormTag::euclidean_l2;
        case classical::Norm::linf: return NormTag::euclidean_linf;
    }
    return NormTag::euclidean_l2;
}

index_t HybridModel::input_dim() const {
    return blocks.empty() ? 0 : block_input_dim(blocks.front());
}

index_t HybridModel::output_dim() const {
    return blocks.empty() ? 0 : block_output_dim(blocks.back());
}

void HybridModel::validate() const {
    if (blocks.empty()) {
        throw InvalidConfig("hybrid model needs at least one block");
    }
    for (index_t i = 0; i < blocks.size(); ++i) {
        if (std::holds_alternative<classical::DenseNet>(blocks[i])) {
            std::get<classical::DenseNet>(blocks[i]).validate();
        } else {
            const auto& qb = std::get<QuantumBlock>(blocks[i]);
            if (qb.circuit.qubits != qb.qubits) {
                throw InvalidConfig("quantum block qubit count disagrees with its circuit");
            }
            qb.circuit.validate();
        }
        if (i > 0 && block_input_dim(blocks[i]) != block_output_dim(blocks[i - 1])) {
            throw DimensionMismatch("block " + std::to_string(i) +
                                    " input does not chain with the previous output");
        }
    }
}

QuantumBlockEval::QuantumBlockEval(const QuantumBlock& block)
    : qubits_(block.qubits), observables_(quantum::heisenberg_observables(block.circuit)) {}

std::vector<double> QuantumBlockEval::probs(const std::vector<double>& x) const {
    return quantum::probs_from_observables(observables_, quantum::angle_encode(x, qubits_));
}

std::vector<double> hybrid_forward(const HybridModel& m, const std::vector<double>& x) {
    m.validate();
    if (x.size() != m.input_dim()) {
        throw DimensionMismatch("hybrid input length mismatch");
    }
    std::vector<double> v = x;
    for (const auto& block : m.blocks) {
        if (std::holds_alternative<classical::DenseNet>(block)) {
            v = classical::forward(std::get<classical::DenseNet>(block), v);
        } else {
            const auto& qb = std::get<QuantumBlock>(block);
            v = quantum::measure_probs(qb.circuit, quantum::angle_encode(v, qb.qubits));
        }
    }
    return v;
}

double encoder_constant(index_t qubits, NormTag in_norm) {
    // Per qubit D = |sin(dtheta/2)| <= |dtheta|/2; trace distance is
    // subadditive over product states.
    const double d = static_cast<double>(qubits);
    switch (in_norm) {
        case NormTag::euclidean_l1: return 0.5;
        case NormTag::euclidean_l2: return std::sqrt(d) / 2.0;
        case NormTag::euclidean_linf: return d / 2.0;
        case NormTag::trace:
        case NormTag::total_variation:
            break;
    }
    throw UnsupportedEncoding("angle encoder takes a euclidean input norm");
}

HybridBoundReport hybrid_lip_bound(const HybridModel& m, classical::Norm norm) {
    m.validate();
    HybridBoundReport report;
    const NormTag vec_tag = euclidean_tag(norm);
    index_t n_classical = 0;
    index_t n_quantum = 0;
    for (const auto& block : m.blocks) {
        if (std::holds_alternative<classical::DenseNet>(block)) {
            const auto& net = std::get<classical::DenseNet>(block);
            ++n_classical;
            PerBlockEntry e;
            e.block_id = "f" + std::to_string(n_classical);
            e.in_norm = vec_tag;
            e.out_norm = vec_tag;
            if (norm == classical::Norm::l2) {
                try {
                    const auto r = classical::lip_sdp(net);
                    e.constant = r.bound;
                    e.method = "sdp";
                } catch (const UseProductBound&) {
                    const auto r = classical::lip_product(net, norm);
                    e.constant = r.bound;
                    e.method = "product";
                }
            } else {
                // The LipSDP certificate is native to l2 only.
                const auto r = classical::lip_product(net, norm);
                e.constant = r.bound;
                e.method = "product";
            }
            report.per_block.push_back(e);
        } else {
            const auto& qb = std::get<QuantumBlock>(block);
            ++n_quantum;
            const std::string id = "q" + std::to_string(n_quantum);

            PerBlockEntry enc;
            enc.block_id = id + ".encoder";
            enc.constant = encoder_constant(qb.qubits, vec_tag);
            enc.method = "encoder";
            enc.in_norm = vec_tag;
            enc.out_norm = NormTag::trace;
            report.per_block.push_back(enc);

            PerBlockEntry circ;
            circ.block_id = id + ".circuit";
            circ.constant = qlip::lipschitz_exact(qb.circuit).k_star;
            circ.method = "exact";
            circ.in_norm = NormTag::trace;
            circ.out_norm = NormTag::total_variation;
            report.per_block.push_back(circ);

            // ||p - q||_1 = 2 TV dominates every vector norm of p - q.
            PerBlockEntry readout;
            readout.block_id = id + ".readout";
            readout.constant = 2.0;
            readout.method = "norm-conversion";
            readout.in_norm = NormTag::total_variation;
            readout.out_norm = vec_tag;
            report.per_block.push_back(readout);
        }
    }
    report.total = 1.0;
    for (const auto& e : report.per_block) {
        report.total *= e.constant;
    }
    report.lower_witness = hybrid_lip_lower_norm(m, 200, 0, norm);
    if (report.lower_witness > report.total + 1e-8) {
        throw NumericFailure("sampled lower bound exceeds the certified total");
    }
    return report;
}

double hybrid_lip_lower_norm(const HybridModel& m, index_t samples, std::uint64_t seed,
                             classical::Norm norm) {
    m.validate();
    if (samples < 1) {
        throw InvalidConfig("hybrid_lip_lower needs at least one sample");
    }
    const index_t dim = m.input_dim();
    double best = 0.0;
    for (index_t k = 0; k < samples; ++k) {
        Rng rng = Rng::stream(seed, k);
        std::vector<double> x1 = sample_input(dim, rng);
        std::vector<double> x2;
        if (rng.below(2) == 0) {
            // nearby pair probes the local derivative
            x2 = x1;
            for (auto& v : x2) {
                v += 1e-3 * rng.normal();
            }
        } else {
            x2 = sample_input(dim, rng);
        }
        std::vector<double> din(dim);
        for (index_t i = 0; i < dim; ++i) {
            din[i] = x1[i] - x2[i];
        }
        const double denom = classical::vector_norm(din, norm);
        if (denom < 1e-12) {
            continue;
        }
        const auto f1 = hybrid_forward(m, x1);
        const auto f2 = hybrid_forward(m, x2);
        std::vector<double> dout(f1.size());
        for (index_t i = 0; i < f1.size(); ++i) {
            dout[i] = f1[i] - f2[i];
        }
        best = std::max(best, classical::vector_norm(dout, norm) / denom);
    }
    return best;
}

}  // namespace qclip::hybrid
