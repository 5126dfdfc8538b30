#include "qclip/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "qclip/rng.hpp"

namespace qclip::train {

namespace {

using classical::DenseNet;
using hybrid::HybridModel;
using hybrid::QuantumBlock;
using hybrid::QuantumBlockEval;

constexpr double kProbFloor = 1e-9;

bool ends_with_quantum(const HybridModel& m) {
    return std::holds_alternative<QuantumBlock>(m.blocks.back());
}

// Output-layer loss and gradient: probabilities feed cross-entropy directly,
// logits go through softmax first.
double output_loss(const std::vector<double>& out, index_t target, bool probabilities) {
    if (probabilities) {
        return -std::log(std::max(out[target], kProbFloor));
    }
    double mx = out[0];
    for (double v : out) {
        mx = std::max(mx, v);
    }
    double z = 0.0;
    for (double v : out) {
        z += std::exp(v - mx);
    }
    return -(out[target] - mx - std::log(z));
}

std::vector<double> output_loss_grad(const std::vector<double>& out, index_t target,
                                     bool probabilities) {
    std::vector<double> g(out.size(), 0.0);
    if (probabilities) {
        g[target] = -1.0 / std::max(out[target], kProbFloor);
        return g;
    }
    double mx = out[0];
    for (double v : out) {
        mx = std::max(mx, v);
    }
    double z = 0.0;
    for (double v : out) {
        z += std::exp(v - mx);
    }
    for (index_t i = 0; i < out.size(); ++i) {
        g[i] = std::exp(out[i] - mx) / z - (i == target ? 1.0 : 0.0);
    }
    return g;
}

// Per-batch cache: the Heisenberg observables of the live circuit and of one
// +-pi/2 shifted copy per trainable gate occurrence.
struct QuantumWorkspace {
    QuantumBlockEval eval;
    struct Shift {
        index_t slot;
        QuantumBlockEval plus;
        QuantumBlockEval minus;
    };
    std::vector<Shift> shifts;

    explicit QuantumWorkspace(const QuantumBlock& qb, bool with_shifts) : eval(qb) {
        if (!with_shifts) {
            return;
        }
        for (index_t g = 0; g < qb.circuit.gates.size(); ++g) {
            const auto& gate = qb.circuit.gates[g];
            if (gate.param.kind != quantum::GateParam::Kind::trainable) {
                continue;
            }
            if (!quantum::gate_takes_angle(gate.name)) {
                throw UnsupportedGateParam("trainable slot on non-rotation gate");
            }
            const double theta = qb.circuit.params.at(gate.param.index);
            QuantumBlock plus_qb = qb;
            plus_qb.circuit.gates[g].param = quantum::GateParam::fixed(theta + M_PI_2);
            QuantumBlock minus_qb = qb;
            minus_qb.circuit.gates[g].param = quantum::GateParam::fixed(theta - M_PI_2);
            shifts.push_back(
                {gate.param.index, QuantumBlockEval(plus_qb), QuantumBlockEval(minus_qb)});
        }
    }
};

struct BlockGrads {
    std::vector<RealMatrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
    std::vector<double> theta_grads;
};

struct SampleGrads {
    std::vector<BlockGrads> blocks;
    std::vector<double> input_grad;
    double loss = 0.0;
};

std::vector<std::vector<double>> forward_block_inputs(const HybridModel& m,
                                                      const std::vector<double>& x,
                                                      std::vector<double>& out) {
    std::vector<std::vector<double>> inputs;
    inputs.reserve(m.blocks.size());
    std::vector<double> v = x;
    for (const auto& block : m.blocks) {
        inputs.push_back(v);
        if (std::holds_alternative<DenseNet>(block)) {
            v = classical::forward(std::get<DenseNet>(block), v);
        } else {
            const auto& qb = std::get<QuantumBlock>(block);
            v = quantum::measure_probs(qb.circuit, quantum::angle_encode(v, qb.qubits));
        }
    }
    out = std::move(v);
    return inputs;
}

// Full reverse sweep.  `workspaces[b]` must be built for every quantum block
// when with_theta is set; encoder gradients always use the unshifted
// observables.
SampleGrads backward_sample(const HybridModel& m,
                            const std::vector<const QuantumWorkspace*>& workspaces,
                            const std::vector<double>& x, index_t target, bool with_theta) {
    SampleGrads grads;
    grads.blocks.resize(m.blocks.size());

    std::vector<double> out;
    const auto inputs = forward_block_inputs(m, x, out);
    const bool probs = ends_with_quantum(m);
    grads.loss = output_loss(out, target, probs);

    std::vector<double> upstream = output_loss_grad(out, target, probs);
    for (index_t bi = m.blocks.size(); bi-- > 0;) {
        const auto& block = m.blocks[bi];
        if (std::holds_alternative<DenseNet>(block)) {
            const auto& net = std::get<DenseNet>(block);
            DenseGradients dg = dense_backward(net, inputs[bi], upstream);
            grads.blocks[bi].weight_grads = std::move(dg.weight_grads);
            grads.blocks[bi].bias_grads = std::move(dg.bias_grads);
            upstream = std::move(dg.input_grad);
        } else {
            const auto& qb = std::get<QuantumBlock>(block);
            const QuantumWorkspace* ws = workspaces[bi];
            const auto& angles = inputs[bi];

            if (with_theta) {
                std::vector<double> dtheta(qb.circuit.params.size(), 0.0);
                const auto rho = quantum::angle_encode(angles, qb.qubits);
                for (const auto& shift : ws->shifts) {
                    const auto p_plus = quantum::probs_from_observables(
                        shift.plus.observables(), rho);
                    const auto p_minus = quantum::probs_from_observables(
                        shift.minus.observables(), rho);
                    double g = 0.0;
                    for (index_t i = 0; i < upstream.size(); ++i) {
                        g += upstream[i] * 0.5 * (p_plus[i] - p_minus[i]);
                    }
                    dtheta[shift.slot] += g;
                }
                grads.blocks[bi].theta_grads = std::move(dtheta);
            }

            // Encoder angles are RY parameters, so the shift rule is exact.
            std::vector<double> dx(angles.size(), 0.0);
            for (index_t k = 0; k < angles.size(); ++k) {
                std::vector<double> shifted = angles;
                shifted[k] = angles[k] + M_PI_2;
                const auto p_plus = ws->eval.probs(shifted);
                shifted[k] = angles[k] - M_PI_2;
                const auto p_minus = ws->eval.probs(shifted);
                for (index_t i = 0; i < upstream.size(); ++i) {
                    dx[k] += upstream[i] * 0.5 * (p_plus[i] - p_minus[i]);
                }
            }
            upstream = std::move(dx);
        }
    }
    grads.input_grad = std::move(upstream);
    return grads;
}

std::vector<const QuantumWorkspace*> workspace_pointers(
    const std::vector<std::unique_ptr<QuantumWorkspace>>& owned) {
    std::vector<const QuantumWorkspace*> ptrs(owned.size(), nullptr);
    for (index_t i = 0; i < owned.size(); ++i) {
        ptrs[i] = owned[i].get();
    }
    return ptrs;
}

std::vector<std::unique_ptr<QuantumWorkspace>> build_workspaces(const HybridModel& m,
                                                                bool with_shifts) {
    std::vector<std::unique_ptr<QuantumWorkspace>> ws(m.blocks.size());
    for (index_t i = 0; i < m.blocks.size(); ++i) {
        if (std::holds_alternative<QuantumBlock>(m.blocks[i])) {
            ws[i] = std::make_unique<QuantumWorkspace>(std::get<QuantumBlock>(m.blocks[i]),
                                                       with_shifts);
        }
    }
    return ws;
}

// Gradient of the squared induced norm with the norm-attaining direction
// held fixed.
RealMatrix penalty_gradient(const RealMatrix& w, classical::Norm norm) {
    RealMatrix g(w.rows(), w.cols());
    switch (norm) {
        case classical::Norm::l2: {
            // 5 power-iteration steps for the top singular pair.
            Rng rng(0x9d2c5680ULL);
            std::vector<double> v(w.cols());
            double nv = 0.0;
            for (auto& z : v) {
                z = rng.normal();
                nv += z * z;
            }
            nv = std::sqrt(nv);
            for (auto& z : v) {
                z /= nv;
            }
            for (int it = 0; it < 5; ++it) {
                auto u = w.apply(v);
                auto vv = w.apply_transpose(u);
                double n = 0.0;
                for (double z : vv) {
                    n += z * z;
                }
                n = std::sqrt(n);
                if (n < 1e-300) {
                    return g;  // zero matrix
                }
                for (index_t i = 0; i < vv.size(); ++i) {
                    v[i] = vv[i] / n;
                }
            }
            auto wv = w.apply(v);
            double sigma = 0.0;
            for (double z : wv) {
                sigma += z * z;
            }
            sigma = std::sqrt(sigma);
            if (sigma < 1e-300) {
                return g;
            }
            // d(sigma^2)/dW = 2 sigma u v^T with u = Wv / sigma
            for (index_t i = 0; i < w.rows(); ++i) {
                for (index_t j = 0; j < w.cols(); ++j) {
                    g(i, j) = 2.0 * wv[i] * v[j];
                }
            }
            return g;
        }
        case classical::Norm::l1: {
            index_t best_col = 0;
            double best = -1.0;
            for (index_t j = 0; j < w.cols(); ++j) {
                double s = 0.0;
                for (index_t i = 0; i < w.rows(); ++i) {
                    s += std::abs(w(i, j));
                }
                if (s > best) {
                    best = s;
                    best_col = j;
                }
            }
            for (index_t i = 0; i < w.rows(); ++i) {
                const double x = w(i, best_col);
                g(i, best_col) = 2.0 * best * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
            }
            return g;
        }
        case classical::Norm::linf: {
            index_t best_row = 0;
            double best = -1.0;
            for (index_t i = 0; i < w.rows(); ++i) {
                double s = 0.0;
                for (index_t j = 0; j < w.cols(); ++j) {
                    s += std::abs(w(i, j));
                }
                if (s > best) {
                    best = s;
                    best_row = i;
                }
            }
            for (index_t j = 0; j < w.cols(); ++j) {
                const double x = w(best_row, j);
                g(best_row, j) = 2.0 * best * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
            }
            return g;
        }
    }
    return g;
}

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate_split(const HybridModel& m, const Dataset& data,
                          const std::vector<index_t>& indices) {
    EvalResult r;
    if (indices.empty()) {
        return r;
    }
    const bool probs = ends_with_quantum(m);
    index_t correct = 0;
    for (index_t idx : indices) {
        const auto out = hybrid_forward(m, data.features[idx]);
        r.loss += output_loss(out, data.labels[idx], probs);
        index_t arg = 0;
        for (index_t i = 1; i < out.size(); ++i) {
            if (out[i] > out[arg]) {
                arg = i;
            }
        }
        correct += (arg == data.labels[idx]) ? 1 : 0;
    }
    r.loss /= static_cast<double>(indices.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
    return r;
}

MetricsRow evaluate_epoch(const HybridModel& m, const Dataset& data, const TrainConfig& cfg,
                          index_t epoch) {
    MetricsRow row;
    row.epoch = epoch;
    row.method = train_method_string(cfg.method);
    row.norm = classical::norm_string(cfg.norm);
    row.lambda = cfg.lambda;
    row.seed = cfg.seed;

    const EvalResult tr = evaluate_split(m, data, data.train_indices);
    const EvalResult te = evaluate_split(m, data, data.test_indices);
    row.loss = tr.loss;
    row.train_acc = tr.accuracy;
    row.test_acc = te.accuracy;

    const auto bound = hybrid_lip_bound(m, cfg.norm);
    double lc = 1.0;
    double lq = 1.0;
    for (const auto& e : bound.per_block) {
        if (e.block_id[0] == 'f') {
            lc *= e.constant;
        } else {
            lq *= e.constant;
        }
    }
    row.lip_classical = lc;
    row.lip_quantum = lq;
    row.lip_hybrid = bound.total;
    return row;
}

}  // namespace

Dataset Dataset::load_csv(const std::string& path, std::uint64_t split_seed) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidConfig("cannot open dataset: " + path);
    }
    Dataset d;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() < 2) {
            throw InvalidConfig("dataset rows need features plus a label");
        }
        if (first) {
            first = false;
            try {
                (void)std::stod(cells[0]);
            } catch (...) {
                continue;  // header row
            }
        }
        std::vector<double> feats(cells.size() - 1);
        for (index_t i = 0; i + 1 < cells.size(); ++i) {
            feats[i] = std::stod(cells[i]);
        }
        const std::string& label = cells.back();
        index_t cls = 0;
        auto it = std::find(d.class_names.begin(), d.class_names.end(), label);
        if (it == d.class_names.end()) {
            cls = d.class_names.size();
            d.class_names.push_back(label);
        } else {
            cls = static_cast<index_t>(it - d.class_names.begin());
        }
        d.features.push_back(std::move(feats));
        d.labels.push_back(cls);
    }
    if (d.features.empty()) {
        throw InvalidConfig("dataset is empty: " + path);
    }
    const index_t dim = d.features.front().size();
    for (const auto& f : d.features) {
        if (f.size() != dim) {
            throw InvalidConfig("dataset rows have inconsistent width");
        }
    }
    // min-max scale each column to [0, pi]
    for (index_t j = 0; j < dim; ++j) {
        double lo = d.features[0][j];
        double hi = lo;
        for (const auto& f : d.features) {
            lo = std::min(lo, f[j]);
            hi = std::max(hi, f[j]);
        }
        const double span = hi - lo;
        for (auto& f : d.features) {
            f[j] = span > 0.0 ? (f[j] - lo) / span * M_PI : 0.0;
        }
    }
    d.resplit(split_seed);
    return d;
}

void Dataset::resplit(std::uint64_t seed) {
    split_seed = seed;
    train_indices.clear();
    test_indices.clear();
    for (index_t c = 0; c < classes(); ++c) {
        std::vector<index_t> members;
        for (index_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) {
                members.push_back(i);
            }
        }
        if (members.empty()) {
            continue;  // label alteration can empty a class
        }
        if (members.size() < 2) {
            throw InvalidConfig("class " + class_names[c] + " needs at least two examples");
        }
        Rng rng = Rng::stream(seed, c);
        for (index_t i = members.size(); i-- > 1;) {
            std::swap(members[i], members[rng.below(i + 1)]);
        }
        const index_t n_test =
            std::max<index_t>(1, static_cast<index_t>(std::lround(0.2 * members.size())));
        for (index_t i = 0; i < members.size(); ++i) {
            (i < n_test ? test_indices : train_indices).push_back(members[i]);
        }
    }
    std::sort(train_indices.begin(), train_indices.end());
    std::sort(test_indices.begin(), test_indices.end());
}

std::string train_method_string(TrainMethod m) {
    switch (m) {
        case TrainMethod::naive: return "naive";
        case TrainMethod::pgd: return "pgd";
        case TrainMethod::lipreg: return "lipreg";
    }
    return "?";
}

TrainMethod train_method_from_string(const std::string& s) {
    if (s == "naive") return TrainMethod::naive;
    if (s == "pgd") return TrainMethod::pgd;
    if (s == "lipreg") return TrainMethod::lipreg;
    throw InvalidConfig("unknown training method: " + s);
}

void TrainConfig::validate() const {
    if (lambda < 0.0) {
        throw InvalidConfig("lambda must be nonnegative");
    }
    if (eps < 0.0) {
        throw InvalidConfig("eps must be nonnegative");
    }
    if (method == TrainMethod::pgd && pgd_steps < 1) {
        throw InvalidConfig("pgd needs at least one step");
    }
    if (batch < 1) {
        throw InvalidConfig("batch size must be positive");
    }
    if (lr <= 0.0) {
        throw InvalidConfig("learning rate must be positive");
    }
}

const char* MetricsLog::csv_header() {
    return "epoch,method,norm,loss,train_acc,test_acc,lip_classical,lip_quantum,lip_hybrid,"
           "lambda,seed";
}

void MetricsLog::write_csv(std::ostream& os) const {
    os << csv_header() << "\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%llu",
                      static_cast<std::size_t>(r.epoch), r.method.c_str(), r.norm.c_str(), r.loss,
                      r.train_acc, r.test_acc, r.lip_classical, r.lip_quantum, r.lip_hybrid,
                      r.lambda, static_cast<unsigned long long>(r.seed));
        os << buf << "\n";
    }
}

DenseGradients dense_backward(const DenseNet& net, const std::vector<double>& x,
                              const std::vector<double>& upstream) {
    net.validate();
    const index_t depth = net.layers.size();
    std::vector<std::vector<double>> pre(depth);   // z = Wx + b
    std::vector<std::vector<double>> act(depth + 1);
    act[0] = x;
    for (index_t l = 0; l < depth; ++l) {
        const auto& layer = net.layers[l];
        pre[l] = layer.weights.apply(act[l]);
        act[l + 1].resize(pre[l].size());
        for (index_t i = 0; i < pre[l].size(); ++i) {
            pre[l][i] += layer.bias[i];
            act[l + 1][i] = classical::activation_apply(layer.activation, pre[l][i]);
        }
    }
    if (upstream.size() != act[depth].size()) {
        throw DimensionMismatch("upstream gradient length mismatch");
    }

    DenseGradients g;
    g.weight_grads.resize(depth);
    g.bias_grads.resize(depth);
    std::vector<double> delta = upstream;
    for (index_t l = depth; l-- > 0;) {
        const auto& layer = net.layers[l];
        for (index_t i = 0; i < delta.size(); ++i) {
            delta[i] *= classical::activation_derivative(layer.activation, pre[l][i]);
        }
        g.bias_grads[l] = delta;
        g.weight_grads[l] = RealMatrix(layer.weights.rows(), layer.weights.cols());
        for (index_t i = 0; i < layer.weights.rows(); ++i) {
            kernels::active().daxpy(layer.weights.cols(), delta[i], act[l].data(),
                                    g.weight_grads[l].row_ptr(i));
        }
        delta = layer.weights.apply_transpose(delta);
    }
    g.input_grad = std::move(delta);
    return g;
}

DenseGradients classical_grads(const DenseNet& net, const std::vector<double>& x, index_t target) {
    const auto out = classical::forward(net, x);
    if (target >= out.size()) {
        throw DimensionMismatch("target class out of range");
    }
    DenseGradients g = dense_backward(net, x, output_loss_grad(out, target, false));
    g.loss = output_loss(out, target, false);
    return g;
}

std::vector<double> quantum_grads(const quantum::CircuitSpec& c,
                                  const quantum::DensityOperator& rho,
                                  const std::vector<double>& upstream) {
    c.validate();
    if (c.trainable_count() > c.params.size()) {
        throw UnboundParameter("circuit has unbound trainable slots");
    }
    if (upstream.size() != c.povm.outcomes()) {
        throw DimensionMismatch("upstream length must match outcome count");
    }
    std::vector<double> grad(c.params.size(), 0.0);
    for (index_t g = 0; g < c.gates.size(); ++g) {
        const auto& gate = c.gates[g];
        if (gate.param.kind != quantum::GateParam::Kind::trainable) {
            continue;
        }
        if (!quantum::gate_takes_angle(gate.name)) {
            throw UnsupportedGateParam("parameter-shift rule needs a rotation gate");
        }
        const double theta = c.params[gate.param.index];
        quantum::CircuitSpec plus = c;
        plus.gates[g].param = quantum::GateParam::fixed(theta + M_PI_2);
        quantum::CircuitSpec minus = c;
        minus.gates[g].param = quantum::GateParam::fixed(theta - M_PI_2);
        const auto p_plus = quantum::measure_probs(plus, rho);
        const auto p_minus = quantum::measure_probs(minus, rho);
        double acc = 0.0;
        for (index_t i = 0; i < upstream.size(); ++i) {
            acc += upstream[i] * 0.5 * (p_plus[i] - p_minus[i]);
        }
        grad[gate.param.index] += acc;
    }
    return grad;
}

double hybrid_loss(const HybridModel& m, const std::vector<double>& x, index_t target) {
    const auto out = hybrid_forward(m, x);
    return output_loss(out, target, ends_with_quantum(m));
}

std::vector<double> hybrid_input_grad(const HybridModel& m, const std::vector<double>& x,
                                      index_t target) {
    const auto owned = build_workspaces(m, /*with_shifts=*/false);
    return backward_sample(m, workspace_pointers(owned), x, target, /*with_theta=*/false)
        .input_grad;
}

std::vector<double> pgd_attack(const HybridModel& m, const std::vector<double>& x, index_t target,
                               double eps, index_t steps, double step_size) {
    if (eps == 0.0) {
        return x;
    }
    if (step_size <= 0.0) {
        step_size = eps / 4.0;
    }
    const auto owned = build_workspaces(m, /*with_shifts=*/false);
    const auto ws = workspace_pointers(owned);

    std::vector<double> current = x;
    std::vector<double> best = x;
    double best_loss = hybrid_loss(m, x, target);
    for (index_t s = 0; s < steps; ++s) {
        const auto grads = backward_sample(m, ws, current, target, /*with_theta=*/false);
        for (index_t i = 0; i < current.size(); ++i) {
            const double dir = grads.input_grad[i];
            current[i] += step_size * (dir > 0.0 ? 1.0 : (dir < 0.0 ? -1.0 : 0.0));
            current[i] = std::clamp(current[i], x[i] - eps, x[i] + eps);
            current[i] = std::clamp(current[i], 0.0, M_PI);
        }
        const double loss = hybrid_loss(m, current, target);
        if (loss > best_loss) {
            best_loss = loss;
            best = current;
        }
    }
    return best;
}

double lip_penalty(const HybridModel& m, classical::Norm norm) {
    m.validate();
    double penalty = 0.0;
    for (const auto& block : m.blocks) {
        if (std::holds_alternative<DenseNet>(block)) {
            for (const auto& layer : std::get<DenseNet>(block).layers) {
                const double n = classical::induced_norm(layer.weights, norm);
                penalty += n * n;
            }
        }
    }
    return penalty;
}

MetricsLog train(HybridModel& m, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    m.validate();
    if (m.input_dim() != data.feature_dim()) {
        throw InvalidConfig("model input does not match dataset features");
    }
    if (m.output_dim() != data.classes()) {
        throw InvalidConfig("model output does not match class count");
    }

    MetricsLog log;
    log.rows.push_back(evaluate_epoch(m, data, cfg, 0));

    Rng shuffle_rng = Rng::stream(cfg.seed, 0xba7c4e5);
    std::vector<index_t> order = data.train_indices;

    for (index_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (index_t i = order.size(); i-- > 1;) {
            std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }
        for (index_t start = 0; start < order.size(); start += cfg.batch) {
            const index_t stop = std::min(order.size(), start + cfg.batch);
            const double inv = 1.0 / static_cast<double>(stop - start);

            const auto owned = build_workspaces(m, /*with_shifts=*/true);
            const auto ws = workspace_pointers(owned);

            std::vector<BlockGrads> total(m.blocks.size());
            for (index_t s = start; s < stop; ++s) {
                const index_t idx = order[s];
                std::vector<double> x = data.features[idx];
                if (cfg.method == TrainMethod::pgd) {
                    x = pgd_attack(m, x, data.labels[idx], cfg.eps, cfg.pgd_steps,
                                   cfg.pgd_step_size);
                }
                auto g = backward_sample(m, ws, x, data.labels[idx], /*with_theta=*/true);
                for (index_t b = 0; b < m.blocks.size(); ++b) {
                    auto& dst = total[b];
                    auto& src = g.blocks[b];
                    if (!src.weight_grads.empty()) {
                        if (dst.weight_grads.empty()) {
                            dst = std::move(src);
                        } else {
                            for (index_t l = 0; l < src.weight_grads.size(); ++l) {
                                auto& dw = dst.weight_grads[l].entries();
                                const auto& sw = src.weight_grads[l].entries();
                                kernels::active().daxpy(dw.size(), 1.0, sw.data(), dw.data());
                                for (index_t k = 0; k < dst.bias_grads[l].size(); ++k) {
                                    dst.bias_grads[l][k] += src.bias_grads[l][k];
                                }
                            }
                        }
                    }
                    if (!src.theta_grads.empty()) {
                        if (dst.theta_grads.empty()) {
                            dst.theta_grads = std::move(src.theta_grads);
                        } else {
                            for (index_t k = 0; k < src.theta_grads.size(); ++k) {
                                dst.theta_grads[k] += src.theta_grads[k];
                            }
                        }
                    }
                }
            }

            // SGD step (batch mean, plus the regularizer on classical weights).
            for (index_t b = 0; b < m.blocks.size(); ++b) {
                if (std::holds_alternative<DenseNet>(m.blocks[b])) {
                    auto& net = std::get<DenseNet>(m.blocks[b]);
                    for (index_t l = 0; l < net.layers.size(); ++l) {
                        auto& w = net.layers[l].weights;
                        if (!total[b].weight_grads.empty()) {
                            kernels::active().daxpy(w.entries().size(), -cfg.lr * inv,
                                                    total[b].weight_grads[l].entries().data(),
                                                    w.entries().data());
                            for (index_t k = 0; k < net.layers[l].bias.size(); ++k) {
                                net.layers[l].bias[k] -= cfg.lr * inv * total[b].bias_grads[l][k];
                            }
                        }
                        if (cfg.method == TrainMethod::lipreg && cfg.lambda > 0.0) {
                            const RealMatrix pg = penalty_gradient(w, cfg.norm);
                            kernels::active().daxpy(w.entries().size(), -cfg.lr * cfg.lambda,
                                                    pg.entries().data(), w.entries().data());
                        }
                    }
                } else if (!total[b].theta_grads.empty()) {
                    auto& qb = std::get<QuantumBlock>(m.blocks[b]);
                    std::vector<double> params = qb.circuit.params;
                    for (index_t k = 0; k < params.size(); ++k) {
                        params[k] -= cfg.lr * inv * total[b].theta_grads[k];
                    }
                    qb.circuit = qb.circuit.with_params(std::move(params));
                }
            }
        }
        log.rows.push_back(evaluate_epoch(m, data, cfg, epoch));
    }
    return log;
}

}  // namespace qclip::train
