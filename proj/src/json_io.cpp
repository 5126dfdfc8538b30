#include "qclip/json_io.hpp"

#include <fstream>
#include <sstream>

namespace qclip::json_io {

namespace {

quantum::GateSpec gate_from_json(const json& j) {
    quantum::GateSpec g;
    g.name = quantum::gate_name_from_string(j.at("name").get<std::string>());
    g.target = j.at("target").get<index_t>();
    if (j.contains("control")) {
        g.control = j.at("control").get<index_t>();
    }
    if (j.contains("param")) {
        const auto& p = j.at("param");
        if (p.is_number()) {
            g.param = quantum::GateParam::fixed(p.get<double>());
        } else {
            const std::string kind = p.at("kind").get<std::string>();
            if (kind == "fixed") {
                g.param = quantum::GateParam::fixed(p.at("value").get<double>());
            } else if (kind == "trainable") {
                g.param = quantum::GateParam::trainable(p.at("index").get<index_t>());
            } else {
                throw InvalidConfig("unknown param kind: " + kind);
            }
        }
    }
    return g;
}

json gate_to_json(const quantum::GateSpec& g) {
    json j;
    j["name"] = quantum::gate_name_string(g.name);
    j["target"] = g.target;
    if (g.control.has_value()) {
        j["control"] = *g.control;
    }
    switch (g.param.kind) {
        case quantum::GateParam::Kind::fixed:
            j["param"] = {{"kind", "fixed"}, {"value", g.param.value}};
            break;
        case quantum::GateParam::Kind::trainable:
            j["param"] = {{"kind", "trainable"}, {"index", g.param.index}};
            break;
        case quantum::GateParam::Kind::none:
            break;
    }
    return j;
}

quantum::Povm povm_from_json(const json& j, index_t qubits) {
    if (j.is_string()) {
        if (j.get<std::string>() == "computational") {
            return quantum::Povm::computational(qubits);
        }
        throw InvalidPovm("unknown POVM name: " + j.get<std::string>());
    }
    if (j.contains("groups")) {
        return quantum::Povm::grouped(qubits,
                                      j.at("groups").get<std::vector<std::vector<index_t>>>());
    }
    if (j.contains("ops")) {
        std::vector<ComplexMatrix> ops;
        for (const auto& m : j.at("ops")) {
            ops.push_back(matrix_from_json(m));
        }
        return quantum::Povm::from_ops(std::move(ops));
    }
    throw InvalidPovm("POVM must be \"computational\", {groups}, or {ops}");
}

classical::DenseLayer layer_from_json(const json& j) {
    classical::DenseLayer layer;
    const auto& w = j.at("weights");
    const index_t rows = w.size();
    if (rows == 0) {
        throw InvalidConfig("layer weights must be nonempty");
    }
    const index_t cols = w.at(0).size();
    layer.weights = RealMatrix(rows, cols);
    for (index_t i = 0; i < rows; ++i) {
        if (w.at(i).size() != cols) {
            throw InvalidConfig("ragged weight rows");
        }
        for (index_t k = 0; k < cols; ++k) {
            layer.weights(i, k) = w.at(i).at(k).get<double>();
        }
    }
    if (j.contains("bias")) {
        layer.bias = j.at("bias").get<std::vector<double>>();
    } else {
        layer.bias.assign(rows, 0.0);
    }
    layer.activation = classical::activation_from_string(
        j.contains("activation") ? j.at("activation").get<std::string>() : "none");
    return layer;
}

json layer_to_json(const classical::DenseLayer& layer) {
    json w = json::array();
    for (index_t i = 0; i < layer.weights.rows(); ++i) {
        json row = json::array();
        for (index_t k = 0; k < layer.weights.cols(); ++k) {
            row.push_back(layer.weights(i, k));
        }
        w.push_back(std::move(row));
    }
    return {{"type", "dense"},
            {"weights", std::move(w)},
            {"bias", layer.bias},
            {"activation", classical::activation_string(layer.activation)}};
}

hybrid::QuantumBlock quantum_block_from_json(const json& j) {
    hybrid::QuantumBlock qb;
    qb.qubits = j.at("qubits").get<index_t>();
    const std::string encoding =
        j.contains("encoding") ? j.at("encoding").get<std::string>() : "angle-ry";
    if (encoding != "angle-ry" && encoding != "angle") {
        throw UnsupportedEncoding("only the RY angle encoding is supported, got " + encoding);
    }
    qb.circuit.qubits = qb.qubits;
    if (j.contains("gates")) {
        for (const auto& g : j.at("gates")) {
            qb.circuit.gates.push_back(gate_from_json(g));
        }
    }
    qb.circuit.povm = j.contains("povm") ? povm_from_json(j.at("povm"), qb.qubits)
                                         : quantum::Povm::computational(qb.qubits);
    if (j.contains("params")) {
        qb.circuit = qb.circuit.with_params(j.at("params").get<std::vector<double>>());
    }
    qb.circuit.validate();
    return qb;
}

json quantum_block_to_json(const hybrid::QuantumBlock& qb) {
    json j;
    j["type"] = "quantum";
    j["qubits"] = qb.qubits;
    j["encoding"] = "angle-ry";
    json gates = json::array();
    for (const auto& g : qb.circuit.gates) {
        gates.push_back(gate_to_json(g));
    }
    j["gates"] = std::move(gates);
    // Projector POVMs round-trip through their diagonal support.
    json groups = json::array();
    bool projectors = true;
    for (const auto& op : qb.circuit.povm.ops()) {
        json group = json::array();
        for (index_t i = 0; i < op.rows(); ++i) {
            for (index_t k = 0; k < op.cols(); ++k) {
                const cplx v = op(i, k);
                if (i == k && v == cplx{1.0, 0.0}) {
                    group.push_back(i);
                } else if (v != cplx{0.0, 0.0}) {
                    projectors = false;
                }
            }
        }
        groups.push_back(std::move(group));
    }
    if (projectors) {
        j["povm"] = {{"groups", std::move(groups)}};
    } else {
        json ops = json::array();
        for (const auto& op : qb.circuit.povm.ops()) {
            ops.push_back(matrix_to_json(op));
        }
        j["povm"] = {{"ops", std::move(ops)}};
    }
    if (!qb.circuit.params.empty()) {
        j["params"] = qb.circuit.params;
    }
    return j;
}

}  // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidConfig("cannot open file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidConfig("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (index_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (index_t k = 0; k < m.cols(); ++k) {
            row.push_back({m(i, k).real(), m(i, k).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) {
        throw InvalidConfig("matrix JSON must be a nonempty array of rows");
    }
    const index_t rows = j.size();
    const index_t cols = j.at(0).size();
    ComplexMatrix m(rows, cols);
    for (index_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) {
            throw InvalidConfig("ragged matrix rows");
        }
        for (index_t k = 0; k < cols; ++k) {
            const auto& cell = j.at(i).at(k);
            if (cell.is_number()) {
                m(i, k) = cell.get<double>();
            } else {
                m(i, k) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
            }
        }
    }
    if (!m.all_finite()) {
        throw InvalidOperator("matrix JSON contains non-finite entries");
    }
    return m;
}

json circuit_to_json(const quantum::CircuitSpec& c) {
    hybrid::QuantumBlock qb;
    qb.qubits = c.qubits;
    qb.circuit = c;
    json j = quantum_block_to_json(qb);
    j.erase("type");
    j.erase("encoding");
    return j;
}

quantum::CircuitSpec circuit_from_json(const json& j) {
    json block = j;
    block["type"] = "quantum";
    return quantum_block_from_json(block).circuit;
}

json densenet_to_json(const classical::DenseNet& net) {
    json layers = json::array();
    for (const auto& l : net.layers) {
        layers.push_back(layer_to_json(l));
    }
    return {{"layers", std::move(layers)}};
}

classical::DenseNet densenet_from_json(const json& j) {
    classical::DenseNet net;
    for (const auto& l : j.at("layers")) {
        net.layers.push_back(layer_from_json(l));
    }
    net.validate();
    return net;
}

json hybrid_to_json(const hybrid::HybridModel& m) {
    json blocks = json::array();
    for (const auto& b : m.blocks) {
        if (std::holds_alternative<classical::DenseNet>(b)) {
            for (const auto& l : std::get<classical::DenseNet>(b).layers) {
                blocks.push_back(layer_to_json(l));
            }
        } else {
            blocks.push_back(quantum_block_to_json(std::get<hybrid::QuantumBlock>(b)));
        }
    }
    return {{"blocks", std::move(blocks)}};
}

hybrid::HybridModel hybrid_from_json(const json& j) {
    hybrid::HybridModel m;
    classical::DenseNet pending;
    auto flush = [&]() {
        if (!pending.layers.empty()) {
            m.blocks.emplace_back(std::move(pending));
            pending = classical::DenseNet{};
        }
    };
    for (const auto& b : j.at("blocks")) {
        const std::string type = b.contains("type") ? b.at("type").get<std::string>() : "dense";
        if (type == "dense") {
            pending.layers.push_back(layer_from_json(b));
        } else if (type == "quantum") {
            flush();
            m.blocks.emplace_back(quantum_block_from_json(b));
        } else {
            throw InvalidConfig("unknown block type: " + type);
        }
    }
    flush();
    m.validate();
    return m;
}

train::MetricsLog metrics_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidConfig("cannot open metrics CSV: " + path);
    }
    train::MetricsLog log;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 11) {
            throw InvalidConfig("metrics CSV row needs 11 columns");
        }
        train::MetricsRow r;
        r.epoch = static_cast<index_t>(std::stoull(cells[0]));
        r.method = cells[1];
        r.norm = cells[2];
        r.loss = std::stod(cells[3]);
        r.train_acc = std::stod(cells[4]);
        r.test_acc = std::stod(cells[5]);
        r.lip_classical = std::stod(cells[6]);
        r.lip_quantum = std::stod(cells[7]);
        r.lip_hybrid = std::stod(cells[8]);
        r.lambda = std::stod(cells[9]);
        r.seed = std::stoull(cells[10]);
        log.rows.push_back(std::move(r));
    }
    return log;
}

}  // namespace qclip::json_io
