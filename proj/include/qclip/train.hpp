#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qclip/hybrid.hpp"

namespace qclip::train {

// Iris-style dataset: features min-max scaled to [0, pi] so the angle
// encoder covers half a rotation; deterministic stratified 80-20 split.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<index_t> labels;
    std::vector<std::string> class_names;
    std::uint64_t split_seed = 0;
    std::vector<index_t> train_indices;
    std::vector<index_t> test_indices;

    index_t classes() const { return class_names.size(); }
    index_t feature_dim() const { return features.empty() ? 0 : features.front().size(); }

    static Dataset load_csv(const std::string& path, std::uint64_t split_seed);
    void resplit(std::uint64_t seed);
};

enum class TrainMethod { naive, pgd, lipreg };

std::string train_method_string(TrainMethod m);
TrainMethod train_method_from_string(const std::string& s);

struct TrainConfig {
    TrainMethod method = TrainMethod::naive;
    index_t epochs = 200;
    double lr = 0.05;
    index_t batch = 16;
    double lambda = 0.0;       // lipreg weight
    double eps = 0.1;          // PGD linf radius
    index_t pgd_steps = 7;
    double pgd_step_size = 0.0;  // 0 -> eps/4
    classical::Norm norm = classical::Norm::l2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MetricsRow {
    index_t epoch = 0;
    std::string method;
    std::string norm;
    double loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double lip_classical = 0.0;
    double lip_quantum = 0.0;
    double lip_hybrid = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
};

struct MetricsLog {
    std::vector<MetricsRow> rows;

    static const char* csv_header();
    void write_csv(std::ostream& os) const;
};

// Parameter gradients of one dense segment plus the input gradient.
struct DenseGradients {
    std::vector<RealMatrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
    std::vector<double> input_grad;
    double loss = 0.0;
};

// Reverse-accumulation gradients of softmax cross-entropy for a standalone
// classifier net.
DenseGradients classical_grads(const classical::DenseNet& net, const std::vector<double>& x,
                               index_t target);

// Backward through a dense segment under an arbitrary upstream gradient.
DenseGradients dense_backward(const classical::DenseNet& net, const std::vector<double>& x,
                              const std::vector<double>& upstream);

// Parameter-shift gradients d<upstream, p>/dtheta for every trainable angle.
std::vector<double> quantum_grads(const quantum::CircuitSpec& c,
                                  const quantum::DensityOperator& rho,
                                  const std::vector<double>& upstream);

// Loss of the full hybrid model on one example (cross-entropy; probabilities
// direct when the model ends in a quantum block, softmax otherwise).
double hybrid_loss(const hybrid::HybridModel& m, const std::vector<double>& x, index_t target);

// Gradient of the loss with respect to the model input.
std::vector<double> hybrid_input_grad(const hybrid::HybridModel& m, const std::vector<double>& x,
                                      index_t target);

// Iterated sign-gradient ascent inside the linf ball of radius eps and the
// [0, pi] feature box; returns the best-loss iterate (never worse than x).
std::vector<double> pgd_attack(const hybrid::HybridModel& m, const std::vector<double>& x,
                               index_t target, double eps, index_t steps, double step_size);

// Differentiable surrogate: sum of squared induced weight norms over the
// classical layers.
double lip_penalty(const hybrid::HybridModel& m, classical::Norm norm);

MetricsLog train(hybrid::HybridModel& m, const Dataset& data, const TrainConfig& cfg);

}  // namespace qclip::train
