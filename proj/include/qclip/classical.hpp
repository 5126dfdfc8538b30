#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qclip/real_matrix.hpp"

namespace qclip::classical {

enum class Activation { relu, sigmoid, tanh_, none };

std::string activation_string(Activation a);
Activation activation_from_string(const std::string& s);

// Incremental sector bounds [alpha, beta] of the difference quotient
// (sigma(x) - sigma(y)) / (x - y).
struct Sector {
    double alpha;
    double beta;
};
Sector activation_sector(Activation a);

// Scalar Lipschitz factor max(|alpha|, |beta|).
double activation_lipschitz(Activation a);

double activation_apply(Activation a, double x);
double activation_derivative(Activation a, double x);

struct DenseLayer {
    RealMatrix weights;           // out x in
    std::vector<double> bias;     // out
    Activation activation = Activation::none;
};

struct DenseNet {
    std::vector<DenseLayer> layers;

    index_t input_dim() const;
    index_t output_dim() const;
    void validate() const;  // bias lengths, dimension chaining
};

enum class Norm { l1, l2, linf };

std::string norm_string(Norm n);
Norm norm_from_string(const std::string& s);

double vector_norm(const std::vector<double>& v, Norm n);

// Induced operator norm: l2 spectral (power iteration), l1 max column sum,
// linf max row sum.
double induced_norm(const RealMatrix& w, Norm n);

enum class BoundMethod { sdp, product, empirical_lower };

std::string bound_method_string(BoundMethod m);

struct ClassicalBoundReport {
    double bound = 0.0;
    Norm norm = Norm::l2;
    BoundMethod method = BoundMethod::product;
    std::optional<std::vector<double>> multipliers;  // diagonal T of the last SDP block
    index_t bisection_iterations = 0;                // worst block
};

std::vector<double> forward(const DenseNet& net, const std::vector<double>& x);

// Product of per-layer activation factors and induced weight norms.
ClassicalBoundReport lip_product(const DenseNet& net, Norm norm);

// LipSDP certificate (l2 only): consecutive (activated, affine) layer pairs
// are bounded by the smallest gamma whose LMI admits a diagonal multiplier,
// found by bisection over gamma with a derivative-free multiplier search of
// `budget` evaluations per feasibility query; blocks multiply.
ClassicalBoundReport lip_sdp(const DenseNet& net, index_t budget = 200);

// Sampled lower bound from finite differences of random nearby pairs.
ClassicalBoundReport lip_empirical(const DenseNet& net, index_t samples, std::uint64_t seed,
                                   Norm norm);

}  // namespace qclip::classical
