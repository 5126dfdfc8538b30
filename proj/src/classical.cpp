#include "qclip/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qclip/numerics.hpp"
#include "qclip/rng.hpp"

namespace qclip::classical {

namespace {

constexpr double kRelTol = 1e-6;  // bisection width, relative
constexpr index_t kMaxBisect = 60;

// LMI feasibility data for one (activated layer, affine layer) block:
//   P(g^2, T) = [ 2ab W0^T T W0 + g^2 I   -(a+b) W0^T T ]
//               [ -(a+b) T W0              2T - W1^T W1 ]  >= 0
// with diagonal T >= 0; feasibility is monotone in g.
struct SdpBlock {
    RealMatrix w0;  // h x n0
    RealMatrix w1;  // out x h
    Sector sector;
    RealMatrix w1t_w1;     // h x h
    double product_bound;  // max(|a|,|b|) * ||W0||_2 * ||W1||_2
    double t_star;         // ||W1||_2^2, the tI certificate of the product bound
};

ComplexMatrix build_lmi(const SdpBlock& blk, double gamma, const std::vector<double>& t) {
    const index_t n0 = blk.w0.cols();
    const index_t h = blk.w0.rows();
    const double a = blk.sector.alpha;
    const double b = blk.sector.beta;
    RealMatrix p(n0 + h, n0 + h);

    // top-left: 2ab W0^T T W0 + g^2 I
    for (index_t i = 0; i < n0; ++i) {
        p(i, i) = gamma * gamma;
    }
    if (a * b != 0.0) {
        for (index_t i = 0; i < n0; ++i) {
            for (index_t j = i; j < n0; ++j) {
                double s = 0.0;
                for (index_t k = 0; k < h; ++k) {
                    s += blk.w0(k, i) * t[k] * blk.w0(k, j);
                }
                p(i, j) += 2.0 * a * b * s;
                if (i != j) {
                    p(j, i) = p(i, j);
                }
            }
        }
    }
    // off-diagonal: -(a+b) W0^T T
    for (index_t i = 0; i < n0; ++i) {
        for (index_t k = 0; k < h; ++k) {
            const double v = -(a + b) * blk.w0(k, i) * t[k];
            p(i, n0 + k) = v;
            p(n0 + k, i) = v;
        }
    }
    // bottom-right: 2T - W1^T W1
    for (index_t i = 0; i < h; ++i) {
        for (index_t j = 0; j < h; ++j) {
            p(n0 + i, n0 + j) = -blk.w1t_w1(i, j);
        }
        p(n0 + i, n0 + i) += 2.0 * t[i];
    }
    return p.to_complex();
}

bool lmi_feasible(const SdpBlock& blk, double gamma, const std::vector<double>& t) {
    return numerics::psd_feasible(build_lmi(blk, gamma, t));
}

double lmi_margin(const SdpBlock& blk, double gamma, const std::vector<double>& t) {
    return numerics::herm_eig(build_lmi(blk, gamma, t)).eigenvalues.front();
}

// Multiplier search: cached witness, then a tI sweep, then Nelder-Mead over
// log-diagonal T maximizing the smallest LMI eigenvalue.  `budget` caps the
// eigenvalue evaluations.
std::optional<std::vector<double>> find_multiplier(
    const SdpBlock& blk, double gamma, index_t budget,
    const std::optional<std::vector<double>>& cached) {
    const index_t h = blk.w0.rows();
    if (cached.has_value() && lmi_feasible(blk, gamma, *cached)) {
        return cached;
    }

    // tI fallback sweep; t_star certifies the product bound exactly.
    std::vector<double> scales = {1.0};
    for (int i = 0; i < 19; ++i) {
        scales.push_back(0.6 * std::pow(100.0 / 0.6, i / 18.0));
    }
    for (double s : scales) {
        const std::vector<double> t(h, std::max(blk.t_star * s, 1e-12));
        if (lmi_feasible(blk, gamma, t)) {
            return t;
        }
    }

    if (budget == 0) {
        return std::nullopt;
    }

    // Nelder-Mead on v = log t.
    std::vector<double> best_t;
    double best_margin = -1e300;
    index_t evals = 0;
    auto eval = [&](const std::vector<double>& v) {
        std::vector<double> t(h);
        for (index_t i = 0; i < h; ++i) {
            t[i] = std::exp(v[i]);
        }
        ++evals;
        const double m = lmi_margin(blk, gamma, t);
        if (m > best_margin) {
            best_margin = m;
            best_t = t;
        }
        return m;
    };

    const double v0 = std::log(std::max(blk.t_star, 1e-12));
    std::vector<std::vector<double>> simplex(h + 1, std::vector<double>(h, v0));
    for (index_t i = 0; i < h; ++i) {
        simplex[i + 1][i] += 0.4;
    }
    std::vector<double> value(h + 1);
    for (index_t i = 0; i <= h && evals < budget; ++i) {
        value[i] = eval(simplex[i]);
    }
    while (evals + 2 < budget) {
        std::vector<index_t> ord(h + 1);
        for (index_t i = 0; i <= h; ++i) {
            ord[i] = i;
        }
        std::sort(ord.begin(), ord.end(),
                  [&](index_t a, index_t b) { return value[a] > value[b]; });
        if (value[ord[0]] > 0.0) {
            break;  // strictly interior point found
        }
        std::vector<double> centroid(h, 0.0);
        for (index_t i = 0; i < h; ++i) {
            for (index_t j = 0; j < h; ++j) {
                centroid[j] += simplex[ord[i]][j] / static_cast<double>(h);
            }
        }
        const index_t worst = ord[h];
        auto blend = [&](double coeff) {
            std::vector<double> p(h);
            for (index_t j = 0; j < h; ++j) {
                p[j] = centroid[j] + coeff * (simplex[worst][j] - centroid[j]);
            }
            return p;
        };
        const auto reflected = blend(-1.0);
        const double fr = eval(reflected);
        if (fr > value[ord[0]]) {
            const auto expanded = blend(-2.0);
            const double fe = eval(expanded);
            if (fe > fr) {
                simplex[worst] = expanded;
                value[worst] = fe;
            } else {
                simplex[worst] = reflected;
                value[worst] = fr;
            }
        } else if (fr > value[ord[h - 1]]) {
            simplex[worst] = reflected;
            value[worst] = fr;
        } else {
            const auto contracted = blend(0.5);
            const double fc = eval(contracted);
            if (fc > value[worst]) {
                simplex[worst] = contracted;
                value[worst] = fc;
            } else {
                for (index_t i = 1; i <= h && evals < budget; ++i) {
                    for (index_t j = 0; j < h; ++j) {
                        simplex[ord[i]][j] = 0.5 * (simplex[ord[i]][j] + simplex[ord[0]][j]);
                    }
                    value[ord[i]] = eval(simplex[ord[i]]);
                }
            }
        }
    }
    if (!best_t.empty() && lmi_feasible(blk, gamma, best_t)) {
        return best_t;
    }
    return std::nullopt;
}

struct BlockResult {
    double gamma;
    std::vector<double> multipliers;
    index_t iterations;
};

BlockResult certify_block(const SdpBlock& blk, index_t budget) {
    // The product bound is feasible with T = t_star I (up to round-off), so
    // it anchors the bisection from above.
    double hi = blk.product_bound * (1.0 + 1e-9) + 1e-12;
    double lo = 0.0;
    std::optional<std::vector<double>> witness = find_multiplier(blk, hi, budget, std::nullopt);
    if (!witness.has_value()) {
        throw NumericFailure("LMI infeasible at the product bound");
    }
    index_t iters = 0;
    while (hi - lo > kRelTol * std::max(hi, 1e-12) && iters < kMaxBisect) {
        ++iters;
        const double mid = 0.5 * (lo + hi);
        const auto found = find_multiplier(blk, mid, budget, witness);
        if (found.has_value()) {
            // Monotonicity: the witness must stay feasible above mid.
            if (!lmi_feasible(blk, hi, *found)) {
                throw NumericFailure("LMI feasibility is not monotone in gamma");
            }
            witness = found;
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {hi, *witness, iters};
}

double empirical_pair_ratio(const DenseNet& net, Norm norm, Rng& rng) {
    const index_t n0 = net.input_dim();
    std::vector<double> x(n0);
    for (auto& v : x) {
        v = 1.5 * rng.normal();
    }
    std::vector<double> dir(n0);
    double nd = 0.0;
    for (auto& v : dir) {
        v = rng.normal();
        nd += v * v;
    }
    nd = std::sqrt(nd);
    if (nd == 0.0) {
        return 0.0;
    }
    const double h = 1e-3;
    std::vector<double> y = x;
    for (index_t i = 0; i < n0; ++i) {
        y[i] += dir[i] / nd * h;
    }
    const auto fx = forward(net, x);
    const auto fy = forward(net, y);
    std::vector<double> dout(fx.size());
    std::vector<double> din(n0);
    for (index_t i = 0; i < fx.size(); ++i) {
        dout[i] = fy[i] - fx[i];
    }
    for (index_t i = 0; i < n0; ++i) {
        din[i] = y[i] - x[i];
    }
    const double denom = vector_norm(din, norm);
    return denom > 0.0 ? vector_norm(dout, norm) / denom : 0.0;
}

}  // namespace

std::string activation_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh_: return "tanh";
        case Activation::none: return "none";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "tanh") return Activation::tanh_;
    if (s == "none" || s == "linear") return Activation::none;
    throw InvalidConfig("unknown activation: " + s);
}

Sector activation_sector(Activation a) {
    switch (a) {
        case Activation::relu: return {0.0, 1.0};
        case Activation::sigmoid: return {0.0, 0.25};
        case Activation::tanh_: return {0.0, 1.0};
        case Activation::none: return {1.0, 1.0};
    }
    return {0.0, 1.0};
}

double activation_lipschitz(Activation a) {
    const Sector s = activation_sector(a);
    return std::max(std::abs(s.alpha), std::abs(s.beta));
}

double activation_apply(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::tanh_: return std::tanh(x);
        case Activation::none: return x;
    }
    return x;
}

double activation_derivative(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case Activation::tanh_: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::none: return 1.0;
    }
    return 1.0;
}

index_t DenseNet::input_dim() const { return layers.empty() ? 0 : layers.front().weights.cols(); }

index_t DenseNet::output_dim() const { return layers.empty() ? 0 : layers.back().weights.rows(); }

void DenseNet::validate() const {
    if (layers.empty()) {
        throw InvalidConfig("network needs at least one layer");
    }
    for (index_t i = 0; i < layers.size(); ++i) {
        if (layers[i].bias.size() != layers[i].weights.rows()) {
            throw DimensionMismatch("bias length does not match layer output");
        }
        if (i > 0 && layers[i].weights.cols() != layers[i - 1].weights.rows()) {
            throw DimensionMismatch("consecutive layer dimensions do not chain");
        }
    }
}

std::string norm_string(Norm n) {
    switch (n) {
        case Norm::l1: return "l1";
        case Norm::l2: return "l2";
        case Norm::linf: return "linf";
    }
    return "?";
}

Norm norm_from_string(const std::string& s) {
    if (s == "l1") return Norm::l1;
    if (s == "l2") return Norm::l2;
    if (s == "linf" || s == "inf") return Norm::linf;
    throw InvalidConfig("unknown norm: " + s);
}

double vector_norm(const std::vector<double>& v, Norm n) {
    double acc = 0.0;
    switch (n) {
        case Norm::l1:
            for (double x : v) {
                acc += std::abs(x);
            }
            return acc;
        case Norm::l2:
            for (double x : v) {
                acc += x * x;
            }
            return std::sqrt(acc);
        case Norm::linf:
            for (double x : v) {
                acc = std::max(acc, std::abs(x));
            }
            return acc;
    }
    return acc;
}

double induced_norm(const RealMatrix& w, Norm n) {
    switch (n) {
        case Norm::l1: {  // max column abs sum
            double best = 0.0;
            for (index_t j = 0; j < w.cols(); ++j) {
                double s = 0.0;
                for (index_t i = 0; i < w.rows(); ++i) {
                    s += std::abs(w(i, j));
                }
                best = std::max(best, s);
            }
            return best;
        }
        case Norm::linf: {  // max row abs sum
            double best = 0.0;
            for (index_t i = 0; i < w.rows(); ++i) {
                double s = 0.0;
                for (index_t j = 0; j < w.cols(); ++j) {
                    s += std::abs(w(i, j));
                }
                best = std::max(best, s);
            }
            return best;
        }
        case Norm::l2:
            return numerics::spectral_norm(w.to_complex());
    }
    return 0.0;
}

std::vector<double> forward(const DenseNet& net, const std::vector<double>& x) {
    net.validate();
    if (x.size() != net.input_dim()) {
        throw DimensionMismatch("input length does not match first layer");
    }
    std::vector<double> v = x;
    for (const auto& layer : net.layers) {
        std::vector<double> z = layer.weights.apply(v);
        for (index_t i = 0; i < z.size(); ++i) {
            z[i] = activation_apply(layer.activation, z[i] + layer.bias[i]);
        }
        v = std::move(z);
    }
    return v;
}

ClassicalBoundReport lip_product(const DenseNet& net, Norm norm) {
    net.validate();
    double bound = 1.0;
    for (const auto& layer : net.layers) {
        bound *= activation_lipschitz(layer.activation) * induced_norm(layer.weights, norm);
    }
    return {bound, norm, BoundMethod::product, std::nullopt, 0};
}

ClassicalBoundReport lip_sdp(const DenseNet& net, index_t budget) {
    net.validate();
    bool any_activated = false;
    for (const auto& layer : net.layers) {
        if (layer.activation != Activation::none) {
            any_activated = true;
        }
    }
    if (!any_activated) {
        throw UseProductBound("network has no sector-bounded activation; use lip_product");
    }

    double bound = 1.0;
    index_t worst_iters = 0;
    std::optional<std::vector<double>> multipliers;
    index_t i = 0;
    while (i < net.layers.size()) {
        const auto& layer = net.layers[i];
        if (layer.activation == Activation::none) {
            bound *= induced_norm(layer.weights, Norm::l2);
            ++i;
            continue;
        }
        // Pair with the next affine map, or an identity readout at the tail.
        const bool has_next = i + 1 < net.layers.size();
        SdpBlock blk;
        blk.w0 = layer.weights;
        blk.sector = activation_sector(layer.activation);
        blk.w1 = has_next ? net.layers[i + 1].weights : RealMatrix::identity(layer.weights.rows());
        blk.w1t_w1 = RealMatrix(blk.w1.cols(), blk.w1.cols());
        for (index_t r = 0; r < blk.w1.rows(); ++r) {
            for (index_t a = 0; a < blk.w1.cols(); ++a) {
                for (index_t b = 0; b < blk.w1.cols(); ++b) {
                    blk.w1t_w1(a, b) += blk.w1(r, a) * blk.w1(r, b);
                }
            }
        }
        const double s0 = induced_norm(blk.w0, Norm::l2);
        const double s1 = induced_norm(blk.w1, Norm::l2);
        blk.product_bound = activation_lipschitz(layer.activation) * s0 * s1;
        blk.t_star = std::max(s1 * s1, 1e-12);

        const BlockResult res = certify_block(blk, budget);
        bound *= res.gamma;
        if (has_next) {
            bound *= activation_lipschitz(net.layers[i + 1].activation);
        }
        worst_iters = std::max(worst_iters, res.iterations);
        multipliers = res.multipliers;
        i += has_next ? 2 : 1;
    }
    return {bound, Norm::l2, BoundMethod::sdp, multipliers, worst_iters};
}

ClassicalBoundReport lip_empirical(const DenseNet& net, index_t samples, std::uint64_t seed,
                                   Norm norm) {
    net.validate();
    if (samples < 1) {
        throw InvalidConfig("lip_empirical needs at least one sample");
    }
    double best = 0.0;
    for (index_t k = 0; k < samples; ++k) {
        Rng rng = Rng::stream(seed, k);
        best = std::max(best, empirical_pair_ratio(net, norm, rng));
    }
    return {best, norm, BoundMethod::empirical_lower, std::nullopt, 0};
}

std::string bound_method_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::sdp: return "sdp";
        case BoundMethod::product: return "product";
        case BoundMethod::empirical_lower: return "empirical_lower";
    }
    return "?";
}

}  // namespace qclip::classical
