#include "qclip/qlip.hpp"

#include <algorithm>
#include <cmath>

#include "qclip/numerics.hpp"
#include "qclip/rng.hpp"

namespace qclip::qlip {

namespace {

using quantum::CircuitSpec;
using quantum::DensityOperator;

constexpr index_t kOutcomeCap = 16;
constexpr double kZeroBound = 1e-12;

std::vector<cplx> eig_column(const ComplexMatrix& v, index_t col) {
    std::vector<cplx> out(v.rows());
    for (index_t i = 0; i < v.rows(); ++i) {
        out[i] = v(i, col);
    }
    return out;
}

double objective(const std::vector<ComplexMatrix>& obs, const ComplexMatrix& delta) {
    double f = 0.0;
    for (const auto& a : obs) {
        f += std::abs(quantum::herm_trace_product(a, delta));
    }
    return f;
}

// Project onto {Hermitian, trace 0} and rescale onto the unit trace-norm
// sphere (the objective is scale-linear, so the optimum lives there).
// Returns false when the input collapses to zero.
bool project_traceless_unit(ComplexMatrix& delta) {
    delta = (delta + delta.adjoint()) * cplx{0.5, 0.0};
    const auto eig = numerics::herm_eig(delta);
    const index_t n = delta.rows();
    double mean = 0.0;
    for (double l : eig.eigenvalues) {
        mean += l;
    }
    mean /= static_cast<double>(n);
    double norm1 = 0.0;
    std::vector<double> lam(n);
    for (index_t i = 0; i < n; ++i) {
        lam[i] = eig.eigenvalues[i] - mean;
        norm1 += std::abs(lam[i]);
    }
    if (norm1 <= kZeroBound) {
        return false;
    }
    ComplexMatrix diag(n, n);
    for (index_t i = 0; i < n; ++i) {
        diag(i, i) = lam[i] / norm1;
    }
    delta = eig.eigenvectors * diag * eig.eigenvectors.adjoint();
    return true;
}

// Split a traceless Delta into the normalized pair (tau+/tr, tau-/tr); the
// pair's TV / trace-distance ratio equals the objective at Delta / ||Delta||_1.
std::optional<std::pair<DensityOperator, DensityOperator>> witness_from_delta(
    const ComplexMatrix& delta) {
    const auto eig = numerics::herm_eig(delta);
    const index_t n = delta.rows();
    ComplexMatrix pos(n, n);
    ComplexMatrix neg(n, n);
    double tr_pos = 0.0;
    double tr_neg = 0.0;
    for (index_t i = 0; i < n; ++i) {
        const double l = eig.eigenvalues[i];
        if (l > 0.0) {
            pos(i, i) = l;
            tr_pos += l;
        } else if (l < 0.0) {
            neg(i, i) = -l;
            tr_neg += -l;
        }
    }
    if (tr_pos <= kZeroBound || tr_neg <= kZeroBound) {
        return std::nullopt;
    }
    const ComplexMatrix v = eig.eigenvectors;
    ComplexMatrix rho = v * (pos * cplx{1.0 / tr_pos, 0.0}) * v.adjoint();
    ComplexMatrix sigma = v * (neg * cplx{1.0 / tr_neg, 0.0}) * v.adjoint();
    return std::make_pair(DensityOperator{std::move(rho)}, DensityOperator{std::move(sigma)});
}

void check_report_invariants(const QuantumBoundReport& r,
                             const std::vector<ComplexMatrix>& obs, double ratio_tol) {
    if (r.k_star < 0.0 || r.k_star > 1.0 + 1e-9) {
        throw NumericFailure("K* = " + std::to_string(r.k_star) + " escapes [0, 1]");
    }
    if (r.witness.has_value()) {
        const auto& [rho, sigma] = *r.witness;
        const double d = quantum::trace_distance(rho, sigma);
        if (d <= kZeroBound) {
            throw NumericFailure("degenerate witness pair");
        }
        const double tv = quantum::total_variation(quantum::probs_from_observables(obs, rho),
                                                   quantum::probs_from_observables(obs, sigma));
        if (tv / d > r.k_star + 1e-8 || tv / d < r.k_star - ratio_tol) {
            throw NumericFailure("witness ratio " + std::to_string(tv / d) +
                                 " does not reproduce K* = " + std::to_string(r.k_star));
        }
    }
}

}  // namespace

std::string method_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::subgradient: return "subgradient";
        case Method::sampling: return "sampling";
    }
    return "?";
}

QuantumBoundReport lipschitz_exact(const CircuitSpec& c) {
    const auto obs = quantum::heisenberg_observables(c);
    const index_t m = obs.size();
    if (m > kOutcomeCap) {
        throw OutcomeLimitExceeded("exact method supports at most " + std::to_string(kOutcomeCap) +
                                   " outcomes, got " + std::to_string(m));
    }

    double best_spread = -1.0;
    std::vector<int> best_signs;
    ComplexMatrix best_h;
    // s and -s give the same spread, so the first component stays +1.
    const index_t patterns = index_t{1} << (m - 1);
    for (index_t mask = 0; mask < patterns; ++mask) {
        std::vector<int> signs(m, 1);
        for (index_t i = 1; i < m; ++i) {
            if (mask & (index_t{1} << (i - 1))) {
                signs[i] = -1;
            }
        }
        ComplexMatrix h = obs[0];
        for (index_t i = 1; i < m; ++i) {
            h = signs[i] > 0 ? h + obs[i] : h - obs[i];
        }
        const auto eig = numerics::herm_eig(h);
        const double spread = eig.eigenvalues.back() - eig.eigenvalues.front();
        if (spread > best_spread) {
            best_spread = spread;
            best_signs = std::move(signs);
            best_h = std::move(h);
        }
    }

    QuantumBoundReport report;
    report.k_star = 0.5 * best_spread;
    report.method = Method::exact;
    report.sign_pattern = best_signs;
    if (report.k_star > kZeroBound) {
        const auto eig = numerics::herm_eig(best_h);
        const auto u = eig_column(eig.eigenvectors, eig.eigenvectors.cols() - 1);
        const auto v = eig_column(eig.eigenvectors, 0);
        report.witness = std::make_pair(DensityOperator{outer(u, u)}, DensityOperator{outer(v, v)});
    }
    check_report_invariants(report, obs, 1e-8);
    return report;
}

QuantumBoundReport lipschitz_subgradient(const CircuitSpec& c, index_t iters, std::uint64_t seed) {
    const auto obs = quantum::heisenberg_observables(c);
    const index_t n = c.dim();
    constexpr int kRestarts = 5;
    constexpr double kStepScale = 0.1;

    double best_value = 0.0;
    ComplexMatrix best_delta;

    for (int restart = 0; restart < kRestarts; ++restart) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(restart));
        ComplexMatrix delta(n, n);
        for (index_t i = 0; i < n; ++i) {
            for (index_t j = 0; j < n; ++j) {
                delta(i, j) = {rng.normal(), rng.normal()};
            }
        }
        if (!project_traceless_unit(delta)) {
            continue;
        }
        for (index_t t = 1; t <= iters; ++t) {
            const double f = objective(obs, delta);
            if (f > best_value) {
                best_value = f;
                best_delta = delta;
            }
            // Subgradient of sum_i |tr(A_i Delta)|.
            ComplexMatrix grad(n, n);
            for (const auto& a : obs) {
                const double inner = quantum::herm_trace_product(a, delta);
                if (inner > 0.0) {
                    grad = grad + a;
                } else if (inner < 0.0) {
                    grad = grad - a;
                }
            }
            const double step = kStepScale / std::sqrt(static_cast<double>(t));
            delta = delta + grad * cplx{step, 0.0};
            if (!project_traceless_unit(delta)) {
                break;
            }
        }
        const double f = objective(obs, delta);
        if (f > best_value) {
            best_value = f;
            best_delta = delta;
        }
    }

    QuantumBoundReport report;
    report.k_star = best_value;
    report.method = Method::subgradient;
    if (best_value > kZeroBound) {
        report.witness = witness_from_delta(best_delta);
        std::vector<int> signs;
        signs.reserve(obs.size());
        for (const auto& a : obs) {
            signs.push_back(quantum::herm_trace_product(a, best_delta) >= 0.0 ? 1 : -1);
        }
        report.sign_pattern = std::move(signs);
    }
    check_report_invariants(report, obs, 1e-8);
    return report;
}

QuantumBoundReport lipschitz_sampling(const CircuitSpec& c, index_t pairs, std::uint64_t seed) {
    if (pairs < 1) {
        throw InvalidConfig("lipschitz_sampling needs at least one pair");
    }
    const auto obs = quantum::heisenberg_observables(c);
    const index_t dim = c.dim();

    QuantumBoundReport report;
    report.method = Method::sampling;
    for (index_t i = 0; i < pairs; ++i) {
        const auto rho = quantum::random_pure_state(dim, Rng::derive(seed, 2 * i));
        const auto sigma = quantum::random_pure_state(dim, Rng::derive(seed, 2 * i + 1));
        const double d = quantum::trace_distance(rho, sigma);
        if (d <= 1e-12) {
            continue;
        }
        const double tv = quantum::total_variation(quantum::probs_from_observables(obs, rho),
                                                   quantum::probs_from_observables(obs, sigma));
        if (tv / d > report.k_star) {
            report.k_star = tv / d;
            report.witness = std::make_pair(rho, sigma);
        }
    }
    check_report_invariants(report, obs, 1e-8);
    return report;
}

}  // namespace qclip::qlip
