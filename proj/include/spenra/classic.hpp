#pragma once

#include "spenra/series.hpp"

#include <cstddef>
#include <vector>

namespace spenra {

/// Embedding dimension p, tolerance r (data units) and series length T of
/// the Approximate Entropy family.
struct ApEnParams {
    std::size_t p;
    double r;
    std::size_t length;

    void validate() const;
};

/// C_t^{(p)}(r) for each of the T-p+1 embedding vectors: the fraction of
/// vectors (self included) within sup-norm distance r.
[[nodiscard]] std::vector<double> correlation_counts(const Series& s, std::size_t p, double r);

/// Phi^{(p)}(r): mean of log C_t^{(p)}(r).
[[nodiscard]] double phi(const Series& s, std::size_t p, double r);

/// ApEn(p, r, T) = Phi^{(p)}(r) - Phi^{(p+1)}(r).
[[nodiscard]] double apen(const Series& s, std::size_t p, double r);

/// Sample Entropy, -log(A/B), with A and B the numbers of template pairs
/// (self-matches excluded) matching at lengths p+1 and p among the first
/// T-p templates. Conventional defaults are p = 2, r = 0.2 * sample std.
/// Throws NoMatches when A or B is zero.
[[nodiscard]] double sampen(const Series& s, std::size_t p, double r);

/// Phi computed from the normalized uniform-product-kernel density estimate
/// (2r)^{-p} C_t^{(p)}(r). Equals Phi^{(p)}(r) - p log(2r).
[[nodiscard]] double phi_normalized(const Series& s, std::size_t p, double r);

enum class IsolatedPolicy { Error, Skip };

/// Leave-one-out estimate of the joint differential entropy of the length-m
/// embedding vectors with the normalized uniform product kernel.
[[nodiscard]] double loo_joint_entropy_uniform(const Series& s, std::size_t m, double r,
                                               IsolatedPolicy policy = IsolatedPolicy::Error);

/// Finite-order entropy rate h[X_{p+1} | X_1..X_p] as the difference of the
/// leave-one-out joint entropies at orders p+1 and p. Throws IsolatedVector
/// when a vector has no neighbour besides itself, unless policy is Skip, in
/// which case such vectors are dropped from that order's average.
[[nodiscard]] double loo_entropy_rate_uniform(const Series& s, std::size_t p, double r,
                                              IsolatedPolicy policy = IsolatedPolicy::Error);

/// The same difference with self-matches kept (plug-in, no leave-out). Equals
/// apen(s, p, r) + log(2r).
[[nodiscard]] double plugin_entropy_rate_uniform(const Series& s, std::size_t p, double r);

}  // namespace spenra
