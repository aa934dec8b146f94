#include "spenra/classic.hpp"

#include "spenra/error.hpp"

#include <cmath>
#include <limits>
#include <span>

namespace spenra {
namespace {

void check_tolerance(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "tolerance r must be positive");
}

bool within(std::span<const double> v, std::size_t a, std::size_t b, std::size_t m, double r) {
    for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(v[a + k] - v[b + k]) > r) return false;
    }
    return true;
}

/// Number of vectors (self included) within r of each of the first n
/// length-m embedding vectors.
std::vector<std::size_t> match_counts(std::span<const double> v, std::size_t m, double r) {
    const std::size_t n = v.size() - m + 1;
    std::vector<std::size_t> counts(n, 1);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (within(v, a, b, m, r)) {
                ++counts[a];
                ++counts[b];
            }
        }
    }
    return counts;
}

}  // namespace

void ApEnParams::validate() const {
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    check_tolerance(r);
    if (length < p + 1) throw Error(ErrorCode::TooShort, "series shorter than p+1");
}

std::vector<double> correlation_counts(const Series& s, std::size_t p, double r) {
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    check_tolerance(r);
    if (s.size() < p) throw Error(ErrorCode::TooShort, "series shorter than the embedding dimension");
    const auto counts = match_counts(s.values(), p, r);
    const double n = static_cast<double>(counts.size());
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
    return out;
}

double phi(const Series& s, std::size_t p, double r) {
    const auto c = correlation_counts(s, p, r);
    double total = 0.0;
    for (double x : c) total += std::log(x);
    return total / static_cast<double>(c.size());
}

double apen(const Series& s, std::size_t p, double r) {
    ApEnParams{p, r, s.size()}.validate();
    if (s.size() < p + 2) throw Error(ErrorCode::TooShort, "ApEn needs T >= p+2");
    return phi(s, p, r) - phi(s, p + 1, r);
}

double sampen(const Series& s, std::size_t p, double r) {
    ApEnParams{p, r, s.size()}.validate();
    if (s.size() < p + 2) throw Error(ErrorCode::TooShort, "SampEn needs T >= p+2");
    const auto v = s.values();
    const std::size_t n = s.size() - p;  // templates considered at both lengths
    std::size_t b_matches = 0;
    std::size_t a_matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (within(v, i, j, p, r)) {
                ++b_matches;
                if (std::abs(v[i + p] - v[j + p]) <= r) ++a_matches;
            }
        }
    }
    if (b_matches == 0 || a_matches == 0) {
        throw Error(ErrorCode::NoMatches, "no template pairs match at length " +
                                              std::to_string(b_matches == 0 ? p : p + 1) +
                                              " within r; increase r");
    }
    return -std::log(static_cast<double>(a_matches) / static_cast<double>(b_matches));
}

double phi_normalized(const Series& s, std::size_t p, double r) {
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    check_tolerance(r);
    if (s.size() < p) throw Error(ErrorCode::TooShort, "series shorter than the embedding dimension");
    const auto v = s.values();
    const std::size_t n = v.size() - p + 1;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_width = 1.0 / (2.0 * r);
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        // f_hat(X_a) = (1/n) sum_b prod_i (2r)^{-1} 1[|X_{a+i} - X_{b+i}| <= r]
        double density = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            double kernel = 1.0;
            for (std::size_t i = 0; i < p; ++i) {
                kernel *= std::abs(v[a + i] - v[b + i]) <= r ? inv_width : 0.0;
            }
            density += kernel;
        }
        total += std::log(density * inv_n);
    }
    return total * inv_n;
}

double loo_joint_entropy_uniform(const Series& s, std::size_t m, double r, IsolatedPolicy policy) {
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    check_tolerance(r);
    if (s.size() < m + 1) throw Error(ErrorCode::TooShort, "need at least two embedding vectors");
    const auto counts = match_counts(s.values(), m, r);
    const double n = static_cast<double>(counts.size());
    const double log_norm = std::log(n - 1.0) + static_cast<double>(m) * std::log(2.0 * r);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::size_t others = counts[i] - 1;
        if (others == 0) {
            if (policy == IsolatedPolicy::Skip) continue;
            throw Error(ErrorCode::IsolatedVector, "embedding vector " + std::to_string(i + 1) + " (length " +
                                                       std::to_string(m) + ") has no neighbour within r");
        }
        total += std::log(static_cast<double>(others)) - log_norm;
        ++used;
    }
    if (used == 0) {
        throw Error(ErrorCode::IsolatedVector, "every length-" + std::to_string(m) + " vector is isolated");
    }
    return -total / static_cast<double>(used);
}

double loo_entropy_rate_uniform(const Series& s, std::size_t p, double r, IsolatedPolicy policy) {
    ApEnParams{p, r, s.size()}.validate();
    if (s.size() < p + 2) throw Error(ErrorCode::TooShort, "entropy rate needs T >= p+2");
    return loo_joint_entropy_uniform(s, p + 1, r, policy) - loo_joint_entropy_uniform(s, p, r, policy);
}

double plugin_entropy_rate_uniform(const Series& s, std::size_t p, double r) {
    ApEnParams{p, r, s.size()}.validate();
    if (s.size() < p + 2) throw Error(ErrorCode::TooShort, "entropy rate needs T >= p+2");
    return phi_normalized(s, p, r) - phi_normalized(s, p + 1, r);
}

}  // namespace spenra
