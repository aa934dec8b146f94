#include "cv_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

// Built with vector math enabled so the exponentials map onto the SIMD library.
namespace spenra::detail {
namespace {

// Shifted exponents below this contribute nothing at double precision.
constexpr double kCut = -700.0;
constexpr double kJointFloor = 1e-200;

struct PairSums {
    double past = 0.0;
    double joint = 0.0;
};

/// Sums of exp(a - shift) and exp(c - shift) in one pass.
PairSums shifted_sums(const double* acc, const double* fut, std::span<const IndexRange> ranges, double xf,
                      double inv_future, double shift) {
    PairSums total;
    for (const auto& r : ranges) {
        double s1 = 0.0;
        double s2 = 0.0;
#pragma omp simd reduction(+ : s1, s2)
        for (std::size_t j = r.begin; j < r.end; ++j) {
            const double d = (xf - fut[j]) * inv_future;
            const double a = -0.5 * acc[j] - shift;
            const double c = a - 0.5 * d * d;
            // Clamp first: far-negative inputs take a slow path in the vector exp.
            const double ea = std::exp(std::max(a, kCut));
            const double ec = std::exp(std::max(c, kCut));
            s1 += a > kCut ? ea : 0.0;
            s2 += c > kCut ? ec : 0.0;
        }
        total.past += s1;
        total.joint += s2;
    }
    return total;
}

double shifted_joint_sum(const double* acc, const double* fut, std::span<const IndexRange> ranges, double xf,
                         double inv_future, double shift) {
    double total = 0.0;
    for (const auto& r : ranges) {
        double s = 0.0;
#pragma omp simd reduction(+ : s)
        for (std::size_t j = r.begin; j < r.end; ++j) {
            const double d = (xf - fut[j]) * inv_future;
            const double c = -0.5 * (acc[j] + d * d) - shift;
            const double e = std::exp(std::max(c, kCut));
            s += c > kCut ? e : 0.0;
        }
        total += s;
    }
    return total;
}

}  // namespace

LogSums row_log_sums(const double* acc, const double* fut, std::span<const IndexRange> ranges, double xf,
                     double inv_future) {
    double min_acc = std::numeric_limits<double>::max();
    for (const auto& r : ranges) {
        double m = min_acc;
#pragma omp simd reduction(min : m)
        for (std::size_t j = r.begin; j < r.end; ++j) m = std::min(m, acc[j]);
        min_acc = m;
    }
    const double ma = -0.5 * min_acc;
    const auto sums = shifted_sums(acc, fut, ranges, xf, inv_future, ma);
    if (sums.joint >= kJointFloor) return {ma + std::log(sums.past), ma + std::log(sums.joint)};

    double min_c = std::numeric_limits<double>::max();
    for (const auto& r : ranges) {
        double m = min_c;
#pragma omp simd reduction(min : m)
        for (std::size_t j = r.begin; j < r.end; ++j) {
            const double d = (xf - fut[j]) * inv_future;
            m = std::min(m, acc[j] + d * d);
        }
        min_c = m;
    }
    const double mc = -0.5 * min_c;
    return {ma + std::log(sums.past), mc + std::log(shifted_joint_sum(acc, fut, ranges, xf, inv_future, mc))};
}

void symmetric_exp_sums(const double* v, std::size_t p, std::size_t n, std::size_t l, const double* inv_past,
                        double inv_future, double* past, double* joint) {
    // Rows are grouped in fixed chunks, each with private column sums that are
    // reduced in chunk order, so the result does not depend on the thread count.
    constexpr std::size_t kChunk = 32;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> col_past(chunks * n, 0.0);
    std::vector<double> col_joint(chunks * n, 0.0);
    const auto signed_chunks = static_cast<std::ptrdiff_t>(chunks);
    const double* fut = v + p;

#pragma omp parallel
    {
        std::vector<double> acc(n);
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t sc = 0; sc < signed_chunks; ++sc) {
            const auto c = static_cast<std::size_t>(sc);
            double* cp = col_past.data() + c * n;
            double* cj = col_joint.data() + c * n;
            const std::size_t row_end = std::min(n, (c + 1) * kChunk);
            for (std::size_t i = c * kChunk; i < row_end; ++i) {
                const std::size_t begin = std::min(n, i + l + 1);
                std::fill(acc.begin() + begin, acc.end(), 0.0);
                for (std::size_t m = 0; m < p; ++m) {
                    const double x = v[i + m];
                    const double ik = inv_past[m];
                    const double* col = v + m;
#pragma omp simd
                    for (std::size_t j = begin; j < n; ++j) {
                        const double d = (x - col[j]) * ik;
                        acc[j] += d * d;
                    }
                }
                const double xf = fut[i];
                double r1 = 0.0;
                double r2 = 0.0;
#pragma omp simd reduction(+ : r1, r2)
                for (std::size_t j = begin; j < n; ++j) {
                    const double d = (xf - fut[j]) * inv_future;
                    const double a = -0.5 * acc[j];
                    const double b = a - 0.5 * d * d;
                    const double ea = a > kCut ? std::exp(std::max(a, kCut)) : 0.0;
                    const double eb = b > kCut ? std::exp(std::max(b, kCut)) : 0.0;
                    r1 += ea;
                    r2 += eb;
                    cp[j] += ea;
                    cj[j] += eb;
                }
                past[i] = r1;
                joint[i] = r2;
            }
        }
    }

    for (std::size_t c = 0; c < chunks; ++c) {
        const double* cp = col_past.data() + c * n;
        const double* cj = col_joint.data() + c * n;
        for (std::size_t j = 0; j < n; ++j) {
            past[j] += cp[j];
            joint[j] += cj[j];
        }
    }
}

}  // namespace spenra::detail
