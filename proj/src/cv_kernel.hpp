#pragma once

#include <cstddef>
#include <span>

namespace spenra::detail {

struct IndexRange {
    std::size_t begin;
    std::size_t end;
};

struct LogSums {
    double past;
    double joint;
};

/// With a = -acc/2 and c = a - ((xf - fut)*inv_future)^2/2 over the given ranges,
/// returns log sum exp(a) and log sum exp(c).
LogSums row_log_sums(const double* acc, const double* fut, std::span<const IndexRange> ranges, double xf,
                     double inv_future);

/// Unshifted sums over retained pairs, for every block row i of the delay
/// embedding of `v` at order p (n = T - p rows):
///   past[i]  = sum_j exp(-D_ij/2),  joint[i] = sum_j exp(-(D_ij + F_ij)/2)
/// with D the scaled squared past distance and F the scaled squared future
/// distance, over rows j with |i - j| > l. Terms below exp(-700) are dropped,
/// so callers must recheck rows whose sums are tiny.
void symmetric_exp_sums(const double* v, std::size_t p, std::size_t n, std::size_t l, const double* inv_past,
                        double inv_future, double* past, double* joint);

}  // namespace spenra::detail
