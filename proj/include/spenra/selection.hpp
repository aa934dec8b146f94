#pragma once

#include "spenra/ckde.hpp"
#include "spenra/nelder_mead.hpp"
#include "spenra/series.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spenra {

/// Per-t pieces of the l-block cross-validation score.
struct CvBreakdown {
    std::vector<double> neg_log_density;  ///< -log f_{-t:l}(X_t | past), t = p+1..T
    std::vector<std::size_t> retained;    ///< training blocks kept at each t
    double score;                         ///< mean of neg_log_density
};

/// CV_l(p, k) = -(1/(T-p)) sum_t log f_{-t:l}(X_t | X_{t-p}^{t-1}).
///
/// The withheld window {t-l..t+l} is clipped to the valid future indices
/// p+1..T. Requires T - p - (2l+1) >= 8. l = 0 is leave-one-out.
[[nodiscard]] double cv_score(const Series& s, const Bandwidths& k, std::size_t l);
[[nodiscard]] CvBreakdown cv_breakdown(const Series& s, const Bandwidths& k, std::size_t l);

struct BandwidthSearchOptions {
    std::size_t random_starts = 2;
    NelderMeadOptions nelder_mead{};
    /// Box for every bandwidth, as multiples of the sample standard deviation.
    double min_scale = 1e-4;
    double max_scale = 1e3;
    /// Padding used for the new (oldest) lag when warm-starting from order p-1.
    double warm_start_pad_scale = 100.0;
};

struct BandwidthFit {
    Bandwidths bandwidths;
    double cv0;
    std::size_t evaluations;
};

/// Multistart Nelder-Mead on the box-transformed log10 bandwidths, minimizing
/// the leave-one-out score at order p. Deterministic for a given seed.
/// `warm_start` (order p-1 optimum) replaces the last random start.
[[nodiscard]] BandwidthFit optimize_bandwidths(const Series& s, std::size_t p, std::uint64_t seed,
                                               const BandwidthSearchOptions& options = {},
                                               const std::optional<Bandwidths>& warm_start = std::nullopt);

struct OrderRecord {
    std::size_t order;
    Bandwidths bandwidths;
    double cv0;
    double cvl;
    std::vector<bool> smoothed_out;  ///< index j-1 for lag j = 1..p (lag 1 = most recent)
};

struct SelectionReport {
    std::vector<OrderRecord> records;
    std::size_t chosen_order;
    std::size_t block_half_width;
    double smoothed_out_threshold;

    [[nodiscard]] const OrderRecord& chosen() const;
    [[nodiscard]] const OrderRecord& at(std::size_t p) const;
};

[[nodiscard]] double smoothed_out_threshold(const Series& s, const EstimationConfig& config);

/// Order with the smallest l-block score; ties go to the smaller order.
[[nodiscard]] std::size_t choose_order(std::span<const OrderRecord> records);

using SelectionProgress = std::function<void(const OrderRecord&)>;

/// Sweeps p = 1..max_order: fit bandwidths by leave-one-out CV, score each
/// order by l-block CV, choose the minimum (ties to the smaller order).
[[nodiscard]] SelectionReport select_order(const Series& s, const EstimationConfig& config,
                                           const BandwidthSearchOptions& options = {},
                                           const SelectionProgress& progress = {});

/// Table-style CSV: p,k0,k-1,...,k-P,cv0,cvl. Smoothed-out lags are empty
/// cells. Ends with a `# chosen_order=` comment.
void write_selection_csv(std::ostream& out, const SelectionReport& report);

}  // namespace spenra
