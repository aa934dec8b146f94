#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spenra {

/// A finite scalar time series, optionally carrying event times.
///
/// Values are indexed t = 1..T in reported output; storage is 0-based.
/// Timestamps, when present, are strictly increasing and have the same length
/// as the values. They are never used by the estimators themselves, only by
/// time-windowed summaries and output.
class Series {
public:
    explicit Series(std::vector<double> values,
                    std::optional<std::vector<double>> timestamps = std::nullopt,
                    std::string label = {});

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] bool has_timestamps() const noexcept { return timestamps_.has_value(); }
    [[nodiscard]] std::span<const double> timestamps() const;
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Copy with every value multiplied by `a` (timestamps untouched).
    [[nodiscard]] Series scaled(double a) const;
    /// Copy with `c` added to every value (timestamps untouched).
    [[nodiscard]] Series shifted(double c) const;

private:
    std::vector<double> values_;
    std::optional<std::vector<double>> timestamps_;
    std::string label_;
};

/// A length-p past, oldest first.
class HistoryBlock {
public:
    explicit HistoryBlock(std::vector<double> past, std::optional<std::size_t> origin_index = std::nullopt);

    [[nodiscard]] std::size_t order() const noexcept { return past_.size(); }
    [[nodiscard]] std::span<const double> past() const noexcept { return past_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return past_[i]; }
    /// 1-based index t of the value this past precedes, when taken from a series.
    [[nodiscard]] std::optional<std::size_t> origin_index() const noexcept { return origin_; }

private:
    std::vector<double> past_;
    std::optional<std::size_t> origin_;
};

struct DelayPair {
    HistoryBlock past;
    double future;
};

/// All T-p (past, future) pairs of order p. Pair j has past = values[j..j+p-1]
/// and future = values[j+p], with origin index t = j+p+1 (1-based).
[[nodiscard]] std::vector<DelayPair> delay_blocks(const Series& s, std::size_t p);

struct SummaryStats {
    double mean;
    double std;  ///< unbiased (n-1) denominator
    double min;
    double max;
};

[[nodiscard]] SummaryStats summary_stats(const Series& s);
[[nodiscard]] double sample_std(std::span<const double> values);

struct EstimationConfig {
    std::size_t max_order = 12;
    std::size_t block_half_width = 50;
    /// A lag counts as smoothed out when its bandwidth is at least
    /// max(smoothed_out_floor, smoothed_out_multiplier * sample std).
    double smoothed_out_multiplier = 5.0;
    double smoothed_out_floor = 5.0;
    std::uint64_t rng_seed = 0;
    double quadrature_abs_tol = 1e-6;

    /// Throws InvalidArgument / InsufficientData when unusable for a series of length T.
    void validate(std::size_t series_length) const;
};

}  // namespace spenra
