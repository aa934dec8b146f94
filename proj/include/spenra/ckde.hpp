#pragma once

#include "spenra/series.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace spenra {

/// Standard normal density, the second-order Gaussian kernel.
[[nodiscard]] double kernel_value(double u) noexcept;
[[nodiscard]] double log_kernel_value(double u) noexcept;

/// Bandwidths k_1..k_{p+1} of the product kernel.
///
/// Storage order follows the delay block: k_1..k_p for the past lags from
/// oldest to newest, then k_{p+1} for the future. Reports use the table
/// order (k0, k-1, ..., k-p): future first, then lags from newest to oldest.
class Bandwidths {
public:
    explicit Bandwidths(std::vector<double> block_order);

    [[nodiscard]] static Bandwidths from_table_order(std::span<const double> table);
    [[nodiscard]] static Bandwidths uniform(std::size_t p, double k);

    [[nodiscard]] std::size_t order() const noexcept { return k_.size() - 1; }
    [[nodiscard]] std::span<const double> all() const noexcept { return k_; }
    [[nodiscard]] std::span<const double> past() const noexcept { return {k_.data(), k_.size() - 1}; }
    [[nodiscard]] double future() const noexcept { return k_.back(); }
    /// Bandwidth of lag j = 1..p, where lag 1 is the most recent past value.
    [[nodiscard]] double lag(std::size_t j) const;
    [[nodiscard]] std::vector<double> table_order() const;
    [[nodiscard]] Bandwidths scaled(double a) const;

    friend bool operator==(const Bandwidths&, const Bandwidths&) = default;

private:
    std::vector<double> k_;
};

/// Set of future indices t (1-based) withheld from the training blocks.
/// Stored as sorted, disjoint, closed intervals.
class LeaveOut {
public:
    LeaveOut() = default;

    [[nodiscard]] static LeaveOut none() { return {}; }
    [[nodiscard]] static LeaveOut single(std::size_t t) { return block(t, 0); }
    /// {t-l, ..., t+l}; indices below 1 are dropped.
    [[nodiscard]] static LeaveOut block(std::size_t t, std::size_t l);
    [[nodiscard]] static LeaveOut of(std::span<const std::size_t> indices);

    [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }
    [[nodiscard]] bool contains(std::size_t t) const noexcept;
    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& intervals() const noexcept {
        return intervals_;
    }

private:
    std::vector<std::pair<std::size_t, std::size_t>> intervals_;
};

/// Product-Gaussian-kernel conditional density estimator of order p.
///
/// Training blocks are the T-p delay pairs of the training series. The past
/// bandwidths are shared between the joint and the marginal estimators, so
/// the conditional density is a mixture of future kernels whose weights are
/// the normalized past-kernel values.
class ConditionalDensityModel {
public:
    ConditionalDensityModel(Series training, Bandwidths bandwidths);

    [[nodiscard]] std::size_t order() const noexcept { return k_.order(); }
    [[nodiscard]] const Series& training() const noexcept { return training_; }
    [[nodiscard]] const Bandwidths& bandwidths() const noexcept { return k_; }
    /// Number of training blocks, T - p.
    [[nodiscard]] std::size_t block_count() const noexcept { return training_.size() - order(); }
    [[nodiscard]] std::size_t retained_count(const LeaveOut& leave_out) const;

    /// Calls fn(t) for every retained future index t in p+1..T, ascending.
    template <class Fn>
    void for_each_retained(const LeaveOut& leave_out, Fn&& fn) const {
        const std::size_t first = order() + 1;
        const std::size_t last = training_.size();
        std::size_t t = first;
        for (const auto& [lo, hi] : leave_out.intervals()) {
            for (; t <= last && t < lo; ++t) fn(t);
            if (t <= hi) t = hi + 1;
        }
        for (; t <= last; ++t) fn(t);
    }

    /// log of the product past kernel between `past` and the block preceding
    /// future index t, without the normalizing constant.
    [[nodiscard]] double past_log_kernel(std::span<const double> past, std::size_t t) const noexcept;
    /// Normalizing constant of the product past kernel: -sum log k_j - p/2 log 2pi.
    [[nodiscard]] double past_log_normalizer() const noexcept { return past_log_norm_; }
    [[nodiscard]] double future_value(std::size_t t) const noexcept { return training_[t - 1]; }

private:
    Series training_;
    Bandwidths k_;
    std::vector<double> inv_past_;
    double past_log_norm_;
};

/// One-dimensional Gaussian mixture sum_i w_i N(center_i, bandwidth^2): the
/// predictive density induced by one specific past.
class PredictiveSlice {
public:
    PredictiveSlice(std::vector<double> weights, std::vector<double> centers, double future_bandwidth);

    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] std::span<const double> centers() const noexcept { return centers_; }
    [[nodiscard]] double future_bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }

    [[nodiscard]] double density(double y) const;
    [[nodiscard]] double log_density(double y) const;

private:
    std::vector<double> weights_;
    std::vector<double> centers_;
    double bandwidth_;
};

[[nodiscard]] double marginal_past_density(const ConditionalDensityModel& model, const HistoryBlock& past,
                                           const LeaveOut& leave_out = {});
[[nodiscard]] double joint_density(const ConditionalDensityModel& model, const HistoryBlock& past, double future,
                                   const LeaveOut& leave_out = {});

/// Log-weights below (max - 700) are dropped before normalization.
[[nodiscard]] PredictiveSlice predictive_slice(const ConditionalDensityModel& model, const HistoryBlock& past,
                                               const LeaveOut& leave_out = {});

/// log f(future | past), evaluated entirely in log space.
[[nodiscard]] double conditional_log_density(const ConditionalDensityModel& model, const HistoryBlock& past,
                                             double future, const LeaveOut& leave_out = {});

/// Numerically stable log(sum exp(x)); -inf for an empty or all -inf input.
[[nodiscard]] double log_sum_exp(std::span<const double> x) noexcept;

}  // namespace spenra
