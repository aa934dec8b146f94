#include "spenra/ckde.hpp"

#include "spenra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spenra {
namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;  // log(sqrt(2 pi))
constexpr double kDropBelowMax = 700.0;

void check_past(const ConditionalDensityModel& model, const HistoryBlock& past) {
    if (past.order() != model.order()) {
        throw Error(ErrorCode::InvalidArgument, "history block has order " + std::to_string(past.order()) +
                                                    ", model has order " + std::to_string(model.order()));
    }
}

/// Unnormalized past log-kernels for every retained block, plus their indices.
void retained_log_weights(const ConditionalDensityModel& model, const HistoryBlock& past, const LeaveOut& leave_out,
                          std::vector<double>& log_w, std::vector<std::size_t>& index) {
    check_past(model, past);
    log_w.clear();
    index.clear();
    log_w.reserve(model.block_count());
    index.reserve(model.block_count());
    model.for_each_retained(leave_out, [&](std::size_t t) {
        log_w.push_back(model.past_log_kernel(past.past(), t));
        index.push_back(t);
    });
    if (log_w.empty()) {
        throw Error(ErrorCode::EmptyAfterLeaveOut, "every training block was left out");
    }
}

}  // namespace

double kernel_value(double u) noexcept { return std::exp(-0.5 * u * u - kLogSqrtTwoPi); }

double log_kernel_value(double u) noexcept { return -0.5 * u * u - kLogSqrtTwoPi; }

double log_sum_exp(std::span<const double> x) noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

// ---------------------------------------------------------------------------
// Bandwidths

Bandwidths::Bandwidths(std::vector<double> block_order) : k_(std::move(block_order)) {
    if (k_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need p+1 >= 2 bandwidths");
    }
    for (double k : k_) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive and finite");
        }
    }
}

Bandwidths Bandwidths::from_table_order(std::span<const double> table) {
    if (table.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need k0 and at least one lag bandwidth");
    }
    std::vector<double> k(table.size());
    // table = (k0, k-1, ..., k-p); block order = (k-p, ..., k-1, k0)
    std::reverse_copy(table.begin() + 1, table.end(), k.begin());
    k.back() = table[0];
    return Bandwidths(std::move(k));
}

Bandwidths Bandwidths::uniform(std::size_t p, double k) { return Bandwidths(std::vector<double>(p + 1, k)); }

double Bandwidths::lag(std::size_t j) const {
    if (j == 0 || j > order()) {
        throw Error(ErrorCode::InvalidArgument, "lag " + std::to_string(j) + " outside 1.." + std::to_string(order()));
    }
    return k_[order() - j];
}

std::vector<double> Bandwidths::table_order() const {
    std::vector<double> out;
    out.reserve(k_.size());
    out.push_back(future());
    for (std::size_t j = 1; j <= order(); ++j) out.push_back(lag(j));
    return out;
}

Bandwidths Bandwidths::scaled(double a) const {
    std::vector<double> k(k_);
    for (auto& x : k) x *= a;
    return Bandwidths(std::move(k));
}

// ---------------------------------------------------------------------------
// LeaveOut

LeaveOut LeaveOut::block(std::size_t t, std::size_t l) {
    LeaveOut out;
    out.intervals_.emplace_back(t > l ? t - l : 1, t + l);
    return out;
}

LeaveOut LeaveOut::of(std::span<const std::size_t> indices) {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    LeaveOut out;
    for (std::size_t t : sorted) {
        if (!out.intervals_.empty() && out.intervals_.back().second + 1 == t) {
            out.intervals_.back().second = t;
        } else {
            out.intervals_.emplace_back(t, t);
        }
    }
    return out;
}

bool LeaveOut::contains(std::size_t t) const noexcept {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [t](const auto& iv) { return iv.first <= t && t <= iv.second; });
}

// ---------------------------------------------------------------------------
// ConditionalDensityModel

ConditionalDensityModel::ConditionalDensityModel(Series training, Bandwidths bandwidths)
    : training_(std::move(training)), k_(std::move(bandwidths)) {
    if (k_.order() + 1 > training_.size()) {
        throw Error(ErrorCode::OrderTooLarge, "order " + std::to_string(k_.order()) + " needs at least " +
                                                  std::to_string(k_.order() + 1) + " training values");
    }
    inv_past_.reserve(k_.order());
    past_log_norm_ = -static_cast<double>(k_.order()) * kLogSqrtTwoPi;
    for (double k : k_.past()) {
        inv_past_.push_back(1.0 / k);
        past_log_norm_ -= std::log(k);
    }
}

std::size_t ConditionalDensityModel::retained_count(const LeaveOut& leave_out) const {
    std::size_t n = 0;
    for_each_retained(leave_out, [&n](std::size_t) { ++n; });
    return n;
}

double ConditionalDensityModel::past_log_kernel(std::span<const double> past, std::size_t t) const noexcept {
    const std::size_t p = order();
    const auto v = training_.values();
    const std::size_t start = t - 1 - p;
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double u = (past[j] - v[start + j]) * inv_past_[j];
        acc += u * u;
    }
    return -0.5 * acc;
}

// ---------------------------------------------------------------------------
// PredictiveSlice

PredictiveSlice::PredictiveSlice(std::vector<double> weights, std::vector<double> centers, double future_bandwidth)
    : weights_(std::move(weights)), centers_(std::move(centers)), bandwidth_(future_bandwidth) {
    if (weights_.empty() || weights_.size() != centers_.size()) {
        throw Error(ErrorCode::InvalidArgument, "slice needs equally many (>= 1) weights and centers");
    }
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
        throw Error(ErrorCode::InvalidArgument, "future bandwidth must be positive and finite");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0) || !std::isfinite(centers_[i])) {
            throw Error(ErrorCode::InvalidArgument, "slice weights must be nonnegative and centers finite");
        }
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "slice weights must sum to 1");
    }
}

double PredictiveSlice::density(double y) const {
    double s = 0.0;
    const double inv = 1.0 / bandwidth_;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        s += weights_[i] * kernel_value((y - centers_[i]) * inv);
    }
    return s * inv;
}

double PredictiveSlice::log_density(double y) const {
    std::vector<double> terms(weights_.size());
    const double inv = 1.0 / bandwidth_;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        terms[i] = std::log(weights_[i]) + log_kernel_value((y - centers_[i]) * inv);
    }
    return log_sum_exp(terms) - std::log(bandwidth_);
}

// ---------------------------------------------------------------------------
// Estimators

double marginal_past_density(const ConditionalDensityModel& model, const HistoryBlock& past,
                             const LeaveOut& leave_out) {
    std::vector<double> log_w;
    std::vector<std::size_t> index;
    retained_log_weights(model, past, leave_out, log_w, index);
    const double n = static_cast<double>(log_w.size());
    return std::exp(log_sum_exp(log_w) + model.past_log_normalizer() - std::log(n));
}

double joint_density(const ConditionalDensityModel& model, const HistoryBlock& past, double future,
                     const LeaveOut& leave_out) {
    std::vector<double> log_w;
    std::vector<std::size_t> index;
    retained_log_weights(model, past, leave_out, log_w, index);
    const double kf = model.bandwidths().future();
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        log_w[i] += log_kernel_value((future - model.future_value(index[i])) / kf);
    }
    const double n = static_cast<double>(log_w.size());
    return std::exp(log_sum_exp(log_w) + model.past_log_normalizer() - std::log(kf) - std::log(n));
}

PredictiveSlice predictive_slice(const ConditionalDensityModel& model, const HistoryBlock& past,
                                 const LeaveOut& leave_out) {
    std::vector<double> log_w;
    std::vector<std::size_t> index;
    retained_log_weights(model, past, leave_out, log_w, index);
    const double m = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(m)) {
        throw Error(ErrorCode::DegenerateWeights, "all past-kernel weights underflow");
    }
    std::vector<double> weights;
    std::vector<double> centers;
    double total = 0.0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        if (log_w[i] < m - kDropBelowMax) continue;
        const double w = std::exp(log_w[i] - m);
        weights.push_back(w);
        centers.push_back(model.future_value(index[i]));
        total += w;
    }
    for (auto& w : weights) w /= total;
    return PredictiveSlice(std::move(weights), std::move(centers), model.bandwidths().future());
}

double conditional_log_density(const ConditionalDensityModel& model, const HistoryBlock& past, double future,
                               const LeaveOut& leave_out) {
    std::vector<double> log_w;
    std::vector<std::size_t> index;
    retained_log_weights(model, past, leave_out, log_w, index);
    const double kf = model.bandwidths().future();
    std::vector<double> log_joint(log_w.size());
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        log_joint[i] = log_w[i] + log_kernel_value((future - model.future_value(index[i])) / kf);
    }
    const double den = log_sum_exp(log_w);
    if (!std::isfinite(den)) {
        throw Error(ErrorCode::DegenerateWeights, "all past-kernel weights underflow");
    }
    return log_sum_exp(log_joint) - den - std::log(kf);
}

}  // namespace spenra
