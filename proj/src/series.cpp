#include "spenra/series.hpp"

#include "spenra/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spenra {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OrderTooLarge: return "OrderTooLarge";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::EmptyAfterLeaveOut: return "EmptyAfterLeaveOut";
        case ErrorCode::DegenerateWeights: return "DegenerateWeights";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::OptimizerFailure: return "OptimizerFailure";
        case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
        case ErrorCode::MissingTimestamps: return "MissingTimestamps";
        case ErrorCode::NoMatches: return "NoMatches";
        case ErrorCode::IsolatedVector: return "IsolatedVector";
        case ErrorCode::AmbiguousState: return "AmbiguousState";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::NoEvents: return "NoEvents";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Series::Series(std::vector<double> values, std::optional<std::vector<double>> timestamps, std::string label)
    : values_(std::move(values)), timestamps_(std::move(timestamps)), label_(std::move(label)) {
    if (values_.empty()) {
        throw Error(ErrorCode::TooShort, "series must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidArgument, "non-finite value at index " + std::to_string(i + 1));
        }
    }
    if (timestamps_) {
        const auto& ts = *timestamps_;
        if (ts.size() != values_.size()) {
            throw Error(ErrorCode::InvalidArgument, "timestamps and values differ in length");
        }
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (!std::isfinite(ts[i]) || (i > 0 && !(ts[i] > ts[i - 1]))) {
                throw Error(ErrorCode::InvalidArgument,
                            "timestamps must be finite and strictly increasing (index " + std::to_string(i + 1) + ")");
            }
        }
    }
}

std::span<const double> Series::timestamps() const {
    if (!timestamps_) {
        throw Error(ErrorCode::MissingTimestamps, "series has no timestamps");
    }
    return *timestamps_;
}

Series Series::scaled(double a) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= a;
    return Series(std::move(v), timestamps_, label_);
}

Series Series::shifted(double c) const {
    std::vector<double> v(values_);
    for (auto& x : v) x += c;
    return Series(std::move(v), timestamps_, label_);
}

HistoryBlock::HistoryBlock(std::vector<double> past, std::optional<std::size_t> origin_index)
    : past_(std::move(past)), origin_(origin_index) {
    if (past_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "history block needs order >= 1");
    }
    if (!std::all_of(past_.begin(), past_.end(), [](double x) { return std::isfinite(x); })) {
        throw Error(ErrorCode::InvalidArgument, "history block entries must be finite");
    }
}

std::vector<DelayPair> delay_blocks(const Series& s, std::size_t p) {
    if (p == 0) {
        throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
    }
    if (p + 1 > s.size()) {
        throw Error(ErrorCode::OrderTooLarge,
                    "order " + std::to_string(p) + " needs at least " + std::to_string(p + 1) + " values");
    }
    const auto v = s.values();
    std::vector<DelayPair> out;
    out.reserve(s.size() - p);
    for (std::size_t j = 0; j + p < s.size(); ++j) {
        out.push_back({HistoryBlock(std::vector<double>(v.begin() + j, v.begin() + j + p), j + p + 1), v[j + p]});
    }
    return out;
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorCode::TooShort, "standard deviation needs at least two values");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

SummaryStats summary_stats(const Series& s) {
    const auto v = s.values();
    const double std = sample_std(v);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return {mean, std, *lo, *hi};
}

void EstimationConfig::validate(std::size_t series_length) const {
    if (max_order == 0) throw Error(ErrorCode::InvalidArgument, "max_order must be positive");
    if (!(smoothed_out_multiplier > 0.0) || !(smoothed_out_floor > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "smoothed-out threshold must be positive");
    }
    if (!(quadrature_abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
    const std::size_t l = block_half_width;
    if (series_length < 2 * l + 1 || max_order >= series_length - 2 * l - 1) {
        throw Error(ErrorCode::InsufficientData, "max_order " + std::to_string(max_order) +
                                                     " must be below T - 2l - 1 (T=" + std::to_string(series_length) +
                                                     ", l=" + std::to_string(l) + ")");
    }
}

}  // namespace spenra
