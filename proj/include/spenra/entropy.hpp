#pragma once

#include "spenra/ckde.hpp"
#include "spenra/series.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace spenra {

/// Specific entropy rates h_t (nats), one per future index t = p+1..T.
struct EntropyRateSeries {
    std::vector<std::size_t> indices;
    std::vector<double> values;
    std::optional<std::vector<double>> times;  ///< event time of X_t when the series has timestamps
    std::size_t order;
    Bandwidths bandwidths;
};

/// Differential entropy -int g log g of a Gaussian-mixture slice by adaptive
/// Gauss-Kronrod quadrature over [min center - 8k, max center + 8k].
/// Components with weight below 1e-15 are ignored.
[[nodiscard]] double mixture_entropy(const PredictiveSlice& slice, double abs_tol = 1e-6);

/// Plug-in specific entropy rate at every observed past, using the full
/// sample (no leave-out) for the predictive density.
[[nodiscard]] EntropyRateSeries specific_entropy_series(const Series& s, const Bandwidths& k, double abs_tol = 1e-6);

[[nodiscard]] double time_averaged_rate(const EntropyRateSeries& e);

/// Uniform-kernel moving average: at each event time tau_i, the mean of the
/// values whose times lie within window/2 of tau_i.
[[nodiscard]] std::vector<std::pair<double, double>> windowed_average(const EntropyRateSeries& e, double window);

struct BiasPoint {
    HistoryBlock past;
    double estimate;
    double bias;  ///< estimate - truth(past)
};

using SpecificEntropyTruth = std::function<double(const HistoryBlock&)>;

[[nodiscard]] std::vector<BiasPoint> bias_map(const Series& s, const SpecificEntropyTruth& truth, const Bandwidths& k,
                                              double abs_tol = 1e-6);

/// CSV `t,time,value,h_specific` (plus `windowed` when given), followed by
/// `# p=`, `# bandwidths=` (table order) and `# time_averaged=` trailers.
void write_entropy_csv(std::ostream& out, const Series& s, const EntropyRateSeries& e,
                       const std::optional<std::vector<std::pair<double, double>>>& windowed = std::nullopt);

}  // namespace spenra
