#include "spenra/entropy.hpp"

#include "spenra/csv_io.hpp"
#include "spenra/error.hpp"
#include "spenra/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

namespace spenra {
namespace {

constexpr double kRangeBandwidths = 8.0;
constexpr double kMinWeight = 1e-15;
// exp(-0.5 * 40^2) is exactly zero in double precision.
constexpr double kKernelSupport = 40.0;
constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

/// Runs body(i) for i in [0, n) in parallel, rethrowing the first failure.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::exception_ptr failure;
    const auto signed_n = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < signed_n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(spenra_entropy_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

double mixture_entropy(const PredictiveSlice& slice, double abs_tol) {
    std::vector<std::pair<double, double>> comps;  // (center, weight)
    comps.reserve(slice.size());
    for (std::size_t i = 0; i < slice.size(); ++i) {
        if (slice.weights()[i] >= kMinWeight) comps.emplace_back(slice.centers()[i], slice.weights()[i]);
    }
    std::sort(comps.begin(), comps.end());
    std::vector<double> centers(comps.size());
    std::vector<double> weights(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        centers[i] = comps[i].first;
        weights[i] = comps[i].second;
    }

    const double k = slice.future_bandwidth();
    const double inv_k = 1.0 / k;
    const double reach = kKernelSupport * k;
    auto integrand = [&](double y) {
        const auto first = std::lower_bound(centers.begin(), centers.end(), y - reach) - centers.begin();
        const auto last = std::upper_bound(centers.begin(), centers.end(), y + reach) - centers.begin();
        double g = 0.0;
        for (auto i = first; i < last; ++i) {
            const double u = (y - centers[i]) * inv_k;
            g += weights[i] * std::exp(-0.5 * u * u);
        }
        g *= kInvSqrtTwoPi * inv_k;
        return g > 0.0 ? -g * std::log(g) : 0.0;
    };

    const double a = centers.front() - kRangeBandwidths * k;
    const double b = centers.back() + kRangeBandwidths * k;
    std::vector<double> breaks{a};
    for (double c : centers) {
        if (c - breaks.back() >= k && b - c >= k) breaks.push_back(c);
    }
    breaks.push_back(b);
    return integrate_adaptive(integrand, breaks, abs_tol).value;
}

EntropyRateSeries specific_entropy_series(const Series& s, const Bandwidths& k, double abs_tol) {
    const ConditionalDensityModel model(s, k);
    const std::size_t p = k.order();
    const std::size_t n = s.size() - p;
    const auto v = s.values();

    EntropyRateSeries out{{}, std::vector<double>(n), std::nullopt, p, k};
    out.indices.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const HistoryBlock past(std::vector<double>(v.begin() + i, v.begin() + i + p), i + p + 1);
        out.values[i] = mixture_entropy(predictive_slice(model, past), abs_tol);
    });
    for (std::size_t i = 0; i < n; ++i) out.indices[i] = i + p + 1;
    if (s.has_timestamps()) {
        const auto ts = s.timestamps();
        out.times.emplace(ts.begin() + p, ts.end());
    }
    return out;
}

double time_averaged_rate(const EntropyRateSeries& e) {
    if (e.values.empty()) throw Error(ErrorCode::TooShort, "entropy-rate series is empty");
    double total = 0.0;
    for (double h : e.values) total += h;
    return total / static_cast<double>(e.values.size());
}

std::vector<std::pair<double, double>> windowed_average(const EntropyRateSeries& e, double window) {
    if (!e.times) throw Error(ErrorCode::MissingTimestamps, "windowed average needs event times");
    if (!(window >= 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be nonnegative");
    const auto& tau = *e.times;
    const double half = 0.5 * window;
    std::vector<std::pair<double, double>> out;
    out.reserve(tau.size());
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        while (tau[i] - tau[lo] > half) ++lo;
        if (hi < i) hi = i;
        while (hi + 1 < tau.size() && tau[hi + 1] - tau[i] <= half) ++hi;
        double total = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) total += e.values[j];
        out.emplace_back(tau[i], total / static_cast<double>(hi - lo + 1));
    }
    return out;
}

std::vector<BiasPoint> bias_map(const Series& s, const SpecificEntropyTruth& truth, const Bandwidths& k,
                                double abs_tol) {
    const auto e = specific_entropy_series(s, k, abs_tol);
    const std::size_t p = k.order();
    const auto v = s.values();
    std::vector<BiasPoint> out;
    out.reserve(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        HistoryBlock past(std::vector<double>(v.begin() + i, v.begin() + i + p), i + p + 1);
        const double h = truth(past);
        out.push_back({std::move(past), e.values[i], e.values[i] - h});
    }
    return out;
}

void write_entropy_csv(std::ostream& out, const Series& s, const EntropyRateSeries& e,
                       const std::optional<std::vector<std::pair<double, double>>>& windowed) {
    out << "t,time,value,h_specific" << (windowed ? ",windowed" : "") << '\n';
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        const std::size_t t = e.indices[i];
        out << t << ',';
        if (e.times) out << format_full((*e.times)[i]);
        out << ',' << format_full(s[t - 1]) << ',' << format_full(e.values[i]);
        if (windowed) out << ',' << format_full((*windowed)[i].second);
        out << '\n';
    }
    std::string bw;
    for (double k : e.bandwidths.table_order()) {
        if (!bw.empty()) bw += ',';
        bw += format_full(k);
    }
    write_trailers(out, {{"p", std::to_string(e.order)},
                         {"bandwidths", bw},
                         {"time_averaged", format_full(time_averaged_rate(e))}});
}

}  // namespace spenra
