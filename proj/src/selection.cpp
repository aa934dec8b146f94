#include "spenra/selection.hpp"

#include "cv_kernel.hpp"
#include "spenra/csv_io.hpp"
#include "spenra/error.hpp"
#include "spenra/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace spenra {
namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
// Plain sums below this may have lost terms to underflow; such rows are
// recomputed with a per-row shift.
constexpr double kPlainSumFloor = 1e-280;

/// -log f_{-i:l}(future_i | past_i) for block row i (0-based), leaving out
/// rows within l of i. `acc` is scratch of length n.
double row_term(std::span<const double> v, std::size_t p, std::size_t n, std::size_t i, std::size_t l,
                std::span<const double> inv_past, double inv_future, double log_future_norm, std::vector<double>& acc) {
    const std::size_t lo = i > l ? i - l : 0;
    const std::size_t hi = std::min(n - 1, i + l);
    const detail::IndexRange ranges[2] = {{0, lo}, {hi + 1, n}};

    for (const auto& r : ranges) std::fill(acc.begin() + r.begin, acc.begin() + r.end, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double x = v[i + j];
        const double ik = inv_past[j];
        const double* col = v.data() + j;
        for (const auto& r : ranges) {
            for (std::size_t s = r.begin; s < r.end; ++s) {
                const double d = (x - col[s]) * ik;
                acc[s] += d * d;
            }
        }
    }

    const auto sums = detail::row_log_sums(acc.data(), v.data() + p, ranges, v[i + p], inv_future);
    return -(sums.joint - sums.past - log_future_norm);
}

}  // namespace

CvBreakdown cv_breakdown(const Series& s, const Bandwidths& k, std::size_t l) {
    const std::size_t p = k.order();
    const std::size_t T = s.size();
    if (T < p + 2 * l + 1 + 8) {
        throw Error(ErrorCode::InsufficientData, "l-block CV at order " + std::to_string(p) + " with l=" +
                                                     std::to_string(l) + " needs T >= " +
                                                     std::to_string(p + 2 * l + 9) + ", got " + std::to_string(T));
    }
    const std::size_t n = T - p;
    const auto v = s.values();
    std::vector<double> inv_past;
    inv_past.reserve(p);
    for (double kj : k.past()) inv_past.push_back(1.0 / kj);
    const double inv_future = 1.0 / k.future();
    const double log_future_norm = std::log(k.future()) + kLogSqrtTwoPi;

    CvBreakdown out;
    out.neg_log_density.resize(n);
    out.retained.resize(n);
    const auto signed_n = static_cast<std::ptrdiff_t>(n);

    std::vector<double> past_sums(n);
    std::vector<double> joint_sums(n);
    detail::symmetric_exp_sums(v.data(), p, n, l, inv_past.data(), inv_future, past_sums.data(), joint_sums.data());

#pragma omp parallel
    {
        std::vector<double> acc;
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t si = 0; si < signed_n; ++si) {
            const auto i = static_cast<std::size_t>(si);
            if (past_sums[i] >= kPlainSumFloor && joint_sums[i] >= kPlainSumFloor) {
                out.neg_log_density[i] = -(std::log(joint_sums[i]) - std::log(past_sums[i]) - log_future_norm);
            } else {
                acc.resize(n);
                out.neg_log_density[i] = row_term(v, p, n, i, l, inv_past, inv_future, log_future_norm, acc);
            }
            const std::size_t lo = i > l ? i - l : 0;
            const std::size_t hi = std::min(n - 1, i + l);
            out.retained[i] = lo + (n - 1 - hi);
        }
    }

    double total = 0.0;
    for (double term : out.neg_log_density) total += term;
    out.score = total / static_cast<double>(n);
    return out;
}

double cv_score(const Series& s, const Bandwidths& k, std::size_t l) { return cv_breakdown(s, k, l).score; }

BandwidthFit optimize_bandwidths(const Series& s, std::size_t p, std::uint64_t seed,
                                 const BandwidthSearchOptions& options, const std::optional<Bandwidths>& warm_start) {
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
    if (s.size() < p + 10) {
        throw Error(ErrorCode::InsufficientData, "bandwidth search at order " + std::to_string(p) + " needs T >= " +
                                                     std::to_string(p + 10));
    }
    if (warm_start && warm_start->order() + 1 != p) {
        throw Error(ErrorCode::InvalidArgument, "warm start must come from order p-1");
    }
    const double sigma = sample_std(s.values());
    if (!(sigma > 0.0)) {
        throw Error(ErrorCode::InsufficientData, "series has zero variance; bandwidths are undefined");
    }
    const std::size_t dim = p + 1;
    const double lo = std::log10(options.min_scale * sigma);
    const double hi = std::log10(options.max_scale * sigma);

    auto to_z = [&](double k) {
        const double frac = std::clamp((std::log10(k) - lo) / (hi - lo), 1e-9, 1.0 - 1e-9);
        return std::log(frac / (1.0 - frac));
    };
    auto from_z = [&](std::span<const double> z) {
        std::vector<double> k(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            k[j] = std::pow(10.0, lo + (hi - lo) / (1.0 + std::exp(-z[j])));
        }
        return Bandwidths(std::move(k));
    };

    const double n = static_cast<double>(s.size() - p);
    const double reference = 1.06 * sigma * std::pow(n, -1.0 / (static_cast<double>(dim) + 4.0));

    std::vector<std::vector<double>> starts;
    for (double factor : {0.25, 1.0, 4.0}) starts.emplace_back(dim, to_z(reference * factor));
    std::mt19937_64 rng(derive_seed(seed, p));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r = 0; r < options.random_starts; ++r) {
        std::vector<double> z(dim);
        for (auto& zj : z) zj = to_z(reference * std::pow(10.0, -1.0 + 2.5 * unit(rng)));
        starts.push_back(std::move(z));
    }
    if (warm_start) {
        std::vector<double> z;
        z.reserve(dim);
        z.push_back(to_z(options.warm_start_pad_scale * sigma));
        for (double k : warm_start->all()) z.push_back(to_z(k));
        if (options.random_starts > 0) {
            starts.back() = std::move(z);
        } else {
            starts.push_back(std::move(z));
        }
    }

    auto objective = [&](std::span<const double> z) {
        try {
            return cv_score(s, from_z(z), 0);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::optional<NelderMeadResult> best;
    std::size_t evaluations = 0;
    for (const auto& z0 : starts) {
        auto result = nelder_mead(objective, z0, options.nelder_mead);
        evaluations += result.evaluations;
        if (std::isfinite(result.f) && (!best || result.f < best->f)) best = std::move(result);
    }
    if (!best) {
        throw Error(ErrorCode::OptimizerFailure, "no start produced a finite CV score at order " + std::to_string(p));
    }
    return {from_z(best->x), best->f, evaluations};
}

const OrderRecord& SelectionReport::chosen() const { return at(chosen_order); }

const OrderRecord& SelectionReport::at(std::size_t p) const {
    for (const auto& r : records) {
        if (r.order == p) return r;
    }
    throw Error(ErrorCode::InvalidArgument, "no record for order " + std::to_string(p));
}

double smoothed_out_threshold(const Series& s, const EstimationConfig& config) {
    return std::max(config.smoothed_out_floor, config.smoothed_out_multiplier * sample_std(s.values()));
}

SelectionReport select_order(const Series& s, const EstimationConfig& config, const BandwidthSearchOptions& options,
                             const SelectionProgress& progress) {
    config.validate(s.size());
    SelectionReport report;
    report.block_half_width = config.block_half_width;
    report.smoothed_out_threshold = smoothed_out_threshold(s, config);
    std::optional<Bandwidths> previous;
    for (std::size_t p = 1; p <= config.max_order; ++p) {
        auto fit = optimize_bandwidths(s, p, config.rng_seed, options, previous);
        const double cvl = cv_score(s, fit.bandwidths, config.block_half_width);
        std::vector<bool> flags(p);
        for (std::size_t j = 1; j <= p; ++j) flags[j - 1] = fit.bandwidths.lag(j) >= report.smoothed_out_threshold;
        report.records.push_back({p, fit.bandwidths, fit.cv0, cvl, std::move(flags)});
        if (progress) progress(report.records.back());
        previous = fit.bandwidths;
    }
    report.chosen_order = choose_order(report.records);
    return report;
}

std::size_t choose_order(std::span<const OrderRecord> records) {
    if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no orders to choose from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto& b = records[best];
        if (r.cvl < b.cvl || (r.cvl == b.cvl && r.order < b.order)) best = i;
    }
    return records[best].order;
}

void write_selection_csv(std::ostream& out, const SelectionReport& report) {
    std::size_t max_p = 0;
    for (const auto& r : report.records) max_p = std::max(max_p, r.order);
    out << "p,k0";
    for (std::size_t j = 1; j <= max_p; ++j) out << ",k-" << j;
    out << ",cv0,cvl\n";
    for (const auto& r : report.records) {
        out << r.order << ',' << format_full(r.bandwidths.future());
        for (std::size_t j = 1; j <= max_p; ++j) {
            out << ',';
            if (j <= r.order && !r.smoothed_out[j - 1]) out << format_full(r.bandwidths.lag(j));
        }
        out << ',' << format_full(r.cv0) << ',' << format_full(r.cvl) << '\n';
    }
    write_trailers(out, {{"l", std::to_string(report.block_half_width)},
                         {"smoothed_out_threshold", format_full(report.smoothed_out_threshold)},
                         {"chosen_order", std::to_string(report.chosen_order)}});
}

}  // namespace spenra
