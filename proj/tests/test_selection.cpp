#include "oracles.hpp"

#include "spenra/error.hpp"
#include "spenra/parallel.hpp"
#include "spenra/selection.hpp"
#include "spenra/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace spenra;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

Series ar1(std::size_t n, double phi, std::uint64_t seed) {
    auto e = normals(n, seed);
    for (std::size_t i = 1; i < n; ++i) e[i] += phi * e[i - 1];
    return Series(e);
}

}  // namespace

TEST(CvScore, LeaveOneOutMatchesOracle) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> bw(0.15, 1.5);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t p = 1 + static_cast<std::size_t>(rep % 4);
        const std::size_t T = 20 + static_cast<std::size_t>(rep);
        const auto x = normals(T, 500 + static_cast<std::uint64_t>(rep));
        std::vector<double> k(p + 1);
        for (auto& v : k) v = bw(rng);
        const oracle::Ckde ref{x, k};
        const double expected = ref.cv(0);
        EXPECT_NEAR(cv_score(Series(x), Bandwidths(k), 0), expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST(CvScore, BlockLeaveOutMatchesOracle) {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> bw(0.15, 1.5);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t p = 1 + static_cast<std::size_t>(rep % 3);
        const std::size_t l = 1 + static_cast<std::size_t>(rep % 4);
        const std::size_t T = p + 2 * l + 9 + static_cast<std::size_t>(3 * rep);
        const auto x = normals(T, 900 + static_cast<std::uint64_t>(rep));
        std::vector<double> k(p + 1);
        for (auto& v : k) v = bw(rng);
        const double expected = oracle::Ckde{x, k}.cv(l);
        EXPECT_NEAR(cv_score(Series(x), Bandwidths(k), l), expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST(CvScore, TinyBandwidthsStayFinite) {
    const auto x = normals(120, 7);
    const double v = cv_score(Series(x), Bandwidths::uniform(3, 1e-3), 0);
    EXPECT_TRUE(std::isfinite(v));
    const double ref = oracle::Ckde{x, std::vector<double>(4, 0.2)}.cv(0);
    EXPECT_NEAR(cv_score(Series(x), Bandwidths::uniform(3, 0.2), 0), ref, 1e-12 * std::abs(ref));
}

TEST(CvScore, IidNormalNearEntropy) {
    const double h = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        total += cv_score(Series(normals(200, seed)), Bandwidths({1.0, 1.0}), 0);
    }
    EXPECT_NEAR(total / 50.0, h, 0.15);
}

TEST(CvScore, JitteredConstantPrefersSmallFutureBandwidth) {
    auto x = normals(200, 3, 1e-3);
    for (auto& v : x) v += 1.0;
    const Series s(x);
    double previous = cv_score(s, Bandwidths({1.0, 1.0}), 0);
    for (double k2 : {0.3, 0.1, 0.03, 0.01, 0.003}) {
        const double now = cv_score(s, Bandwidths({1.0, k2}), 0);
        EXPECT_LT(now, previous) << "k2=" << k2;
        previous = now;
    }
}

TEST(CvScore, RetainedCountsShrinkWithBlockWidth) {
    const Series s(normals(80, 4));
    const Bandwidths k({0.5, 0.5});
    auto prev = cv_breakdown(s, k, 0).retained;
    for (std::size_t l = 1; l <= 20; ++l) {
        const auto now = cv_breakdown(s, k, l).retained;
        for (std::size_t i = 0; i < now.size(); ++i) EXPECT_LE(now[i], prev[i]);
        prev = now;
    }
    EXPECT_EQ(cv_breakdown(s, k, 0).retained.front(), 78u);
}

TEST(CvScore, InsufficientData) {
    try {
        (void)cv_score(Series(normals(10, 1)), Bandwidths({1.0, 1.0}), 50);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
}

TEST(CvScore, IndependentOfThreadCount) {
    const Series s(normals(300, 9));
    const Bandwidths k({0.4, 0.6, 0.3});
    set_thread_limit(1);
    const auto one = cv_breakdown(s, k, 5);
    set_thread_limit(3);
    const auto three = cv_breakdown(s, k, 5);
    set_thread_limit(0);
    EXPECT_EQ(one.score, three.score);
    EXPECT_EQ(one.neg_log_density, three.neg_log_density);
}

TEST(OptimizeBandwidths, IrrelevantPastIsSmoothedOut) {
    // On iid data leave-one-out CV either pushes the lag bandwidth out or
    // keeps a finite one that buys almost nothing over dropping the lag.
    int smoothed = 0;
    for (std::uint64_t seed = 10; seed < 18; ++seed) {
        const Series s(normals(500, seed));
        const double sd = sample_std(s.values());
        const auto fit = optimize_bandwidths(s, 1, 1);
        const double dropped = cv_score(s, Bandwidths({1e3 * sd, fit.bandwidths.future()}), 0);
        if (fit.bandwidths.lag(1) >= 5.0 * sd) ++smoothed;
        EXPECT_TRUE(fit.bandwidths.lag(1) >= 5.0 * sd || dropped - fit.cv0 < 5e-3) << "seed " << seed;
        EXPECT_LE(fit.cv0, dropped + 1e-6);  // simplex stopping tolerance
        const double silverman = 1.06 * sd * std::pow(500.0, -0.2);
        EXPECT_NEAR(fit.bandwidths.future(), silverman, 0.5 * silverman);
        for (double k : fit.bandwidths.all()) {
            EXPECT_GE(k, 1e-4 * sd * (1 - 1e-12));
            EXPECT_LE(k, 1e3 * sd * (1 + 1e-12));
        }
    }
    EXPECT_GE(smoothed, 3);
}

TEST(OptimizeBandwidths, CovariantUnderScaling) {
    const Series s = ar1(300, 0.8, 5);
    const auto base = optimize_bandwidths(s, 1, 3);
    const auto scaled = optimize_bandwidths(s.scaled(10.0), 1, 3);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(scaled.bandwidths.all()[j] / (10.0 * base.bandwidths.all()[j]), 1.0, 1e-3);
    }
    EXPECT_NEAR(scaled.cv0, base.cv0 + std::log(10.0), 1e-6);
}

TEST(OptimizeBandwidths, DeterministicAndNeverWorseThanWarmStart) {
    const Series s = ar1(250, 0.6, 8);
    const auto a = optimize_bandwidths(s, 2, 4);
    const auto b = optimize_bandwidths(s, 2, 4);
    EXPECT_EQ(a.bandwidths, b.bandwidths);
    EXPECT_EQ(a.cv0, b.cv0);

    const auto p1 = optimize_bandwidths(s, 1, 4);
    const auto warm = optimize_bandwidths(s, 2, 4, {}, p1.bandwidths);
    std::vector<double> padded{100.0 * sample_std(s.values())};
    for (double k : p1.bandwidths.all()) padded.push_back(k);
    EXPECT_LE(warm.cv0, cv_score(s, Bandwidths(padded), 0) + 1e-12);
}

TEST(OptimizeBandwidths, Errors) {
    EXPECT_THROW((void)optimize_bandwidths(Series(normals(8, 1)), 1, 0), Error);
    try {
        (void)optimize_bandwidths(Series(std::vector<double>(50, 2.0)), 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
}

TEST(ChooseOrder, TiesGoToSmallerOrder) {
    std::vector<OrderRecord> recs;
    recs.push_back({2, Bandwidths::uniform(2, 1.0), 0.0, -0.5, {false, false}});
    recs.push_back({1, Bandwidths::uniform(1, 1.0), 0.0, -0.5, {false}});
    recs.push_back({3, Bandwidths::uniform(3, 1.0), 0.0, -0.4, {false, false, false}});
    EXPECT_EQ(choose_order(recs), 1u);
    recs[2].cvl = -0.6;
    EXPECT_EQ(choose_order(recs), 3u);
}

TEST(SelectOrder, ReportShapeAndDeterminism) {
    const Series s = ar1(200, 0.7, 21);
    EstimationConfig cfg;
    cfg.max_order = 3;
    cfg.block_half_width = 10;
    cfg.rng_seed = 5;
    std::size_t calls = 0;
    const auto a = select_order(s, cfg, {}, [&](const OrderRecord&) { ++calls; });
    EXPECT_EQ(calls, 3u);
    ASSERT_EQ(a.records.size(), 3u);
    for (const auto& r : a.records) {
        EXPECT_EQ(r.bandwidths.all().size(), r.order + 1);
        EXPECT_EQ(r.smoothed_out.size(), r.order);
        EXPECT_LE(a.at(a.chosen_order).cvl, r.cvl);
    }
    set_thread_limit(1);
    const auto b = select_order(s, cfg);
    set_thread_limit(0);
    ASSERT_EQ(b.records.size(), a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].bandwidths, b.records[i].bandwidths);
        EXPECT_EQ(a.records[i].cv0, b.records[i].cv0);
        EXPECT_EQ(a.records[i].cvl, b.records[i].cvl);
    }
    EXPECT_EQ(a.chosen_order, b.chosen_order);
}

TEST(SelectOrder, SingleOrder) {
    EstimationConfig cfg;
    cfg.max_order = 1;
    cfg.block_half_width = 5;
    const auto rep = select_order(ar1(60, 0.5, 2), cfg);
    ASSERT_EQ(rep.records.size(), 1u);
    EXPECT_EQ(rep.chosen_order, 1u);
}

TEST(SelectOrder, MarkovBenchmarkNeedsTwoLags) {
    // The second lag carries most of the information; further lags may still
    // win by a hair because they soften the smoothing bias near the axes.
    const Series s = gen_markov2(Markov2Params{}, 1000, 7);
    EstimationConfig cfg;
    cfg.max_order = 4;
    cfg.rng_seed = 7;
    const auto rep = select_order(s, cfg);
    EXPECT_GE(rep.chosen_order, 2u);
    EXPECT_GT(rep.at(1).cvl - rep.at(2).cvl, 0.1);
    EXPECT_LT(rep.at(2).cvl - rep.chosen().cvl, 0.01);
}

TEST(SelectOrder, SmoothedOutThresholdUsesAbsoluteFloor) {
    EstimationConfig cfg;
    EXPECT_EQ(smoothed_out_threshold(Series({0.0, 0.1, 0.2}), cfg), 5.0);
    EXPECT_NEAR(smoothed_out_threshold(Series({0.0, 10.0, 20.0}), cfg), 50.0, 1e-12);
}

TEST(SelectionCsv, Layout) {
    SelectionReport rep;
    rep.block_half_width = 50;
    rep.smoothed_out_threshold = 5.0;
    rep.records.push_back({1, Bandwidths::from_table_order(std::vector<double>{0.5, 0.25}), -0.1, -0.05, {false}});
    rep.records.push_back(
        {2, Bandwidths::from_table_order(std::vector<double>{0.5, 0.25, 7.0}), -0.2, -0.15, {false, true}});
    rep.chosen_order = 2;
    std::ostringstream out;
    write_selection_csv(out, rep);
    EXPECT_EQ(out.str(),
              "p,k0,k-1,k-2,cv0,cvl\n"
              "1,0.5,0.25,,-0.1,-0.05\n"
              "2,0.5,0.25,,-0.2,-0.15\n"
              "# l=50\n"
              "# smoothed_out_threshold=5\n"
              "# chosen_order=2\n");
}
