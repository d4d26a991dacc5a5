#include "chiralsync/errors.hpp"
#include "chiralsync/witnesses.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chiralsync;
using testsupport::sample;

namespace {

constexpr double pi = std::numbers::pi;

WindowSpec window(double t0, double len, double search = 0.0) { return {t0, len, len / 4, search}; }

}  // namespace

TEST(Pearson, Identity) {
    const auto a = sample([](double t) { return std::sin(1.3 * t) + 0.2 * std::cos(0.4 * t); }, 0.01, 5001);
    EXPECT_NEAR(pearson(a, a, window(0, 40)), 1.0, 1e-12);
}

TEST(Pearson, AntiPhase) {
    const auto a = sample([](double t) { return std::sin(t); }, 2 * pi / 200, 2001);
    const auto b = sample([](double t) { return -std::sin(t); }, 2 * pi / 200, 2001);
    EXPECT_NEAR(pearson(a, b, window(0, 10 * pi)), -1.0, 1e-12);
}

TEST(Pearson, Orthogonal) {
    const auto a = sample([](double t) { return std::sin(t); }, 2 * pi / 200, 2001);
    const auto b = sample([](double t) { return std::cos(t); }, 2 * pi / 200, 2001);
    EXPECT_LE(std::abs(pearson(a, b, window(0, 10 * pi))), 1e-6);
}

TEST(Pearson, DegenerateWindowThrows) {
    const auto a = sample([](double) { return 3.0; }, 0.1, 101);
    const auto b = sample([](double t) { return t; }, 0.1, 101);
    EXPECT_THROW(pearson(a, b, window(0, 5)), NumericalError);
}

TEST(Pearson, WindowOutsideSignalThrows) {
    const auto a = sample([](double t) { return std::sin(t); }, 0.1, 101);
    EXPECT_THROW(pearson(a, a, window(5, 10)), ValidationError);
}

// Property: invariance under affine maps with positive scale, sign flip with negative.
TEST(Pearson, AffineInvariance) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        const double f1 = 1 + std::abs(u(rng)), f2 = 1 + std::abs(u(rng)), ph = u(rng);
        const auto a = sample([&](double t) { return std::sin(f1 * t) + 0.3 * std::sin(f2 * t + ph); }, 0.01, 3001);
        const auto b = sample([&](double t) { return std::cos(f1 * t + ph) + 0.1 * t; }, 0.01, 3001);
        const double r = pearson(a, b, window(0, 30));
        const double alpha = 0.1 + std::abs(u(rng)), beta = u(rng);
        RealSeries c = b;
        for (auto& v : c.values) v = alpha * v + beta;
        EXPECT_NEAR(pearson(a, c, window(0, 30)), r, 1e-12);
        for (auto& v : c.values) v = -v;
        EXPECT_NEAR(pearson(a, c, window(0, 30)), -r, 1e-12);
        EXPECT_LE(std::abs(r), 1.0 + 1e-12);
    }
}

TEST(Shifted, ConstructedDelay) {
    const double delta = 0.7;
    const auto a = sample([](double t) { return std::sin(2.0 * t); }, 0.01, 8001);
    const auto b = sample([&](double t) { return std::sin(2.0 * (t - delta)); }, 0.01, 8001);
    const auto r = shifted_pearson(a, b, window(0, 60, pi));
    EXPECT_NEAR(r.value, 1.0, 1e-4);
    EXPECT_NEAR(std::fmod(r.shift, pi), delta, 1e-3);
}

TEST(Shifted, IdenticalSignals) {
    const auto a = sample([](double t) { return std::sin(2.0 * t) * std::exp(-0.01 * t); }, 0.01, 8001);
    const auto r = shifted_pearson(a, a, window(0, 60, pi));
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_NEAR(r.shift, 0.0, 1e-6);
}

// Property: the optimum over shifts is never below the unshifted value.
TEST(Shifted, NeverBelowPlain) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    for (int k = 0; k < 30; ++k) {
        const double f1 = u(rng), f2 = u(rng), ph = 3 * u(rng);
        const auto a = sample([&](double t) { return std::sin(f1 * t); }, 0.02, 3001);
        const auto b = sample([&](double t) { return std::sin(f2 * t + ph); }, 0.02, 3001);
        const auto w = window(0, 40, 2 * pi / std::min(f1, f2));
        EXPECT_GE(shifted_pearson(a, b, w).value, pearson(a, b, w) - 1e-12);
        EXPECT_GE(symmetric_shifted_pearson(a, b, w).value, shifted_pearson(a, b, w).value - 1e-12);
    }
}

TEST(Collective, IdenticalAndPair) {
    const auto a = sample([](double t) { return std::sin(t); }, 0.01, 4001);
    const auto b = sample([](double t) { return std::sin(t + 0.4) + 0.1 * std::sin(3 * t); }, 0.01, 4001);
    const std::vector<RealSeries> same{a, a, a, a};
    const std::vector<std::size_t> all{0, 1, 2, 3};
    EXPECT_NEAR(collective_index(same, all, window(0, 30), false), 1.0, 1e-12);
    const std::vector<RealSeries> two{a, b};
    const std::vector<std::size_t> pair{0, 1};
    EXPECT_NEAR(collective_index(two, pair, window(0, 30), false), pearson(a, b, window(0, 30)), 1e-15);
}

TEST(Fourier, PureTone) {
    const double eps0 = 2.0 * pi / 40.0 * 15;  // on the grid of a 40-long window
    ComplexSeries s{0.0, 0.01, {}};
    for (int i = 0; i <= 6000; ++i) s.values.push_back(std::exp(Complex(0.0, -eps0 * s.time(static_cast<std::size_t>(i)))));
    const auto grid = frequency_grid(40.0, 5.0);
    const auto sp = windowed_fourier(s, window(0, 40), grid);
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (std::abs(sp.amplitudes[k]) > std::abs(sp.amplitudes[best])) best = k;
    EXPECT_EQ(best, 15u);
    EXPECT_NEAR(grid[best], eps0, 1e-12);
    EXPECT_NEAR(std::abs(sp.amplitudes[best]), 1.0, 1e-9);
    const auto peaks = dominant_peaks(sp, 0.2);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_NEAR(peaks[0].frequency, eps0, 1e-12);
}

TEST(Fourier, Constant) {
    const auto s = sample([](double) { return 2.5; }, 0.05, 1001);
    const auto grid = frequency_grid(40.0, 3.0);
    const auto sp = windowed_fourier(s, window(0, 40), grid);
    EXPECT_NEAR(std::abs(sp.amplitudes[0]), 2.5, 1e-12);
    for (std::size_t k = 1; k < grid.size(); ++k) EXPECT_LT(std::abs(sp.amplitudes[k]), 1e-9);
}

TEST(Fourier, ZeroSignalNoPeaks) {
    const auto s = sample([](double) { return 0.0; }, 0.05, 1001);
    const auto grid = frequency_grid(40.0, 3.0);
    EXPECT_TRUE(dominant_peaks(windowed_fourier(s, window(0, 40), grid), 0.2).empty());
}

TEST(Fourier, GridSpacing) {
    const auto g = frequency_grid(10.0, 3.0);
    ASSERT_GE(g.size(), 2u);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_NEAR(g[1] - g[0], 2 * pi / 10.0, 1e-15);
    EXPECT_LE(g.back(), 3.0);
}

TEST(Communities, AllOnes) {
    SyncMatrix s;
    s.values = Eigen::MatrixXd::Ones(4, 4);
    const auto c = detect_communities(s, 0.9);
    ASSERT_EQ(c.groups.size(), 1u);
    EXPECT_EQ(c.groups[0].size(), 4u);
    EXPECT_TRUE(c.unsynchronised.empty());
}

TEST(Communities, TwoBlocks) {
    SyncMatrix s;
    s.values = Eigen::MatrixXd::Zero(5, 5);
    s.values.block(0, 0, 2, 2).setOnes();
    s.values.block(2, 2, 3, 3).setOnes();
    const auto c = detect_communities(s, 0.9);
    ASSERT_EQ(c.groups.size(), 2u);
    EXPECT_EQ(c.groups[0], (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(c.groups[1], (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Windows, Defaults) {
    const auto net = NetworkSpec::from_edges(2, {{0, 1}}, {1.0, 1.9}, {0.045, 0.0}, 0.05);
    const auto w = default_window(net);
    EXPECT_NEAR(w.delta_t, 40 * pi, 1e-12);
    EXPECT_NEAR(w.stride, 10 * pi, 1e-12);
    EXPECT_NEAR(w.shift_search, 2 * pi, 1e-12);
    EXPECT_NEAR(default_sample_step(net), 2 * pi / 1.9 / 20, 1e-15);
    const auto starts = window_starts(w, 1000.0, w.shift_search);
    ASSERT_FALSE(starts.empty());
    EXPECT_LE(starts.back() + w.delta_t + w.shift_search, 1000.0 + 1e-9);
}

TEST(Windows, InvalidSpec) {
    EXPECT_THROW(check_window({0.0, -1.0, 1.0, 0.0}), ValidationError);
    EXPECT_THROW(check_window({0.0, 1.0, 0.0, 0.0}), ValidationError);
}
