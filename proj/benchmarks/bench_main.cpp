#include "chiralsync/discord.hpp"
#include "chiralsync/runner.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace chiralsync;

namespace {

std::vector<double> uniform_times(const NetworkSpec& net, double horizon) {
    const double dt = default_sample_step(net);
    std::vector<double> t;
    for (std::size_t k = 0; static_cast<double>(k) * dt <= horizon; ++k) t.push_back(static_cast<double>(k) * dt);
    return t;
}

void BM_PropagateMeans(benchmark::State& state) {
    const auto net = random_oriented_network(recipes::fig7_network(recipes::fig7_default_seed));
    const auto d = assemble_drift(net);
    const auto t = uniform_times(net, static_cast<double>(state.range(0)));
    const Eigen::VectorXcd a0 = Eigen::VectorXcd::Ones(15);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_means(d, a0, t));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * t.size()));
}
BENCHMARK(BM_PropagateMeans)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PropagateMeansIntegrator(benchmark::State& state) {
    const auto net = recipes::fig5_chain();
    const auto d = assemble_drift(net);
    const auto t = uniform_times(net, 500);
    MeanOptions o;
    o.force = MeanPath::integrator;
    for (auto _ : state) benchmark::DoNotOptimize(propagate_means(d, Eigen::VectorXcd::Ones(5), t, o));
}
BENCHMARK(BM_PropagateMeansIntegrator)->Unit(benchmark::kMillisecond);

void BM_PropagateCovariance(benchmark::State& state) {
    MotifParams p;
    p.gamma = 0.05;
    p.pump_rates = {0.045};
    p.chain_length = static_cast<std::size_t>(state.range(0));
    for (std::size_t k = 0; k < p.chain_length; ++k) p.frequencies.push_back(1.2 + 0.2 * static_cast<double>(k));
    const auto net = motif(Motif::chain, p);
    const auto d = assemble_drift(net);
    const auto s = assemble_noise(net);
    std::vector<double> t;
    for (int k = 0; k <= 100; ++k) t.push_back(5.0 * k);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_covariance(d, s, vacuum_covariance(p.chain_length), t));
}
BENCHMARK(BM_PropagateCovariance)->Arg(2)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_SteadyCovariance(benchmark::State& state) {
    const auto net = recipes::fig6_branching();
    const auto d = assemble_drift(net);
    const auto s = assemble_noise(net);
    for (auto _ : state) benchmark::DoNotOptimize(steady_covariance(d, s));
}
BENCHMARK(BM_SteadyCovariance)->Unit(benchmark::kMicrosecond);

void BM_ShiftedPearson(benchmark::State& state) {
    const auto net = recipes::fig2_dimer();
    const auto t = uniform_times(net, 1200);
    const auto m = propagate_means(assemble_drift(net), Eigen::VectorXcd::Ones(2), t);
    const auto sig = mean_signals(m);
    auto w = default_window(net);
    w.t_start = 900;
    for (auto _ : state) benchmark::DoNotOptimize(shifted_pearson(sig[0], sig[1], w));
}
BENCHMARK(BM_ShiftedPearson)->Unit(benchmark::kMicrosecond);

void BM_WindowedFourier(benchmark::State& state) {
    const auto net = recipes::fig2_dimer();
    const auto t = uniform_times(net, 1200);
    const auto m = propagate_means(assemble_drift(net), Eigen::VectorXcd::Ones(2), t);
    const auto sig = mean_signals(m);
    const auto w = default_window(net);
    const auto grid = frequency_grid(w.delta_t, 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(windowed_fourier(sig[1], w, grid));
}
BENCHMARK(BM_WindowedFourier)->Unit(benchmark::kMicrosecond);

void BM_GaussianDiscord(benchmark::State& state) {
    const auto net = recipes::fig2_dimer();
    const auto tm = reduce_two_mode(to_quadrature(steady_covariance(assemble_drift(net), assemble_noise(net))), 0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_discord(tm, Measured::second));
}
BENCHMARK(BM_GaussianDiscord);

void BM_DiscordBruteForce(benchmark::State& state) {
    const auto net = recipes::fig2_dimer();
    const auto tm = reduce_two_mode(to_quadrature(steady_covariance(assemble_drift(net), assemble_noise(net))), 0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(discord_brute_force(tm, Measured::second));
}
BENCHMARK(BM_DiscordBruteForce)->Unit(benchmark::kMicrosecond);

void BM_SpectralAnalysis(benchmark::State& state) {
    auto p = recipes::fig7_network(recipes::fig7_default_seed);
    p.n = static_cast<std::size_t>(state.range(0));
    p.eps_max = 1.2 + 2.0 * static_cast<double>(p.n);
    const auto d = assemble_drift(random_oriented_network(p));
    for (auto _ : state) benchmark::DoNotOptimize(predict_clusters(spectral_analysis(d)));
}
BENCHMARK(BM_SpectralAnalysis)->Arg(15)->Arg(60)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
