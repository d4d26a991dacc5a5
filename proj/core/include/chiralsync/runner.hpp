#pragma once

#include "chiralsync/discord.hpp"
#include "chiralsync/dynamics.hpp"
#include "chiralsync/moments.hpp"
#include "chiralsync/network.hpp"
#include "chiralsync/witnesses.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chiralsync {

struct TimeSpec {
    double horizon = 0.0;
    std::optional<double> sample_step;  // default: twenty samples per fastest period
};

struct AnalysisFlags {
    bool means = true;
    bool covariance = false;
    bool pearson = false;
    bool shifted = false;
    bool fourier = false;
    bool clusters = false;
    bool quadrature_sync = false;  // Pearson of <x^2> and <xy+yx>, needs covariance
    std::vector<std::pair<std::size_t, std::size_t>> discord_pairs;
};

struct Scenario {
    std::string name = "scenario";
    std::optional<NetworkSpec> network;
    std::optional<RandomNetworkParams> generator;
    std::optional<Eigen::VectorXcd> initial_amplitudes;  // default 1 + 0i per node
    TimeSpec time;
    std::optional<WindowSpec> windows;  // default from the network frequencies
    AnalysisFlags analyses;
    std::string output_dir;
    std::optional<std::uint64_t> seed;  // overrides the generator seed
    double detection_threshold = 0.9;
    double peak_threshold = 0.2;
    std::optional<double> fourier_max;  // default 1.25 * largest frequency
    bool export_covariance = true;
    ClusterOptions cluster_options;
};

void validate_scenario(const Scenario& s);
NetworkSpec resolve_network(const Scenario& s);

Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

struct SyncReport {
    std::string scenario_name;
    std::string scenario_hash;
    std::string spec_hash;
    NetworkSpec network;
    WindowSpec window;
    std::vector<double> window_starts;

    MeanTrajectory means;
    std::optional<CovarianceTrajectory> covariance;
    double min_margin = 0.0;  // smallest symplectic margin over all frames

    std::vector<SyncMatrix> sync;  // Re<a> Pearson per window
    std::vector<SyncMatrix> sync_x2;
    std::vector<SyncMatrix> sync_xy;
    std::vector<Communities> communities;  // per window, from sync
    std::vector<std::vector<Spectrum>> spectra;  // per node, per window

    std::optional<SpectralDecomposition> spectral;
    std::optional<ClusterPrediction> clusters;

    std::vector<std::pair<std::size_t, std::size_t>> discord_pairs;
    std::vector<DiscordSeries> discord;

    double wall_seconds = 0.0;
    std::vector<std::string> files;
};

// Runs the pipeline; writes every export under output_dir when it is non-empty.
SyncReport run_scenario(const Scenario& s);

void write_report(SyncReport& report, const std::filesystem::path& dir, bool export_covariance = true);
std::string report_summary_json(const SyncReport& report);

// Plot-ready data for figures 2..8; returns the written paths.
std::vector<std::string> reproduce_figure(int id, const std::filesystem::path& out_dir,
                                          std::optional<std::uint64_t> seed = std::nullopt, bool quiet = true);

// Parameter sets of the figure recipes, shared with tests.
namespace recipes {
NetworkSpec fig2_dimer(double w2 = 0.0);
NetworkSpec fig4_trimer(Motif kind);
NetworkSpec fig5_chain();
NetworkSpec fig6_branching();
RandomNetworkParams fig7_network(std::uint64_t seed);
inline constexpr std::uint64_t fig7_default_seed = 4;
// horizon with t (gamma - w) = units
double horizon(const NetworkSpec& spec, double units, std::size_t reference_node = 0);
}  // namespace recipes

}  // namespace chiralsync
