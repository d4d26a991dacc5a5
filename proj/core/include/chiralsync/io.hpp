#pragma once

#include "chiralsync/discord.hpp"
#include "chiralsync/dynamics.hpp"
#include "chiralsync/moments.hpp"
#include "chiralsync/witnesses.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chiralsync {

// Comma-separated table. Metadata lines "# key: value" come first, then one
// header row of column names, then numeric rows.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string meta_value(std::string_view key) const;  // throws if absent
    std::size_t column(std::string_view name) const;
};

// Shortest representation that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string table_to_string(const Table& t);
Table table_from_string(std::string_view text);
void write_table(const Table& t, const std::filesystem::path& path);
Table read_table(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view text);
std::string spec_hash(const NetworkSpec& spec);

Table means_table(const MeanTrajectory& traj);
MeanTrajectory means_from_table(const Table& t);

// Lower triangle, row by row, real and imaginary parts.
Table covariance_table(const CovarianceTrajectory& traj, const std::string& hash);
CovarianceTrajectory covariance_from_table(const Table& t);
std::string covariance_sidecar(std::size_t n_modes, const std::string& hash);

Table sync_table(std::span<const SyncMatrix> windows, const WindowSpec& w);
std::vector<SyncMatrix> sync_from_table(const Table& t);

// All windows of one node's sliding spectrum.
Table spectrum_table(std::span<const Spectrum> windows, std::size_t node);
std::vector<Spectrum> spectra_from_table(const Table& t);

Table discord_table(const DiscordSeries& d, std::size_t i, std::size_t j);
DiscordSeries discord_from_table(const Table& t);

std::string spectral_to_json(const SpectralDecomposition& dec);
SpectralDecomposition spectral_from_json(std::string_view text);

std::string clusters_to_json(const ClusterPrediction& p);
ClusterPrediction clusters_from_json(std::string_view text);

}  // namespace chiralsync
