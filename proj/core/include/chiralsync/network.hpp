#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chiralsync {

using Edge = std::pair<std::size_t, std::size_t>;  // (source, target)

// Oriented oscillator network. adjacency is row-major n x n, adjacency[i*n+j] = 1
// means node i drives node j.
struct NetworkSpec {
    std::size_t n_nodes = 0;
    std::vector<std::uint8_t> adjacency;
    std::vector<double> frequencies;
    std::vector<double> pump_rates;
    double gamma = 0.0;
    std::optional<std::uint64_t> seed;

    static NetworkSpec from_edges(std::size_t n, const std::vector<Edge>& edges,
                                  std::vector<double> frequencies,
                                  std::vector<double> pump_rates, double gamma);

    bool edge(std::size_t from, std::size_t to) const { return adjacency[from * n_nodes + to] != 0; }
    void set_edge(std::size_t from, std::size_t to, bool on = true);
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;

    bool operator==(const NetworkSpec&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationReport validate_network(const NetworkSpec& spec);
// Throws ValidationError listing every violation.
void require_valid(const NetworkSpec& spec);

struct DegreeProfile {
    std::vector<std::size_t> out_degree;
    std::vector<std::size_t> in_degree;
    std::vector<double> gamma_total;
};

DegreeProfile degree_profile(const NetworkSpec& spec);

enum class Motif {
    dimer,
    trimer_out,
    trimer_in,
    trimer_through,
    nonloop_ring,
    loop_ring,
    chain,
    branching,
};

struct MotifParams {
    std::vector<double> frequencies;
    // one entry applies to every node
    std::vector<double> pump_rates;
    double gamma = 0.05;
    std::size_t chain_length = 0;
    std::size_t trunk_length = 0;
    std::vector<std::size_t> branch_lengths;
};

Motif motif_from_name(std::string_view name);
std::string_view motif_name(Motif m);
std::size_t motif_size(Motif m, const MotifParams& params);

// Node numbering: dimer 0->1; trimer_out 1->0, 1->2; trimer_in 0->1, 2->1;
// trimer_through 0->1->2; nonloop_ring 0->1, 1->2, 0->2; loop_ring 0->1->2->0;
// chain i->i+1. Branching: trunk 0..T-1 as a chain, branch nodes numbered level
// by level (all first nodes of each branch, then all second nodes, ...), each
// branch hanging off the last trunk node.
NetworkSpec motif(Motif m, const MotifParams& params);

// Depth of every node of a branching motif, trunk head at depth 0.
std::vector<std::size_t> branching_depths(std::size_t trunk_length,
                                          const std::vector<std::size_t>& branch_lengths);

struct RandomNetworkParams {
    std::size_t n = 15;
    double edge_prob = 0.2;
    double eps_min = 1.2;
    double eps_max = 4.0;
    double gamma = 0.05;
    double pump = 0.045;
    std::uint64_t seed = 0;
    std::uint64_t max_attempts = 1'000'000;
};

// Edges are drawn first (pair by pair in lexicographic order, then an orientation
// coin), then frequencies by rejection until every pairwise gap exceeds gamma.
NetworkSpec random_oriented_network(const RandomNetworkParams& params);

std::string network_to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(std::string_view text);
NetworkSpec load_network(const std::string& path);
void save_network(const NetworkSpec& spec, const std::string& path);

}  // namespace chiralsync
