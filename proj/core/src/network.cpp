#include "chiralsync/network.hpp"
#include "chiralsync/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace chiralsync {

namespace {

double unit_draw(std::mt19937_64& rng) {
    // 53 random bits, identical on every platform unlike std::uniform_real_distribution
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t motif_fixed_size(Motif m) {
    switch (m) {
    case Motif::dimer: return 2;
    case Motif::trimer_out:
    case Motif::trimer_in:
    case Motif::trimer_through:
    case Motif::nonloop_ring:
    case Motif::loop_ring: return 3;
    default: return 0;
    }
}

}  // namespace

NetworkSpec NetworkSpec::from_edges(std::size_t n, const std::vector<Edge>& edges,
                                    std::vector<double> frequencies,
                                    std::vector<double> pump_rates, double gamma) {
    NetworkSpec s;
    s.n_nodes = n;
    s.adjacency.assign(n * n, 0);
    for (auto [from, to] : edges) {
        if (from >= n || to >= n) {
            throw ValidationError("edge (" + std::to_string(from) + "," + std::to_string(to) +
                                  ") references a node outside 0.." + std::to_string(n) + "-1");
        }
        s.set_edge(from, to);
    }
    s.frequencies = std::move(frequencies);
    s.pump_rates = std::move(pump_rates);
    s.gamma = gamma;
    return s;
}

void NetworkSpec::set_edge(std::size_t from, std::size_t to, bool on) {
    adjacency[from * n_nodes + to] = on ? 1 : 0;
}

std::vector<Edge> NetworkSpec::edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = 0; j < n_nodes; ++j)
            if (edge(i, j)) out.emplace_back(i, j);
    return out;
}

std::size_t NetworkSpec::edge_count() const {
    return static_cast<std::size_t>(std::count_if(adjacency.begin(), adjacency.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v;
    }
    return out;
}

ValidationReport validate_network(const NetworkSpec& spec) {
    ValidationReport r;
    auto& v = r.violations;
    const std::size_t n = spec.n_nodes;
    if (n == 0) v.emplace_back("network has no nodes");
    if (spec.adjacency.size() != n * n) {
        v.emplace_back("adjacency has " + std::to_string(spec.adjacency.size()) +
                       " entries, expected " + std::to_string(n * n));
        return r;
    }
    if (spec.frequencies.size() != n)
        v.emplace_back("expected " + std::to_string(n) + " frequencies, got " +
                       std::to_string(spec.frequencies.size()));
    if (spec.pump_rates.size() != n)
        v.emplace_back("expected " + std::to_string(n) + " pump rates, got " +
                       std::to_string(spec.pump_rates.size()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto a = spec.adjacency[i * n + j];
            if (a > 1) v.emplace_back("adjacency entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1");
        }
        if (spec.edge(i, i)) v.emplace_back("self-loop at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j)
            if (spec.edge(i, j) && spec.edge(j, i))
                v.emplace_back("bidirectional pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    for (std::size_t k = 0; k < spec.frequencies.size(); ++k)
        if (!(spec.frequencies[k] > 0.0) || !std::isfinite(spec.frequencies[k]))
            v.emplace_back("frequency at " + std::to_string(k) + " must be positive and finite");
    for (std::size_t k = 0; k < spec.pump_rates.size(); ++k)
        if (!(spec.pump_rates[k] >= 0.0) || !std::isfinite(spec.pump_rates[k]))
            v.emplace_back("pump rate at " + std::to_string(k) + " must be non-negative and finite");
    if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma)) v.emplace_back("gamma must be positive and finite");
    return r;
}

void require_valid(const NetworkSpec& spec) {
    auto r = validate_network(spec);
    if (!r.ok()) throw ValidationError("invalid network: " + r.summary());
}

DegreeProfile degree_profile(const NetworkSpec& spec) {
    require_valid(spec);
    const std::size_t n = spec.n_nodes;
    DegreeProfile p;
    p.out_degree.assign(n, 0);
    p.in_degree.assign(n, 0);
    p.gamma_total.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (spec.edge(i, j)) {
                ++p.out_degree[i];
                ++p.in_degree[j];
            }
    for (std::size_t i = 0; i < n; ++i)
        p.gamma_total[i] = spec.gamma * static_cast<double>(p.out_degree[i] + p.in_degree[i]);
    return p;
}

Motif motif_from_name(std::string_view name) {
    static const std::pair<std::string_view, Motif> table[] = {
        {"dimer", Motif::dimer},
        {"trimer_out", Motif::trimer_out},
        {"trimer_in", Motif::trimer_in},
        {"trimer_through", Motif::trimer_through},
        {"nonloop_ring", Motif::nonloop_ring},
        {"loop_ring", Motif::loop_ring},
        {"chain", Motif::chain},
        {"branching", Motif::branching},
    };
    for (auto [k, m] : table)
        if (k == name) return m;
    throw ValidationError("unknown motif '" + std::string(name) + "'");
}

std::string_view motif_name(Motif m) {
    switch (m) {
    case Motif::dimer: return "dimer";
    case Motif::trimer_out: return "trimer_out";
    case Motif::trimer_in: return "trimer_in";
    case Motif::trimer_through: return "trimer_through";
    case Motif::nonloop_ring: return "nonloop_ring";
    case Motif::loop_ring: return "loop_ring";
    case Motif::chain: return "chain";
    case Motif::branching: return "branching";
    }
    return "?";
}

std::size_t motif_size(Motif m, const MotifParams& params) {
    if (auto n = motif_fixed_size(m)) return n;
    if (m == Motif::chain) return params.chain_length;
    std::size_t n = params.trunk_length;
    for (auto b : params.branch_lengths) n += b;
    return n;
}

std::vector<std::size_t> branching_depths(std::size_t trunk_length,
                                          const std::vector<std::size_t>& branch_lengths) {
    std::vector<std::size_t> depth;
    for (std::size_t k = 0; k < trunk_length; ++k) depth.push_back(k);
    const std::size_t longest =
        branch_lengths.empty() ? 0 : *std::max_element(branch_lengths.begin(), branch_lengths.end());
    for (std::size_t level = 1; level <= longest; ++level)
        for (auto len : branch_lengths)
            if (len >= level) depth.push_back(trunk_length - 1 + level);
    return depth;
}

NetworkSpec motif(Motif m, const MotifParams& params) {
    if (m == Motif::chain && params.chain_length == 0)
        throw ValidationError("chain needs a positive length");
    if (m == Motif::branching && params.trunk_length == 0)
        throw ValidationError("branching needs a trunk of at least one node");
    const std::size_t n = motif_size(m, params);
    if (params.frequencies.size() != n)
        throw ValidationError(std::string(motif_name(m)) + " has " + std::to_string(n) +
                              " nodes but " + std::to_string(params.frequencies.size()) +
                              " frequencies were given");
    std::vector<double> pumps = params.pump_rates;
    if (pumps.size() == 1) pumps.assign(n, pumps.front());
    if (pumps.size() != n)
        throw ValidationError(std::string(motif_name(m)) + " has " + std::to_string(n) +
                              " nodes but " + std::to_string(params.pump_rates.size()) +
                              " pump rates were given");

    std::vector<Edge> e;
    switch (m) {
    case Motif::dimer: e = {{0, 1}}; break;
    case Motif::trimer_out: e = {{1, 0}, {1, 2}}; break;
    case Motif::trimer_in: e = {{0, 1}, {2, 1}}; break;
    case Motif::trimer_through: e = {{0, 1}, {1, 2}}; break;
    case Motif::nonloop_ring: e = {{0, 1}, {1, 2}, {0, 2}}; break;
    case Motif::loop_ring: e = {{0, 1}, {1, 2}, {2, 0}}; break;
    case Motif::chain:
        for (std::size_t k = 0; k + 1 < n; ++k) e.emplace_back(k, k + 1);
        break;
    case Motif::branching: {
        const std::size_t T = params.trunk_length;
        for (std::size_t k = 0; k + 1 < T; ++k) e.emplace_back(k, k + 1);
        std::vector<std::size_t> tip(params.branch_lengths.size(), T - 1);
        std::size_t next = T;
        const std::size_t longest = params.branch_lengths.empty()
            ? 0 : *std::max_element(params.branch_lengths.begin(), params.branch_lengths.end());
        for (std::size_t level = 1; level <= longest; ++level)
            for (std::size_t b = 0; b < params.branch_lengths.size(); ++b)
                if (params.branch_lengths[b] >= level) {
                    e.emplace_back(tip[b], next);
                    tip[b] = next++;
                }
        break;
    }
    }
    auto spec = NetworkSpec::from_edges(n, e, params.frequencies, std::move(pumps), params.gamma);
    require_valid(spec);
    return spec;
}

NetworkSpec random_oriented_network(const RandomNetworkParams& p) {
    if (p.n == 0) throw ValidationError("random network needs at least one node");
    if (!(p.edge_prob >= 0.0 && p.edge_prob <= 1.0)) throw ValidationError("edge probability must lie in [0,1]");
    if (!(p.gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (!(p.eps_min > 0.0) || !(p.eps_max - p.eps_min > static_cast<double>(p.n - 1) * p.gamma))
        throw ValidationError("frequency interval [" + std::to_string(p.eps_min) + ", " +
                              std::to_string(p.eps_max) + "] cannot hold " + std::to_string(p.n) +
                              " frequencies separated by more than gamma");

    std::mt19937_64 rng(p.seed);
    NetworkSpec s;
    s.n_nodes = p.n;
    s.adjacency.assign(p.n * p.n, 0);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = i + 1; j < p.n; ++j) {
            const bool linked = unit_draw(rng) < p.edge_prob;
            const bool forward = unit_draw(rng) < 0.5;
            if (linked) forward ? s.set_edge(i, j) : s.set_edge(j, i);
        }

    std::vector<double> eps(p.n);
    std::vector<double> sorted(p.n);
    std::uint64_t attempt = 0;
    for (;;) {
        if (attempt++ >= p.max_attempts)
            throw NumericalError("frequency rejection sampling gave up after " +
                                 std::to_string(p.max_attempts) + " attempts");
        for (auto& e : eps) e = p.eps_min + (p.eps_max - p.eps_min) * unit_draw(rng);
        sorted = eps;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (std::size_t k = 1; k < sorted.size() && ok; ++k) ok = sorted[k] - sorted[k - 1] > p.gamma;
        if (ok) break;
    }
    s.frequencies = eps;
    s.pump_rates.assign(p.n, p.pump);
    s.gamma = p.gamma;
    s.seed = p.seed;
    return s;
}

std::string network_to_json(const NetworkSpec& spec) {
    nlohmann::ordered_json j;
    j["n_nodes"] = spec.n_nodes;
    auto edges = nlohmann::ordered_json::array();
    for (auto [a, b] : spec.edges()) edges.push_back({a, b});
    j["edges"] = edges;
    j["frequencies"] = spec.frequencies;
    j["pump_rates"] = spec.pump_rates;
    j["gamma"] = spec.gamma;
    if (spec.seed) j["seed"] = *spec.seed;
    return j.dump(2);
}

NetworkSpec network_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        const auto n = j.at("n_nodes").get<std::size_t>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ValidationError("edge entries must be [source, target]");
            edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
        auto spec = NetworkSpec::from_edges(n, edges, j.at("frequencies").get<std::vector<double>>(),
                                            j.at("pump_rates").get<std::vector<double>>(),
                                            j.at("gamma").get<double>());
        if (j.contains("seed") && !j["seed"].is_null()) spec.seed = j["seed"].get<std::uint64_t>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network document: ") + e.what());
    }
}

NetworkSpec load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return network_from_json(ss.str());
}

void save_network(const NetworkSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << network_to_json(spec) << '\n';
}

}  // namespace chiralsync
