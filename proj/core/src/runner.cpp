#include "chiralsync/runner.hpp"
#include "chiralsync/errors.hpp"
#include "chiralsync/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace chiralsync {

using json = nlohmann::ordered_json;

namespace {

std::size_t node_count(const Scenario& s) {
    if (s.network) return s.network->n_nodes;
    if (s.generator) return s.generator->n;
    return 0;
}

}  // namespace

void validate_scenario(const Scenario& s) {
    if (s.network.has_value() == s.generator.has_value())
        throw ValidationError("scenario needs exactly one of network or generator");
    if (s.network) require_valid(*s.network);
    if (!(s.time.horizon > 0.0)) throw ValidationError("horizon must be positive");
    if (s.time.sample_step && !(*s.time.sample_step > 0.0)) throw ValidationError("sample step must be positive");
    if (s.windows) check_window(*s.windows);
    const std::size_t n = node_count(s);
    if (s.initial_amplitudes && static_cast<std::size_t>(s.initial_amplitudes->size()) != n)
        throw ValidationError("initial amplitudes do not match the node count");
    for (auto [i, j] : s.analyses.discord_pairs)
        if (i == j || i >= n || j >= n)
            throw ValidationError("invalid discord pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (s.analyses.quadrature_sync && !s.analyses.pearson && !s.analyses.shifted)
        throw ValidationError("quadrature_sync needs pearson or shifted");
}

NetworkSpec resolve_network(const Scenario& s) {
    validate_scenario(s);
    if (s.network) return *s.network;
    auto p = *s.generator;
    if (s.seed) p.seed = *s.seed;
    return random_oriented_network(p);
}

namespace {

json complex_vector(const Eigen::VectorXcd& v) {
    auto a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
    return a;
}

Eigen::VectorXcd complex_vector(const json& j) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& e = j[k];
        v(static_cast<Eigen::Index>(k)) = e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>())
                                                      : Complex(e.get<double>(), 0.0);
    }
    return v;
}

json scenario_json(const Scenario& s, bool with_output) {
    json j;
    j["name"] = s.name;
    if (s.network) j["network"] = json::parse(network_to_json(*s.network));
    if (s.generator) {
        const auto& g = *s.generator;
        j["generator"] = {{"n", g.n}, {"edge_prob", g.edge_prob}, {"eps_min", g.eps_min}, {"eps_max", g.eps_max},
                          {"gamma", g.gamma}, {"pump", g.pump}, {"seed", g.seed}, {"max_attempts", g.max_attempts}};
    }
    if (s.initial_amplitudes) j["initial_amplitudes"] = complex_vector(*s.initial_amplitudes);
    j["time"]["horizon"] = s.time.horizon;
    if (s.time.sample_step) j["time"]["sample_step"] = *s.time.sample_step;
    if (s.windows)
        j["windows"] = {{"t_start", s.windows->t_start}, {"delta_t", s.windows->delta_t},
                        {"stride", s.windows->stride}, {"shift_search", s.windows->shift_search}};
    const auto& a = s.analyses;
    j["analyses"] = {{"means", a.means}, {"covariance", a.covariance}, {"pearson", a.pearson},
                     {"shifted", a.shifted}, {"fourier", a.fourier}, {"clusters", a.clusters},
                     {"quadrature_sync", a.quadrature_sync}};
    auto pairs = json::array();
    for (auto [p, q] : a.discord_pairs) pairs.push_back({p, q});
    j["analyses"]["discord_pairs"] = pairs;
    if (with_output) j["output_dir"] = s.output_dir;
    if (s.seed) j["seed"] = *s.seed;
    j["detection_threshold"] = s.detection_threshold;
    j["peak_threshold"] = s.peak_threshold;
    if (s.fourier_max) j["fourier_max"] = *s.fourier_max;
    j["export_covariance"] = s.export_covariance;
    const auto& c = s.cluster_options;
    j["cluster_options"] = {{"support_threshold", c.support_threshold}, {"tie_tolerance", c.tie_tolerance},
                            {"dominance", c.dominance}};
    if (c.slow_gap) j["cluster_options"]["slow_gap"] = *c.slow_gap;
    return j;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) { return scenario_json(s, true).dump(2) + "\n"; }

Scenario scenario_from_json(std::string_view text) {
    Scenario s;
    try {
        const auto j = json::parse(text);
        s.name = j.value("name", std::string("scenario"));
        if (j.contains("network")) s.network = network_from_json(j["network"].dump());
        if (j.contains("motif")) {
            if (s.network) throw ValidationError("scenario gives both network and motif");
            const auto& m = j["motif"];
            MotifParams p;
            p.frequencies = m.at("frequencies").get<std::vector<double>>();
            p.pump_rates = m.at("pump_rates").get<std::vector<double>>();
            p.gamma = m.at("gamma").get<double>();
            p.chain_length = m.value("chain_length", std::size_t{0});
            p.trunk_length = m.value("trunk_length", std::size_t{0});
            p.branch_lengths = m.value("branch_lengths", std::vector<std::size_t>{});
            s.network = motif(motif_from_name(m.at("name").get<std::string>()), p);
        }
        if (j.contains("generator")) {
            const auto& g = j["generator"];
            RandomNetworkParams p;
            p.n = g.value("n", p.n);
            p.edge_prob = g.value("edge_prob", p.edge_prob);
            p.eps_min = g.value("eps_min", p.eps_min);
            p.eps_max = g.value("eps_max", p.eps_max);
            p.gamma = g.value("gamma", p.gamma);
            p.pump = g.value("pump", p.pump);
            p.seed = g.value("seed", p.seed);
            p.max_attempts = g.value("max_attempts", p.max_attempts);
            s.generator = p;
        }
        if (j.contains("initial_amplitudes")) s.initial_amplitudes = complex_vector(j["initial_amplitudes"]);
        s.time.horizon = j.at("time").at("horizon").get<double>();
        if (j["time"].contains("sample_step")) s.time.sample_step = j["time"]["sample_step"].get<double>();
        if (j.contains("windows")) {
            const auto& w = j["windows"];
            WindowSpec ws;
            ws.t_start = w.value("t_start", 0.0);
            ws.delta_t = w.at("delta_t").get<double>();
            ws.stride = w.value("stride", ws.delta_t / 4.0);
            ws.shift_search = w.value("shift_search", 0.0);
            s.windows = ws;
        }
        if (j.contains("analyses")) {
            const auto& a = j["analyses"];
            auto& f = s.analyses;
            f.means = a.value("means", f.means);
            f.covariance = a.value("covariance", f.covariance);
            f.pearson = a.value("pearson", f.pearson);
            f.shifted = a.value("shifted", f.shifted);
            f.fourier = a.value("fourier", f.fourier);
            f.clusters = a.value("clusters", f.clusters);
            f.quadrature_sync = a.value("quadrature_sync", f.quadrature_sync);
            if (a.contains("discord_pairs"))
                for (const auto& p : a["discord_pairs"]) f.discord_pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
        }
        s.output_dir = j.value("output_dir", std::string());
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
        s.detection_threshold = j.value("detection_threshold", s.detection_threshold);
        s.peak_threshold = j.value("peak_threshold", s.peak_threshold);
        if (j.contains("fourier_max")) s.fourier_max = j["fourier_max"].get<double>();
        s.export_covariance = j.value("export_covariance", s.export_covariance);
        if (j.contains("cluster_options")) {
            const auto& c = j["cluster_options"];
            auto& o = s.cluster_options;
            o.support_threshold = c.value("support_threshold", o.support_threshold);
            o.tie_tolerance = c.value("tie_tolerance", o.tie_tolerance);
            o.dominance = c.value("dominance", o.dominance);
            if (c.contains("slow_gap")) o.slow_gap = c["slow_gap"].get<double>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario: ") + e.what());
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_text(path)); }

SyncReport run_scenario(const Scenario& s) {
    const auto started = std::chrono::steady_clock::now();
    SyncReport r;
    r.scenario_name = s.name;
    try {
        r.network = resolve_network(s);
        r.spec_hash = spec_hash(r.network);
        Scenario canonical = s;
        canonical.network = r.network;
        canonical.generator.reset();
        r.scenario_hash = content_hash(scenario_json(canonical, false).dump());

        const auto& net = r.network;
        const auto n = static_cast<Eigen::Index>(net.n_nodes);
        const double dt = s.time.sample_step.value_or(default_sample_step(net));
        const auto samples = static_cast<std::size_t>(std::floor(s.time.horizon / dt + 1e-9)) + 1;
        std::vector<double> times(samples);
        for (std::size_t i = 0; i < samples; ++i) times[i] = static_cast<double>(i) * dt;

        const auto drift = assemble_drift(net);
        const Eigen::VectorXcd a0 = s.initial_amplitudes.value_or(Eigen::VectorXcd::Ones(n));
        r.means = propagate_means(drift, a0, times);

        const auto& f = s.analyses;
        if (f.covariance || f.quadrature_sync || !f.discord_pairs.empty()) {
            r.covariance = propagate_covariance(drift, assemble_noise(net), vacuum_covariance(net.n_nodes), times);
            r.min_margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < r.covariance->frames.size(); ++k) {
                try {
                    r.min_margin = std::min(r.min_margin, physicality_check(to_quadrature({r.covariance->frames[k], times[k]})));
                } catch (const NumericalError& e) {
                    throw NumericalError("covariance frame at t=" + std::to_string(times[k]) + ": " + e.what());
                }
            }
        }

        r.window = s.windows.value_or(default_window(net));
        const bool any_sync = f.pearson || f.shifted;
        const double margin = f.shifted ? r.window.shift_search + 3.0 * dt : 0.0;
        if (any_sync || f.fourier) r.window_starts = window_starts(r.window, times.back(), any_sync ? margin : 0.0, r.window.t_start);

        if (any_sync) {
            const auto sig = mean_signals(r.means);
            for (double t0 : r.window_starts) {
                WindowSpec w = r.window;
                w.t_start = t0;
                r.sync.push_back(sync_matrix(sig, w, f.shifted, SignalKind::mean_real));
                r.communities.push_back(detect_communities(r.sync.back(), s.detection_threshold));
            }
            if (f.quadrature_sync) {
                const auto x2 = quadrature_signals(r.means, *r.covariance, SignalKind::x_squared);
                const auto xy = quadrature_signals(r.means, *r.covariance, SignalKind::xy_symmetric);
                for (double t0 : r.window_starts) {
                    WindowSpec w = r.window;
                    w.t_start = t0;
                    r.sync_x2.push_back(sync_matrix(x2, w, f.shifted, SignalKind::x_squared));
                    r.sync_xy.push_back(sync_matrix(xy, w, f.shifted, SignalKind::xy_symmetric));
                }
            }
        }

        if (f.fourier) {
            const double eps_max = *std::max_element(net.frequencies.begin(), net.frequencies.end());
            const auto grid = frequency_grid(r.window.delta_t, s.fourier_max.value_or(1.25 * eps_max));
            const auto sig = mean_signals(r.means);
            r.spectra.resize(net.n_nodes);
            for (std::size_t k = 0; k < net.n_nodes; ++k)
                for (double t0 : r.window_starts) {
                    WindowSpec w = r.window;
                    w.t_start = t0;
                    r.spectra[k].push_back(windowed_fourier(sig[k], w, grid));
                }
        }

        if (f.clusters) {
            r.spectral = spectral_analysis(drift);
            r.clusters = predict_clusters(*r.spectral, s.cluster_options);
        }

        for (auto [i, j] : f.discord_pairs) {
            r.discord_pairs.emplace_back(i, j);
            r.discord.push_back(discord_trajectory(*r.covariance, i, j));
        }
    } catch (const ValidationError& e) {
        throw ValidationError("scenario '" + s.name + "': " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError("scenario '" + s.name + "': " + e.what());
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!s.output_dir.empty()) write_report(r, s.output_dir, s.export_covariance);
    return r;
}

std::string report_summary_json(const SyncReport& r) {
    json j;
    j["scenario"] = r.scenario_name;
    j["scenario_hash"] = r.scenario_hash;
    j["spec_hash"] = r.spec_hash;
    j["nodes"] = r.network.n_nodes;
    j["conventions"] = {
        {"adjacency", "edge [s, t] means node s drives node t, nodes 0-based"},
        {"drift", "M[k][k] = (w_k - Gamma_kk)/2 - i eps_k, M[t][s] = -gamma"},
        {"mean_signal", "Re<a_k>"},
        {"covariance", "central symmetrised moments, ordering (a, adag), vacuum a-adag block 1/2"},
        {"quadratures", "x = (a + adag)/2, y = -i (a - adag)/2, vacuum variance 1/4"},
        {"fourier_kernel", "exp(+i eps tau) / delta_t, trapezoidal"},
        {"pearson", "trapezoidal weighted correlation with square-root normalisation"},
        {"discord", "d_i_j measures node i; unit-vacuum Gaussian discord in nats"},
        {"mode_frequency", "-Im lambda"}};
    j["window"] = {{"delta_t", r.window.delta_t}, {"stride", r.window.stride}, {"shift_search", r.window.shift_search}};
    j["samples"] = r.means.times.size();
    j["mean_path"] = r.means.path == MeanPath::eigen ? "eigen" : "integrator";
    j["mean_fallback"] = r.means.fallback;
    if (r.covariance) {
        j["min_symplectic_margin"] = r.min_margin;
        j["covariance_growth"] = r.covariance->growth;
    }
    auto wins = json::array();
    for (std::size_t k = 0; k < r.communities.size(); ++k)
        wins.push_back({{"window_start", r.window_starts[k]}, {"communities", r.communities[k].groups},
                        {"unsynchronised", r.communities[k].unsynchronised}});
    j["detected_communities"] = wins;
    if (r.clusters) {
        auto cl = json::array();
        for (const auto& c : r.clusters->clusters) cl.push_back(c.nodes);
        j["predicted_clusters"] = cl;
        j["spectral_gap_found"] = r.clusters->gap_found;
    }
    j["files"] = r.files;
    return j.dump(2) + "\n";
}

void write_report(SyncReport& r, const std::filesystem::path& dir, bool export_covariance) {
    std::filesystem::create_directories(dir);
    r.files.clear();
    auto put_table = [&](const Table& t, const std::string& name) {
        write_table(t, dir / name);
        r.files.push_back(name);
    };
    auto put_text = [&](const std::string& text, const std::string& name) {
        write_text(dir / name, text);
        r.files.push_back(name);
    };

    put_text(network_to_json(r.network) + "\n", "network.json");
    put_table(means_table(r.means), "means.csv");
    if (r.covariance && export_covariance) {
        put_table(covariance_table(*r.covariance, r.spec_hash), "covariance.csv");
        put_text(covariance_sidecar(r.network.n_nodes, r.spec_hash), "covariance.meta.json");
    }
    if (!r.sync.empty()) put_table(sync_table(r.sync, r.window), "sync.csv");
    if (!r.sync_x2.empty()) put_table(sync_table(r.sync_x2, r.window), "sync_x2.csv");
    if (!r.sync_xy.empty()) put_table(sync_table(r.sync_xy, r.window), "sync_xy.csv");
    for (std::size_t k = 0; k < r.spectra.size(); ++k)
        put_table(spectrum_table(r.spectra[k], k), "spectrum_node" + std::to_string(k) + ".csv");
    if (r.spectral) put_text(spectral_to_json(*r.spectral), "spectral.json");
    if (r.clusters) put_text(clusters_to_json(*r.clusters), "clusters.json");
    for (std::size_t k = 0; k < r.discord.size(); ++k) {
        const auto [i, j] = r.discord_pairs[k];
        put_table(discord_table(r.discord[k], i, j), "discord_" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
    }
    r.files.push_back("summary.json");
    write_text(dir / "summary.json", report_summary_json(r));
    // kept apart so every other file is reproducible byte for byte
    json timing;
    timing["wall_clock_seconds"] = r.wall_seconds;
    write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace chiralsync
