#include "chiralsync/errors.hpp"
#include "chiralsync/io.hpp"
#include "chiralsync/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <iostream>

namespace chiralsync {

namespace recipes {

NetworkSpec fig2_dimer(double w2) {
    MotifParams p;
    p.gamma = 0.05;
    p.frequencies = {1.0, 1.9};
    p.pump_rates = {0.9 * p.gamma, w2};
    return motif(Motif::dimer, p);
}

NetworkSpec fig4_trimer(Motif kind) {
    MotifParams p;
    p.gamma = 0.05;
    p.frequencies = {1.5, 2.0, 2.5};
    p.pump_rates = {0.045};
    return motif(kind, p);
}

NetworkSpec fig5_chain() {
    MotifParams p;
    p.gamma = 0.05;
    p.frequencies = {1.2, 1.4, 1.6, 1.8, 2.0};
    p.pump_rates = {0.045};
    p.chain_length = 5;
    return motif(Motif::chain, p);
}

NetworkSpec fig6_branching() {
    MotifParams p;
    p.gamma = 0.05;
    p.pump_rates = {0.045};
    p.trunk_length = 3;
    p.branch_lengths = {2, 2};
    // one frequency per depth, equally spaced from 1.2 to 2.2
    const auto depth = branching_depths(p.trunk_length, p.branch_lengths);
    const double deepest = static_cast<double>(*std::max_element(depth.begin(), depth.end()));
    for (auto d : depth) p.frequencies.push_back(1.2 + 1.0 * static_cast<double>(d) / deepest);
    return motif(Motif::branching, p);
}

RandomNetworkParams fig7_network(std::uint64_t seed) {
    RandomNetworkParams p;
    p.n = 15;
    p.edge_prob = 0.2;
    p.eps_min = 1.2;
    p.eps_max = 4.0;
    p.gamma = 0.05;
    p.pump = 0.045;
    p.seed = seed;
    return p;
}

double horizon(const NetworkSpec& spec, double units, std::size_t reference_node) {
    const double rate = spec.gamma - spec.pump_rates.at(reference_node);
    if (!(rate > 0.0)) throw ValidationError("time unit 1/(gamma - w) is undefined for a marginal node");
    return units / rate;
}

}  // namespace recipes

namespace {

using json = nlohmann::ordered_json;

struct Recorder {
    std::filesystem::path root;
    std::vector<std::string> files;
    bool quiet;

    void table(const Table& t, const std::string& rel) {
        write_table(t, root / rel);
        files.push_back((root / rel).string());
    }
    void text(const std::string& s, const std::string& rel) {
        write_text(root / rel, s);
        files.push_back((root / rel).string());
    }
    void report(SyncReport& r, const std::string& sub, bool covariance = true) {
        write_report(r, root / sub, covariance);
        for (const auto& f : r.files) files.push_back((root / sub / f).string());
    }
    void say(const std::string& msg) const {
        if (!quiet) std::cout << msg << '\n';
    }
};

Scenario base(const std::string& name, const NetworkSpec& net, double units) {
    Scenario s;
    s.name = name;
    s.network = net;
    s.time.horizon = recipes::horizon(net, units);
    s.analyses.shifted = true;
    s.analyses.fourier = true;
    return s;
}

// window_start, t in 1/(gamma - w) units, then one column per requested pair
Table pair_curves(const SyncReport& r, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                  const std::vector<SyncMatrix>& sync, double rate, const std::string& what) {
    Table t;
    t.meta = {{"kind", what}, {"time_unit", "1/(gamma - w) = " + format_double(1.0 / rate)},
              {"delta_t", format_double(r.window.delta_t)}, {"shift_search", format_double(r.window.shift_search)}};
    t.columns = {"window_start", "window_start_scaled"};
    for (auto [i, j] : pairs) t.columns.push_back("c_" + std::to_string(i) + "_" + std::to_string(j));
    for (const auto& s : sync) {
        std::vector<double> row{s.window_start, s.window_start * rate};
        for (auto [i, j] : pairs) row.push_back(s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table scaled_discord(const DiscordSeries& d, std::size_t i, std::size_t j, double rate, std::size_t every) {
    Table t = discord_table(d, i, j);
    t.meta.emplace_back("time_unit", "1/(gamma - w) = " + format_double(1.0 / rate));
    t.columns.insert(t.columns.begin() + 1, "t_scaled");
    Table out = t;
    out.rows.clear();
    for (std::size_t k = 0; k < t.rows.size(); k += every) {
        auto row = t.rows[k];
        row.insert(row.begin() + 1, row[0] * rate);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

void figure2(Recorder& rec) {
    const auto net = recipes::fig2_dimer();
    auto s = base("fig2", net, 10.0);
    s.analyses.pearson = true;
    s.analyses.clusters = true;
    auto r = run_scenario(s);
    const double rate = net.gamma - net.pump_rates[0];
    rec.report(r, "scenario");
    // plain and shift-optimised curves side by side
    Scenario plain = s;
    plain.analyses = {};
    plain.analyses.pearson = true;
    auto rp = run_scenario(plain);
    Table t = pair_curves(r, {{0, 1}}, r.sync, rate, "pearson curve");
    t.columns.push_back("plain_0_1");
    for (std::size_t k = 0; k < t.rows.size() && k < rp.sync.size(); ++k) t.rows[k].push_back(rp.sync[k].values(0, 1));
    rec.table(t, "pearson_curve.csv");
    rec.say("fig2: " + std::to_string(r.window_starts.size()) + " windows");
}

void figure3(Recorder& rec) {
    for (const auto& [tag, w2] : {std::pair<std::string, double>{"fig2_pumps", 0.0}, {"equal_pumps", 0.045}}) {
        const auto net = recipes::fig2_dimer(w2);
        auto s = base("fig3_" + tag, net, 10.0);
        s.analyses.fourier = false;
        s.analyses.covariance = true;
        s.analyses.quadrature_sync = true;
        s.analyses.discord_pairs = {{0, 1}};
        auto r = run_scenario(s);
        const double rate = net.gamma - net.pump_rates[0];
        rec.report(r, tag, false);
        Table t = pair_curves(r, {{0, 1}}, r.sync_x2, rate, "pearson of <x^2>");
        t.columns.push_back("xy_0_1");
        for (std::size_t k = 0; k < t.rows.size(); ++k) t.rows[k].push_back(r.sync_xy[k].values(0, 1));
        t.columns[2] = "x2_0_1";
        rec.table(t, tag + "/quadrature_pearson.csv");
        rec.table(scaled_discord(r.discord.front(), 0, 1, rate, 10), tag + "/discord_curve.csv");
        rec.say("fig3 " + tag + ": min margin " + format_double(r.min_margin));
    }
}

void figure4(Recorder& rec) {
    for (auto kind : {Motif::trimer_out, Motif::trimer_in, Motif::trimer_through}) {
        const auto net = recipes::fig4_trimer(kind);
        const std::string tag(motif_name(kind));
        auto s = base("fig4_" + tag, net, 10.0);
        s.analyses.covariance = true;
        s.analyses.discord_pairs = all_pairs(3);
        auto r = run_scenario(s);
        const double rate = net.gamma - net.pump_rates[0];
        rec.report(r, tag, false);
        rec.table(pair_curves(r, all_pairs(3), r.sync, rate, "shifted pearson"), tag + "/pearson_pairs.csv");
        for (std::size_t k = 0; k < r.discord.size(); ++k) {
            const auto [i, j] = r.discord_pairs[k];
            rec.table(scaled_discord(r.discord[k], i, j, rate, 10),
                      tag + "/discord_curve_" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
        }
        rec.say("fig4 " + tag + " done");
    }
}

void figure5(Recorder& rec) {
    const auto net = recipes::fig5_chain();
    auto s = base("fig5", net, 10.0);
    auto r = run_scenario(s);
    const double rate = net.gamma - net.pump_rates[0];
    rec.report(r, "scenario");
    rec.table(pair_curves(r, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, r.sync, rate, "shifted pearson with node 0"),
              "pearson_with_first.csv");
    rec.say("fig5 done");
}

void figure6(Recorder& rec) {
    const auto net = recipes::fig6_branching();
    auto s = base("fig6", net, 10.0);
    s.analyses.discord_pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {2, 4}, {4, 6}};
    auto r = run_scenario(s);
    const double rate = net.gamma - net.pump_rates[0];
    rec.report(r, "scenario", false);
    std::vector<std::pair<std::size_t, std::size_t>> with_first;
    for (std::size_t k = 1; k < net.n_nodes; ++k) with_first.emplace_back(0, k);
    rec.table(pair_curves(r, with_first, r.sync, rate, "shifted pearson with node 0"), "pearson_with_first.csv");
    for (std::size_t k = 0; k < r.discord.size(); ++k) {
        const auto [i, j] = r.discord_pairs[k];
        rec.table(scaled_discord(r.discord[k], i, j, rate, 10),
                  "discord_curve_" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
    }
    rec.say("fig6 done");
}

void figure7(Recorder& rec, std::uint64_t seed) {
    Scenario s;
    s.name = "fig7";
    s.generator = recipes::fig7_network(seed);
    s.time.horizon = 10.0 / (0.05 - 0.045);
    s.analyses.shifted = true;
    s.analyses.clusters = true;
    auto r = run_scenario(s);
    const double rate = r.network.gamma - r.network.pump_rates[0];
    rec.report(r, "scenario");

    const auto sig = mean_signals(r.means);
    Table t;
    t.meta = {{"kind", "collective index"}, {"time_unit", "1/(gamma - w) = " + format_double(1.0 / rate)},
              {"seed", std::to_string(seed)}};
    t.columns = {"window_start", "window_start_scaled"};
    for (std::size_t c = 0; c < r.clusters->clusters.size(); ++c) {
        std::string name = "s";
        for (auto k : r.clusters->clusters[c].nodes) name += "_" + std::to_string(k);
        t.columns.push_back(name);
    }
    for (double t0 : r.window_starts) {
        WindowSpec w = r.window;
        w.t_start = t0;
        std::vector<double> row{t0, t0 * rate};
        for (const auto& c : r.clusters->clusters) row.push_back(collective_index(sig, c.nodes, w, true));
        t.rows.push_back(std::move(row));
    }
    rec.table(t, "collective_index.csv");

    json cmp;
    cmp["seed"] = seed;
    auto pred = json::array();
    for (const auto& c : r.clusters->clusters) pred.push_back(c.nodes);
    cmp["predicted"] = pred;
    cmp["predicted_unassigned"] = r.clusters->unassigned;
    const auto& late = r.communities.back();
    cmp["detected_late_window_start"] = r.window_starts.back();
    cmp["detected"] = late.groups;
    cmp["detected_unsynchronised"] = late.unsynchronised;
    rec.text(cmp.dump(2) + "\n", "clusters_compare.json");
    rec.say("fig7: " + std::to_string(r.clusters->clusters.size()) + " predicted clusters");
}

void figure8(Recorder& rec, std::uint64_t seed) {
    const auto net = random_oriented_network(recipes::fig7_network(seed));
    const auto dec = spectral_analysis(assemble_drift(net));
    const auto pred = predict_clusters(dec);
    rec.text(network_to_json(net) + "\n", "network.json");
    rec.text(spectral_to_json(dec), "spectral.json");
    rec.text(clusters_to_json(pred), "clusters.json");

    // three slowest distinct modes that govern at least one node, falling back to the slowest overall
    std::vector<std::size_t> modes;
    for (const auto& c : pred.clusters) modes.push_back(c.mode);
    std::sort(modes.begin(), modes.end());
    for (std::size_t m = 0; modes.size() < 3 && m < dec.eigenvalues.size(); ++m)
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    std::sort(modes.begin(), modes.end());
    modes.resize(std::min<std::size_t>(3, modes.size()));

    Table t;
    t.meta = {{"kind", "squared eigenvector components"}, {"seed", std::to_string(seed)}};
    for (auto m : modes)
        t.meta.emplace_back("mode_" + std::to_string(m), "lambda = " + format_double(dec.eigenvalues[m].real()) + " " +
                                                             format_double(dec.eigenvalues[m].imag()) + "i");
    t.columns = {"node"};
    for (auto m : modes) t.columns.push_back("mode_" + std::to_string(m));
    for (Eigen::Index i = 0; i < dec.vectors.rows(); ++i) {
        std::vector<double> row{static_cast<double>(i)};
        for (auto m : modes) row.push_back(std::norm(dec.vectors(i, static_cast<Eigen::Index>(m))));
        t.rows.push_back(std::move(row));
    }
    rec.table(t, "eigen_components.csv");
    rec.say("fig8: modes table written");
}

}  // namespace

std::vector<std::string> reproduce_figure(int id, const std::filesystem::path& out_dir,
                                          std::optional<std::uint64_t> seed, bool quiet) {
    Recorder rec{out_dir / ("fig" + std::to_string(id)), {}, quiet};
    const std::uint64_t s = seed.value_or(recipes::fig7_default_seed);
    switch (id) {
    case 2: figure2(rec); break;
    case 3: figure3(rec); break;
    case 4: figure4(rec); break;
    case 5: figure5(rec); break;
    case 6: figure6(rec); break;
    case 7: figure7(rec, s); break;
    case 8: figure8(rec, s); break;
    default: throw ValidationError("figure id must be between 2 and 8");
    }
    return rec.files;
}

}  // namespace chiralsync
