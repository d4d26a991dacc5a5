#include "chiralsync/io.hpp"
#include "chiralsync/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace chiralsync {

using json = nlohmann::ordered_json;

std::string Table::meta_value(std::string_view key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw ValidationError("table has no metadata entry '" + std::string(key) + "'");
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return k;
    throw ValidationError("table has no column '" + std::string(name) + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericalError("cannot format number");
    return std::string(buf, end);
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not a number: '" + std::string(s) + "'");
    return v;
}

std::string table_to_string(const Table& t) {
    std::string out;
    for (const auto& [k, v] : t.meta) out += "# " + k + ": " + v + "\n";
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += format_double(row[k]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Table table_from_string(std::string_view text) {
    Table t;
    bool header = false;
    std::size_t lineno = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto colon = line.find(": ");
            if (colon == std::string_view::npos) t.meta.emplace_back(std::string(line), "");
            else t.meta.emplace_back(std::string(line.substr(0, colon)), std::string(line.substr(colon + 2)));
            continue;
        }
        if (!header) {
            for (auto c : split(line, ',')) t.columns.emplace_back(c);
            header = true;
            continue;
        }
        std::vector<double> row;
        for (auto c : split(line, ',')) row.push_back(parse_double(c));
        if (row.size() != t.columns.size())
            throw ValidationError("line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                  " fields, expected " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(row));
    }
    if (!header) throw ValidationError("table has no header row");
    return t;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_table(const Table& t, const std::filesystem::path& path) { write_text(path, table_to_string(t)); }
Table read_table(const std::filesystem::path& path) { return table_from_string(read_text(path)); }

std::string content_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string spec_hash(const NetworkSpec& spec) { return content_hash(network_to_json(spec)); }

Table means_table(const MeanTrajectory& traj) {
    Table t;
    t.meta = {{"kind", "means"}, {"path", traj.path == MeanPath::eigen ? "eigen" : "integrator"},
              {"fallback", traj.fallback ? "true" : "false"}};
    const auto n = traj.amplitudes.cols();
    t.columns = {"t"};
    for (Eigen::Index k = 0; k < n; ++k) {
        t.columns.push_back("re_a" + std::to_string(k));
        t.columns.push_back("im_a" + std::to_string(k));
    }
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex a = traj.amplitudes(static_cast<Eigen::Index>(i), k);
            row.push_back(a.real());
            row.push_back(a.imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

MeanTrajectory means_from_table(const Table& t) {
    if (t.columns.empty() || t.columns[0] != "t" || t.columns.size() % 2 != 1)
        throw ValidationError("not a mean-amplitude table");
    MeanTrajectory traj;
    const auto n = static_cast<Eigen::Index>((t.columns.size() - 1) / 2);
    traj.amplitudes.resize(static_cast<Eigen::Index>(t.rows.size()), n);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        traj.times.push_back(t.rows[i][0]);
        for (Eigen::Index k = 0; k < n; ++k)
            traj.amplitudes(static_cast<Eigen::Index>(i), k) = Complex(t.rows[i][1 + 2 * k], t.rows[i][2 + 2 * k]);
    }
    for (const auto& [k, v] : t.meta) {
        if (k == "path") traj.path = v == "integrator" ? MeanPath::integrator : MeanPath::eigen;
        if (k == "fallback") traj.fallback = v == "true";
    }
    return traj;
}

std::string covariance_sidecar(std::size_t n_modes, const std::string& hash) {
    json j;
    j["ordering"] = "a_1..a_N, adag_1..adag_N";
    j["modes"] = n_modes;
    j["convention"] = "central symmetrised moments C_kj = <d_k d_j + d_j d_k>/2, vacuum a-adag block 1/2";
    j["layout"] = "lower triangle row by row, columns re_r_c and im_r_c";
    j["spec_hash"] = hash;
    return j.dump(2) + "\n";
}

Table covariance_table(const CovarianceTrajectory& traj, const std::string& hash) {
    Table t;
    const Eigen::Index dim = traj.frames.empty() ? 0 : traj.frames.front().rows();
    t.meta = {{"kind", "covariance"}, {"modes", std::to_string(dim / 2)}, {"spec_hash", hash},
              {"growth", traj.growth ? "true" : "false"}};
    t.columns = {"t"};
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c <= r; ++c) {
            t.columns.push_back("re_" + std::to_string(r) + "_" + std::to_string(c));
            t.columns.push_back("im_" + std::to_string(r) + "_" + std::to_string(c));
        }
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        row.reserve(t.columns.size());
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c <= r; ++c) {
                row.push_back(traj.frames[i](r, c).real());
                row.push_back(traj.frames[i](r, c).imag());
            }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CovarianceTrajectory covariance_from_table(const Table& t) {
    const auto dim = static_cast<Eigen::Index>(2 * std::stoul(t.meta_value("modes")));
    if (t.columns.size() != static_cast<std::size_t>(1 + dim * (dim + 1))) throw ValidationError("covariance table has the wrong width");
    CovarianceTrajectory traj;
    for (const auto& [k, v] : t.meta)
        if (k == "growth") traj.growth = v == "true";
    for (const auto& row : t.rows) {
        traj.times.push_back(row[0]);
        Eigen::MatrixXcd c(dim, dim);
        std::size_t p = 1;
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index col = 0; col <= r; ++col, p += 2) c(r, col) = c(col, r) = Complex(row[p], row[p + 1]);
        traj.frames.push_back(std::move(c));
    }
    return traj;
}

Table sync_table(std::span<const SyncMatrix> windows, const WindowSpec& w) {
    Table t;
    const auto n = windows.empty() ? 0 : windows.front().values.rows();
    t.meta = {{"kind", "sync"},
              {"signal", windows.empty() ? "re_mean" : std::string(signal_kind_name(windows.front().kind))},
              {"shifted", !windows.empty() && windows.front().shifted ? "true" : "false"},
              {"nodes", std::to_string(n)},
              {"delta_t", format_double(w.delta_t)},
              {"stride", format_double(w.stride)},
              {"shift_search", format_double(w.shift_search)}};
    t.columns = {"window_start", "i", "j", "value", "shift"};
    for (const auto& s : windows)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                t.rows.push_back({s.window_start, static_cast<double>(i), static_cast<double>(j), s.values(i, j), s.shifts(i, j)});
    return t;
}

std::vector<SyncMatrix> sync_from_table(const Table& t) {
    const auto n = static_cast<Eigen::Index>(std::stoul(t.meta_value("nodes")));
    const std::string sig = t.meta_value("signal");
    const SignalKind kind = sig == "x_squared" ? SignalKind::x_squared
                          : sig == "xy_symmetric" ? SignalKind::xy_symmetric : SignalKind::mean_real;
    const bool shifted = t.meta_value("shifted") == "true";
    std::vector<SyncMatrix> out;
    for (const auto& row : t.rows) {
        if (out.empty() || out.back().window_start != row[0]) {
            SyncMatrix s;
            s.window_start = row[0];
            s.kind = kind;
            s.shifted = shifted;
            s.values = Eigen::MatrixXd::Identity(n, n);
            s.shifts = Eigen::MatrixXd::Zero(n, n);
            out.push_back(std::move(s));
        }
        auto& s = out.back();
        const auto i = static_cast<Eigen::Index>(row[1]), j = static_cast<Eigen::Index>(row[2]);
        s.values(i, j) = s.values(j, i) = row[3];
        s.shifts(i, j) = row[4];
        s.shifts(j, i) = -row[4];
    }
    return out;
}

Table spectrum_table(std::span<const Spectrum> windows, std::size_t node) {
    Table t;
    t.meta = {{"kind", "spectrum"}, {"node", std::to_string(node)}};
    if (!windows.empty()) {
        t.meta.emplace_back("delta_t", format_double(windows.front().window.delta_t));
        t.meta.emplace_back("stride", format_double(windows.front().window.stride));
    }
    t.meta.emplace_back("kernel", "exp(+i eps tau), normalised by window length");
    t.columns = {"window_start", "frequency", "re", "im", "abs"};
    for (const auto& s : windows)
        for (std::size_t k = 0; k < s.frequencies.size(); ++k)
            t.rows.push_back({s.window.t_start, s.frequencies[k], s.amplitudes[k].real(), s.amplitudes[k].imag(),
                              std::abs(s.amplitudes[k])});
    return t;
}

std::vector<Spectrum> spectra_from_table(const Table& t) {
    double delta_t = 0.0, stride = 0.0;
    for (const auto& [k, v] : t.meta) {
        if (k == "delta_t") delta_t = parse_double(v);
        if (k == "stride") stride = parse_double(v);
    }
    std::vector<Spectrum> out;
    for (const auto& row : t.rows) {
        if (out.empty() || out.back().window.t_start != row[0]) {
            Spectrum s;
            s.window.t_start = row[0];
            s.window.delta_t = delta_t;
            s.window.stride = stride;
            out.push_back(std::move(s));
        }
        out.back().frequencies.push_back(row[1]);
        out.back().amplitudes.emplace_back(row[2], row[3]);
    }
    return out;
}

Table discord_table(const DiscordSeries& d, std::size_t i, std::size_t j) {
    Table t;
    const auto si = std::to_string(i), sj = std::to_string(j);
    t.meta = {{"kind", "discord"}, {"i", si}, {"j", sj},
              {"convention", "d_" + si + "_" + sj + " measures node " + si + "; unit-vacuum Gaussian discord in nats"}};
    t.columns = {"t", "d_" + si + "_" + sj, "d_" + sj + "_" + si};
    for (std::size_t k = 0; k < d.times.size(); ++k) t.rows.push_back({d.times[k], d.forward[k], d.backward[k]});
    return t;
}

DiscordSeries discord_from_table(const Table& t) {
    if (t.columns.size() != 3) throw ValidationError("not a discord table");
    DiscordSeries d;
    for (const auto& row : t.rows) {
        d.times.push_back(row[0]);
        d.forward.push_back(row[1]);
        d.backward.push_back(row[2]);
    }
    return d;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double from_nullable(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string_view stability_name(Stability s) {
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
    }
    return "?";
}

}  // namespace

std::string spectral_to_json(const SpectralDecomposition& dec) {
    json j;
    j["stability"] = stability_name(dec.stability);
    j["diagonalizable"] = dec.diagonalizable;
    j["condition"] = finite_or_null(dec.condition);
    j["structured"] = dec.structured;
    j["max_residual"] = dec.max_residual;
    j["norm"] = dec.norm;
    auto modes = json::array();
    for (std::size_t m = 0; m < dec.eigenvalues.size(); ++m) {
        json mode;
        mode["eigenvalue"] = {dec.eigenvalues[m].real(), dec.eigenvalues[m].imag()};
        mode["lifetime"] = finite_or_null(dec.lifetime(m));
        mode["frequency"] = dec.frequency(m);
        auto vec = json::array();
        auto weight = json::array();
        for (Eigen::Index i = 0; i < dec.vectors.rows(); ++i) {
            const Complex v = dec.vectors(i, static_cast<Eigen::Index>(m));
            vec.push_back({v.real(), v.imag()});
            weight.push_back(std::norm(v));
        }
        mode["vector"] = vec;
        mode["squared_components"] = weight;
        modes.push_back(mode);
    }
    j["modes"] = modes;
    return j.dump(2) + "\n";
}

SpectralDecomposition spectral_from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        SpectralDecomposition dec;
        const std::string st = j.at("stability").get<std::string>();
        dec.stability = st == "stable" ? Stability::stable : st == "marginal" ? Stability::marginal : Stability::unstable;
        dec.diagonalizable = j.at("diagonalizable").get<bool>();
        dec.condition = from_nullable(j.at("condition"));
        dec.structured = j.at("structured").get<bool>();
        dec.max_residual = j.at("max_residual").get<double>();
        dec.norm = j.at("norm").get<double>();
        const auto& modes = j.at("modes");
        const auto n = static_cast<Eigen::Index>(modes.size());
        dec.vectors.resize(n ? static_cast<Eigen::Index>(modes[0].at("vector").size()) : 0, n);
        for (Eigen::Index m = 0; m < n; ++m) {
            const auto& mode = modes[static_cast<std::size_t>(m)];
            dec.eigenvalues.emplace_back(mode.at("eigenvalue")[0].get<double>(), mode.at("eigenvalue")[1].get<double>());
            const auto& v = mode.at("vector");
            for (Eigen::Index i = 0; i < dec.vectors.rows(); ++i)
                dec.vectors(i, m) = Complex(v[static_cast<std::size_t>(i)][0].get<double>(), v[static_cast<std::size_t>(i)][1].get<double>());
        }
        return dec;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed spectral document: ") + e.what());
    }
}

std::string clusters_to_json(const ClusterPrediction& p) {
    json j;
    auto cl = json::array();
    for (const auto& c : p.clusters) {
        json e;
        e["nodes"] = c.nodes;
        e["mode"] = c.mode;
        e["frequency"] = c.frequency;
        e["lifetime"] = finite_or_null(c.lifetime);
        cl.push_back(e);
    }
    j["clusters"] = cl;
    j["unassigned"] = p.unassigned;
    j["slow_modes"] = p.slow_modes;
    j["gap_found"] = p.gap_found;
    json o;
    o["slow_gap"] = p.options.slow_gap ? json(*p.options.slow_gap) : json(nullptr);
    o["support_threshold"] = p.options.support_threshold;
    o["tie_tolerance"] = p.options.tie_tolerance;
    o["dominance"] = p.options.dominance;
    j["thresholds"] = o;
    return j.dump(2) + "\n";
}

ClusterPrediction clusters_from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        ClusterPrediction p;
        for (const auto& e : j.at("clusters"))
            p.clusters.push_back({e.at("nodes").get<std::vector<std::size_t>>(), e.at("mode").get<std::size_t>(),
                                  e.at("frequency").get<double>(), from_nullable(e.at("lifetime"))});
        p.unassigned = j.at("unassigned").get<std::vector<std::size_t>>();
        p.slow_modes = j.at("slow_modes").get<std::vector<std::size_t>>();
        p.gap_found = j.at("gap_found").get<bool>();
        const auto& o = j.at("thresholds");
        if (!o.at("slow_gap").is_null()) p.options.slow_gap = o["slow_gap"].get<double>();
        p.options.support_threshold = o.at("support_threshold").get<double>();
        p.options.tie_tolerance = o.at("tie_tolerance").get<double>();
        p.options.dominance = o.at("dominance").get<double>();
        return p;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed cluster document: ") + e.what());
    }
}

}  // namespace chiralsync
