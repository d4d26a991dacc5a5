#include "chiralsync/dynamics.hpp"
#include "chiralsync/errors.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <boost/graph/topological_sort.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace chiralsync {

double SpectralDecomposition::lifetime(std::size_t m) const {
    const double re = eigenvalues[m].real();
    return re < 0.0 ? -1.0 / re : std::numeric_limits<double>::infinity();
}

namespace {

using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;

struct Pair {
    Complex lambda;
    Eigen::VectorXcd v;
};

// Strongly connected components in topological order, sources first.
std::vector<std::vector<Eigen::Index>> ordered_components(const NetworkSpec& spec) {
    const std::size_t n = spec.n_nodes;
    Graph g(n);
    for (auto [s, t] : spec.edges()) boost::add_edge(s, t, g);
    std::vector<int> comp(n);
    const int ncomp = boost::strong_components(g, comp.data());

    Graph cond(static_cast<std::size_t>(ncomp));
    std::set<std::pair<int, int>> seen;
    for (auto [s, t] : spec.edges()) {
        const int a = comp[s], b = comp[t];
        if (a != b && seen.emplace(a, b).second) boost::add_edge(a, b, cond);
    }
    std::vector<std::size_t> rev;
    boost::topological_sort(cond, std::back_inserter(rev));

    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(ncomp));
    for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(static_cast<Eigen::Index>(v));
    std::vector<std::vector<Eigen::Index>> out;
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) out.push_back(members[*it]);
    return out;
}

Eigen::MatrixXcd sub(const Eigen::MatrixXcd& m, const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXcd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

// Returns false when a downstream block shares the eigenvalue (Jordan coupling).
bool structured_pairs(const Eigen::MatrixXcd& m, const NetworkSpec& spec, std::vector<Pair>& pairs) {
    const Eigen::Index n = m.rows();
    const double scale = m.norm();
    const auto blocks = ordered_components(spec);
    for (std::size_t c = 0; c < blocks.size(); ++c) {
        const auto& mem = blocks[c];
        Eigen::VectorXcd lam;
        Eigen::MatrixXcd vec;
        if (mem.size() == 1) {
            lam = Eigen::VectorXcd::Constant(1, m(mem[0], mem[0]));
            vec = Eigen::MatrixXcd::Ones(1, 1);
        } else {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sub(m, mem, mem));
            if (es.info() != Eigen::Success) throw NumericalError("eigen-solver did not converge on a component block");
            lam = es.eigenvalues();
            vec = es.eigenvectors();
        }
        for (Eigen::Index k = 0; k < lam.size(); ++k) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
            for (std::size_t i = 0; i < mem.size(); ++i) v(mem[i]) = vec(i, k);
            for (std::size_t d = c + 1; d < blocks.size(); ++d) {
                const auto& dm = blocks[d];
                Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dm.size());
                for (std::size_t i = 0; i < dm.size(); ++i) rhs(i) = -(m.row(dm[i]) * v)(0);
                // unreachable from this block: stays exactly zero
                if ((rhs.array() == Complex(0.0)).all()) continue;
                Eigen::MatrixXcd shifted = sub(m, dm, dm);
                shifted.diagonal().array() -= lam(k);
                Eigen::FullPivLU<Eigen::MatrixXcd> lu(shifted);
                const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
                if (pivot <= 1e-12 * scale) return false;
                const Eigen::VectorXcd x = lu.solve(rhs);
                for (std::size_t i = 0; i < dm.size(); ++i) v(dm[i]) = x(i);
            }
            pairs.push_back({lam(k), v / v.norm()});
        }
    }
    return true;
}

void general_pairs(const Eigen::MatrixXcd& m, std::vector<Pair>& pairs) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-solver did not converge");
    pairs.clear();
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        pairs.push_back({es.eigenvalues()(k), es.eigenvectors().col(k).normalized()});
}

double residual(const Eigen::MatrixXcd& m, const std::vector<Pair>& pairs) {
    double r = 0.0;
    for (const auto& p : pairs) r = std::max(r, (m * p.v - p.lambda * p.v).norm());
    return r;
}

}  // namespace

SpectralDecomposition spectral_analysis(const DriftMatrix& drift) {
    const Eigen::MatrixXcd& m = drift.m;
    const Eigen::Index n = m.rows();
    SpectralDecomposition out;
    out.norm = m.norm();
    if (n == 0) return out;

    std::vector<Pair> pairs;
    const double tol = 1e-9 * out.norm;
    bool structured = drift.source.n_nodes == static_cast<std::size_t>(n) && structured_pairs(m, drift.source, pairs);
    if (structured && residual(m, pairs) > tol) structured = false;
    if (!structured) general_pairs(m, pairs);
    out.structured = structured;
    out.max_residual = residual(m, pairs);
    if (out.max_residual > tol)
        throw NumericalError("eigenpair residual " + std::to_string(out.max_residual) + " exceeds tolerance");

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pairs[a].lambda.real() > pairs[b].lambda.real();
    });
    out.vectors.resize(n, n);
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.eigenvalues.push_back(pairs[order[k]].lambda);
        out.vectors.col(static_cast<Eigen::Index>(k)) = pairs[order[k]].v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.vectors);
    const auto& sv = svd.singularValues();
    out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    out.diagonalizable = out.condition < 1e12;

    const double stab_tol = 1e-12 * out.norm;
    const double top = out.eigenvalues.front().real();
    if (top < -stab_tol) out.stability = Stability::stable;
    else if (std::abs(top) <= stab_tol) out.stability = Stability::marginal;
    else out.stability = Stability::unstable;
    return out;
}

ClusterPrediction predict_clusters(const SpectralDecomposition& dec, const ClusterOptions& opts) {
    ClusterPrediction out;
    out.options = opts;
    const std::size_t modes = dec.eigenvalues.size();
    const auto nodes = static_cast<std::size_t>(dec.vectors.rows());
    if (modes == 0) return out;

    std::vector<double> re(modes);
    for (std::size_t m = 0; m < modes; ++m) re[m] = dec.eigenvalues[m].real();
    const double floor = 1e-12 * std::max(dec.norm, 1.0);

    if (opts.slow_gap) {
        const double band = *opts.slow_gap * std::abs(re[0]);
        for (std::size_t m = 0; m < modes; ++m)
            if (re[m] >= re[0] - band - floor) out.slow_modes.push_back(m);
        out.gap_found = true;
    } else {
        double best = -1.0;
        std::size_t cut = modes - 1;
        for (std::size_t m = 0; m + 1 < modes; ++m) {
            const double denom = std::max({std::abs(re[m]), std::abs(re[m + 1]), floor});
            const double g = (re[m] - re[m + 1]) / denom;
            if (g > best) {
                best = g;
                cut = m;
            }
        }
        out.gap_found = best > opts.tie_tolerance;
        const std::size_t last = out.gap_found ? cut : modes - 1;
        for (std::size_t m = 0; m <= last; ++m) out.slow_modes.push_back(m);
    }

    const Eigen::MatrixXd mag = dec.vectors.cwiseAbs();
    Eigen::VectorXd peak = mag.colwise().maxCoeff();
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    out.node_mode.assign(nodes, none);
    for (std::size_t i = 0; i < nodes; ++i) {
        std::vector<std::size_t> cand;
        for (std::size_t m = 0; m < modes; ++m) {
            const double w = mag(i, m);
            if (w > 0.0 && w * w > opts.support_threshold * peak(m) * peak(m)) cand.push_back(m);
        }
        if (cand.empty()) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (auto m : cand) best = std::max(best, re[m]);
        std::vector<std::size_t> tied;
        for (auto m : cand)
            if (re[m] >= best - opts.tie_tolerance * std::abs(best) - floor) tied.push_back(m);
        auto weight = [&](std::size_t m) { return mag(i, m) / peak(m); };
        std::stable_sort(tied.begin(), tied.end(), [&](auto a, auto b) { return weight(a) > weight(b); });
        if (tied.size() == 1 || weight(tied[0]) >= opts.dominance * weight(tied[1])) out.node_mode[i] = tied[0];
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < nodes; ++i)
        if (out.node_mode[i] != none) groups[out.node_mode[i]].push_back(i);
    for (std::size_t i = 0; i < nodes; ++i)
        if (out.node_mode[i] == none || groups[out.node_mode[i]].size() < 2) out.unassigned.push_back(i);
    for (auto& [m, members] : groups) {
        if (members.size() < 2) continue;
        out.clusters.push_back({members, m, dec.frequency(m), dec.lifetime(m)});
    }
    return out;
}

}  // namespace chiralsync
