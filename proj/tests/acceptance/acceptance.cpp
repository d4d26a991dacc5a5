// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "chiralsync/discord.hpp"
#include "chiralsync/errors.hpp"
#include "chiralsync/io.hpp"
#include "chiralsync/runner.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace chiralsync;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// Margins of every vacuum-initialised covariance frame seen by criteria 2..6.
double g_min_margin = std::numeric_limits<double>::infinity();
std::size_t g_frames = 0;

void track(const SyncReport& r) {
    if (!r.covariance) return;
    g_min_margin = std::min(g_min_margin, r.min_margin);
    g_frames += r.covariance->frames.size();
}

Scenario scenario(const std::string& name, const NetworkSpec& net) {
    Scenario s;
    s.name = name;
    s.network = net;
    s.time.horizon = recipes::horizon(net, 10.0);
    s.analyses.shifted = true;
    s.analyses.covariance = true;
    return s;
}

// window indices starting at t (gamma - w) >= 5
std::vector<std::size_t> late(const SyncReport& r) {
    const double rate = r.network.gamma - r.network.pump_rates[0];
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < r.window_starts.size(); ++k)
        if (r.window_starts[k] * rate >= 5.0) out.push_back(k);
    return out;
}

double min_late(const SyncReport& r, std::size_t i, std::size_t j) {
    double v = std::numeric_limits<double>::infinity();
    for (auto k : late(r)) v = std::min(v, r.sync[k].values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return v;
}

double max_late(const SyncReport& r, std::size_t i, std::size_t j) {
    double v = -std::numeric_limits<double>::infinity();
    for (auto k : late(r)) v = std::max(v, r.sync[k].values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return v;
}

// largest spectral magnitude within half a grid step of eps
double magnitude_near(const Spectrum& s, double eps) {
    const double step = s.frequencies.size() > 1 ? s.frequencies[1] - s.frequencies[0] : 1.0;
    double best = 0.0;
    for (std::size_t k = 0; k < s.frequencies.size(); ++k)
        if (std::abs(s.frequencies[k] - eps) <= 0.5 * step + 1e-12) best = std::max(best, std::abs(s.amplitudes[k]));
    return best;
}

bool near_grid(double f, double eps, const Spectrum& s) {
    const double step = s.frequencies[1] - s.frequencies[0];
    return std::abs(f - eps) <= 0.5 * step + 1e-12;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void criterion1(Outcome& o) {
    const auto net = recipes::fig2_dimer();
    const double horizon = recipes::horizon(net, 10.0);
    const double dt = default_sample_step(net);
    std::vector<double> t;
    for (std::size_t k = 0; static_cast<double>(k) * dt <= horizon; ++k) t.push_back(static_cast<double>(k) * dt);
    Eigen::VectorXcd a0(2);
    a0 << 1.0, 1.0;
    const auto tr = propagate_means(assemble_drift(net), a0, t);
    double worst = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto ref = analytic_dimer(net, {1.0, 1.0}, t[k]);
        for (int j = 0; j < 2; ++j)
            worst = std::max(worst, std::abs(tr.amplitudes(static_cast<Eigen::Index>(k), j) - ref[j]) / std::abs(ref[j]));
    }
    o.detail << "max relative error " << fmt(worst) << " over " << t.size() << " samples";
    o.require(worst <= 1e-8, "relative error <= 1e-8");
}

void criterion2(Outcome& o) {
    auto s = scenario("fig2", recipes::fig2_dimer());
    s.analyses.fourier = true;
    const auto r = run_scenario(s);
    track(r);
    const double lowest = min_late(r, 0, 1);
    const auto& spec = r.spectra[1].back();
    const double ratio = magnitude_near(spec, 1.9) / magnitude_near(spec, 1.0);
    o.detail << "late shifted Pearson min " << fmt(lowest) << ", node 2 late eps2/eps1 peak ratio " << fmt(ratio);
    o.require(!late(r).empty() && lowest > 0.99, "late windows > 0.99");
    o.require(ratio < 0.1, "eps2 peak below 10% of eps1 peak");
}

void criterion3(Outcome& o) {
    auto eq = scenario("fig3_equal", recipes::fig2_dimer(0.045));
    eq.analyses.discord_pairs = {{0, 1}};
    const auto re = run_scenario(eq);
    track(re);
    const double pear = max_late(re, 0, 1);
    // late time: every frame of the last window
    const double late_from = re.window_starts.back();
    double dmax = 0.0;
    for (std::size_t k = 0; k < re.discord[0].times.size(); ++k)
        if (re.discord[0].times[k] >= late_from)
            dmax = std::max({dmax, re.discord[0].forward[k], re.discord[0].backward[k]});

    auto f2 = scenario("fig3_fig2", recipes::fig2_dimer());
    f2.analyses.discord_pairs = {{0, 1}};
    const auto rf = run_scenario(f2);
    track(rf);
    // synchronised window: from the first late window on
    const double sync_from = rf.window_starts[late(rf).front()];
    double dmin = std::numeric_limits<double>::infinity(), asym = std::numeric_limits<double>::infinity();
    const auto& d = rf.discord[0];
    for (std::size_t k = 0; k < d.times.size(); ++k)
        if (d.times[k] >= sync_from) {
            dmin = std::min(dmin, d.forward[k]);
            asym = std::min(asym, std::abs(d.forward[k] - d.backward[k]) / std::max(d.forward[k], d.backward[k]));
        }
    o.detail << "equal pumps: late Pearson max " << fmt(pear) << ", late discord max " << fmt(dmax)
             << "; fig2 pumps: min D(1->2) " << fmt(dmin) << ", min relative asymmetry " << fmt(asym);
    o.require(pear < 0.9, "equal pumps late Pearson < 0.9");
    o.require(dmax < 1e-3, "equal pumps discord < 1e-3");
    o.require(dmin > 0.0, "D(1->2) > 0");
    o.require(asym > 0.01, "D(1->2) != D(2->1) by > 1%");
}

void criterion4(Outcome& o) {
    const double e1 = 1.5, e3 = 2.5;
    {
        auto s = scenario("trimer_out", recipes::fig4_trimer(Motif::trimer_out));
        s.analyses.fourier = true;
        const auto r = run_scenario(s);
        track(r);
        const auto& s1 = r.spectra[0].back();
        const auto& s3 = r.spectra[2].back();
        const auto p1 = dominant_peaks(s1, 0.2);
        const auto p3 = dominant_peaks(s3, 0.2);
        bool shared = false;
        for (const auto& a : p1)
            for (const auto& b : p3) shared |= std::abs(a.frequency - b.frequency) < 1e-12;
        const auto top = [](const std::vector<Peak>& p) {
            return std::max_element(p.begin(), p.end(), [](auto& a, auto& b) { return a.magnitude < b.magnitude; })->frequency;
        };
        o.require(!p1.empty() && near_grid(top(p1), e1, s1), "trimer-out node 1 peaks at eps1");
        o.require(!p3.empty() && near_grid(top(p3), e3, s3), "trimer-out node 3 peaks at eps3");
        o.require(!shared, "trimer-out no shared dominant peak");
        if (!p1.empty() && !p3.empty()) o.detail << "out: peaks " << fmt(top(p1)) << ", " << fmt(top(p3)) << "; ";
    }
    {
        auto s = scenario("trimer_in", recipes::fig4_trimer(Motif::trimer_in));
        s.analyses.fourier = true;
        const auto r = run_scenario(s);
        track(r);
        const auto& sp = r.spectra[1].back();
        auto p = dominant_peaks(sp, 0.2);
        std::sort(p.begin(), p.end(), [](auto& a, auto& b) { return a.frequency < b.frequency; });
        o.detail << "in: " << p.size() << " peaks";
        for (const auto& q : p) o.detail << " " << fmt(q.frequency);
        o.require(p.size() == 2 && near_grid(p[0].frequency, e1, sp) && near_grid(p[1].frequency, e3, sp),
                  "trimer-in node 2 has exactly two peaks at eps1, eps3");
    }
    {
        const auto r = run_scenario(scenario("trimer_through", recipes::fig4_trimer(Motif::trimer_through)));
        track(r);
        const double s12 = min_late(r, 0, 1);
        const double s3 = std::max(max_late(r, 0, 2), max_late(r, 1, 2));
        o.detail << "; through: (1,2) min " << fmt(s12) << ", node 3 max " << fmt(s3);
        o.require(s12 > 0.95, "trimer-through nodes 1-2 > 0.95");
        o.require(s3 < 0.8, "trimer-through node 3 < 0.8");
    }
}

void criterion5(Outcome& o) {
    const auto r = run_scenario(scenario("chain", recipes::fig5_chain()));
    track(r);
    std::vector<double> first(5, -1.0);
    for (std::size_t k = 1; k <= 3; ++k) {
        const double v = min_late(r, 0, k);
        o.detail << "(1," << k + 1 << ") late min " << fmt(v);
        o.require(v > 0.95, "pair (1," + std::to_string(k + 1) + ") > 0.95");
        for (std::size_t w = 0; w < r.sync.size(); ++w)
            if (r.sync[w].values(0, static_cast<Eigen::Index>(k)) > 0.9) {
                first[k] = r.window_starts[w];
                break;
            }
        o.detail << " crosses at " << fmt(first[k]) << "; ";
    }
    o.require(first[1] >= 0 && first[1] < first[2] && first[2] < first[3], "first crossings increase with k");
    const double end = max_late(r, 0, 4);
    o.detail << "(1,5) late max " << fmt(end);
    o.require(end < 0.8, "pair (1,5) < 0.8");
}

void criterion6(Outcome& o) {
    auto s = scenario("branching", recipes::fig6_branching());
    s.analyses.discord_pairs = {{0, 1}};
    const auto r = run_scenario(s);
    track(r);
    double in_min = 1.0;
    for (std::size_t k = 1; k <= 4; ++k) in_min = std::min(in_min, min_late(r, 0, k));
    const double ends = std::max(max_late(r, 0, 5), max_late(r, 0, 6));
    // pair (1,2): the input node of the pair is the one receiving the drive
    const auto& d = r.discord[0];
    const double meas_input = d.backward.back(), meas_source = d.forward.back();
    o.detail << "non-endpoints min " << fmt(in_min) << ", endpoints max " << fmt(ends) << ", D measuring input "
             << fmt(meas_input) << " vs source " << fmt(meas_source);
    o.require(in_min > 0.95, "non-endpoints > 0.95");
    o.require(ends < 0.8, "endpoints < 0.8");
    o.require(meas_input > meas_source, "discord larger measuring the input node");
}

void criterion7(Outcome& o) {
    const auto net = recipes::fig2_dimer();
    Eigen::VectorXcd a0(2);
    a0 << 0.1, 0.1;
    std::vector<double> t;
    for (int k = 0; k <= 40; ++k) t.push_back(0.5 * k);
    const std::size_t cutoff = 20;
    const auto f = fock_oracle(net, cutoff, a0, t);
    const auto m = propagate_means(assemble_drift(net), a0, t);
    const auto c = propagate_covariance(assemble_drift(net), assemble_noise(net), vacuum_covariance(2), t);
    double em = 0.0, ec = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        em = std::max(em, (f.means.row(row) - m.amplitudes.row(row)).cwiseAbs().maxCoeff());
        ec = std::max(ec, (f.moments[k] - c.frames[k]).cwiseAbs().maxCoeff());
    }
    o.detail << "cutoff " << cutoff << ", horizon " << t.back() << ", leakage " << fmt(f.leakage) << ", means err "
             << fmt(em) << ", moments err " << fmt(ec);
    o.require(f.leakage <= 1e-6, "truncation leakage within budget");
    o.require(em <= 1e-6, "means within 1e-6");
    o.require(ec <= 1e-3, "second moments within 1e-3");
}

void criterion8(Outcome& o) {
    const auto net = recipes::fig2_dimer();
    const auto d = assemble_drift(net);
    const auto s = assemble_noise(net);
    const double res = lyapunov_residual(d, s, steady_covariance(d, s).c);
    o.detail << g_frames << " frames, min margin " << fmt(g_min_margin) << ", residual/|S| " << fmt(res / s.s.norm());
    o.require(g_frames > 0 && g_min_margin >= -1e-9, "margins >= -1e-9");
    o.require(res <= 1e-10 * s.s.norm(), "Lyapunov residual <= 1e-10 |S|");
}

void criterion9(Outcome& o) {
    std::mt19937_64 rng(20240611);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto tm = TwoModeGaussian::from_matrix(testsupport::random_physical_state(rng));
        for (auto m : {Measured::first, Measured::second})
            worst = std::max(worst, std::abs(gaussian_discord(tm, m) - discord_brute_force(tm, m)));
    }
    double product = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::uniform_real_distribution<double> nu(1.0, 4.0), ang(0.0, pi), sq(-1.0, 1.0);
        Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
        for (int b = 0; b < 2; ++b) {
            const double a = ang(rng), r = sq(rng), n = nu(rng);
            Eigen::Matrix2d rot;
            rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            const Eigen::Matrix2d sqz = Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal();
            s.block<2, 2>(2 * b, 2 * b) = n * rot * sqz * sqz * rot.transpose();
        }
        const auto tm = TwoModeGaussian::from_matrix(s);
        product = std::max({product, std::abs(gaussian_discord(tm, Measured::first)),
                            std::abs(gaussian_discord(tm, Measured::second))});
    }
    o.detail << "max |closed - brute| " << fmt(worst) << " over 100 states, max product-state discord " << fmt(product);
    o.require(worst <= 1e-4, "closed form within 1e-4 of brute force");
    o.require(product <= 1e-10, "product states <= 1e-10");
}

void criterion10(Outcome& o) {
    const double t_late = 1500.0;
    std::size_t matches = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto net = random_oriented_network(recipes::fig7_network(seed));
        auto w = default_window(net);
        w.t_start = t_late;
        const double horizon = t_late + w.delta_t + w.shift_search;
        const double dt = default_sample_step(net);
        std::vector<double> t;
        for (std::size_t k = 0; static_cast<double>(k) * dt <= horizon + dt; ++k) t.push_back(static_cast<double>(k) * dt);
        const auto drift = assemble_drift(net);
        const auto means = propagate_means(drift, Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(net.n_nodes)), t);
        const auto detected = detect_communities(sync_matrix(mean_signals(means), w, true), 0.9);
        const auto predicted = predict_clusters(spectral_analysis(drift));
        bool ok = true;
        for (const auto& g : detected.groups) {
            bool inside = false;
            for (const auto& c : predicted.clusters) inside |= std::includes(c.nodes.begin(), c.nodes.end(), g.begin(), g.end());
            ok &= inside;
        }
        matches += ok;
        ++total;
    }
    const double frac = static_cast<double>(matches) / static_cast<double>(total);
    o.detail << matches << "/" << total << " networks matched";
    o.require(frac >= 0.8, "match rate >= 80%");
}

void criterion11(Outcome& o) {
    using testsupport::sample;
    const WindowSpec w{0.0, 10 * pi, 2.5 * pi, 2 * pi};
    const double dt = 2 * pi / 400;
    const auto s = sample([](double t) { return std::sin(t); }, dt, 4400);
    const auto neg = sample([](double t) { return -std::sin(t); }, dt, 4400);
    const auto c = sample([](double t) { return std::cos(t); }, dt, 4400);
    const double id = pearson(s, s, w), anti = pearson(s, neg, w), orth = pearson(s, c, w);
    o.require(std::abs(id - 1) <= 1e-6 && std::abs(anti + 1) <= 1e-6 && std::abs(orth) <= 1e-6, "trivial cases");

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    double affine = 0.0, below = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double f1 = u(rng), f2 = u(rng), ph = u(rng), alpha = u(rng), beta = u(rng) - 1.5;
        const auto a = sample([&](double t) { return std::sin(f1 * t) + 0.2 * std::cos(f2 * t); }, dt, 4400);
        const auto b = sample([&](double t) { return std::sin(f2 * t + ph); }, dt, 4400);
        auto bb = b;
        for (auto& v : bb.values) v = alpha * v + beta;
        affine = std::max(affine, std::abs(pearson(a, bb, w) - pearson(a, b, w)));
        below = std::max(below, pearson(a, b, w) - shifted_pearson(a, b, w).value);
    }
    o.require(affine <= 1e-9, "affine invariance");
    o.require(below <= 1e-12, "shifted >= unshifted");

    const double eps0 = 2 * pi / w.delta_t * 7;
    ComplexSeries tone{0.0, dt, {}};
    for (std::size_t k = 0; k < 4400; ++k) tone.values.push_back(std::exp(Complex(0, -eps0 * tone.time(k))));
    const auto grid = frequency_grid(w.delta_t, 3.0);
    const auto sp = windowed_fourier(tone, w, grid);
    const auto peaks = dominant_peaks(sp, 0.2);
    o.require(peaks.size() == 1 && peaks[0].frequency == grid[7], "pure tone peak on grid");
    o.detail << "identity " << fmt(id) << ", anti " << fmt(anti) << ", orth " << fmt(orth) << ", affine dev "
             << fmt(affine) << ", shift deficit " << fmt(below) << ", tone peak "
             << (peaks.empty() ? -1.0 : peaks[0].frequency) << " vs " << grid[7];
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double budget;  // seconds
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> all{
        {1, 1, criterion1},    {2, 5, criterion2},  {3, 10, criterion3}, {4, 10, criterion4},
        {5, 10, criterion5},   {6, 20, criterion6}, {7, 60, criterion7}, {8, 1e9, criterion8},
        {9, 1e9, criterion9},  {10, 300, criterion10}, {11, 1e9, criterion11},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget) {
            o.pass = false;
            o.detail << " [failed: runtime budget " << c.budget << " s]";
        }
        std::printf("%s criterion %d (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, secs, o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
