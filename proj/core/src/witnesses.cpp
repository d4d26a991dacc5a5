#include "chiralsync/witnesses.hpp"
#include "chiralsync/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace chiralsync {

void check_window(const WindowSpec& w) {
    if (!(w.delta_t > 0.0)) throw ValidationError("window length must be positive");
    if (!(w.stride > 0.0)) throw ValidationError("window stride must be positive");
    if (!(w.shift_search >= 0.0)) throw ValidationError("shift search must be non-negative");
}

WindowSpec default_window(const NetworkSpec& spec) {
    require_valid(spec);
    const double eps_min = *std::min_element(spec.frequencies.begin(), spec.frequencies.end());
    const double period = 2.0 * std::numbers::pi / eps_min;
    WindowSpec w;
    w.delta_t = 20.0 * period;
    w.stride = w.delta_t / 4.0;
    w.shift_search = period;
    return w;
}

double default_sample_step(const NetworkSpec& spec) {
    require_valid(spec);
    const double eps_max = *std::max_element(spec.frequencies.begin(), spec.frequencies.end());
    return 2.0 * std::numbers::pi / eps_max / 20.0;
}

std::vector<double> window_starts(const WindowSpec& w, double horizon, double margin, double t_first) {
    check_window(w);
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double t = t_first + static_cast<double>(k) * w.stride;
        if (t + w.delta_t + margin > horizon * (1.0 + 1e-12)) break;
        out.push_back(t);
    }
    return out;
}

namespace {

struct Span {
    std::size_t first;
    std::size_t last;  // inclusive
};

template <class T>
Span window_span(const Series<T>& s, double t_start, double delta_t, std::size_t extra = 0) {
    if (!(s.dt > 0.0)) throw ValidationError("series sample step must be positive");
    const double lo = (t_start - s.t0) / s.dt;
    const double hi = (t_start + delta_t - s.t0) / s.dt;
    const double first = std::ceil(lo - 1e-9);
    const double last = std::floor(hi + 1e-9);
    if (first < 0.0 || last + static_cast<double>(extra) > static_cast<double>(s.size()) - 1.0)
        throw ValidationError("series does not cover the window [" + std::to_string(t_start) + ", " +
                              std::to_string(t_start + delta_t) + "]" + (extra ? " plus shift margin" : ""));
    if (last - first < 2.0) throw ValidationError("window holds fewer than three samples");
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

double trapezoid_weight(std::size_t i, const Span& sp) { return i == sp.first || i == sp.last ? 0.5 : 1.0; }

// Pearson over the span of a against b read through `at(i)`.
template <class At>
double weighted_pearson(const RealSeries& a, const Span& sp, At at) {
    double wsum = 0.0, ma = 0.0, mb = 0.0, scale_a = 0.0, scale_b = 0.0;
    for (std::size_t i = sp.first; i <= sp.last; ++i) {
        const double w = trapezoid_weight(i, sp);
        const double bi = at(i);
        wsum += w;
        ma += w * a.values[i];
        mb += w * bi;
        scale_a = std::max(scale_a, std::abs(a.values[i]));
        scale_b = std::max(scale_b, std::abs(bi));
    }
    ma /= wsum;
    mb /= wsum;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = sp.first; i <= sp.last; ++i) {
        const double w = trapezoid_weight(i, sp);
        const double da = a.values[i] - ma, db = at(i) - mb;
        sab += w * da * db;
        saa += w * da * da;
        sbb += w * db * db;
    }
    const double floor_a = 1e-24 * scale_a * scale_a * wsum;
    const double floor_b = 1e-24 * scale_b * scale_b * wsum;
    if (!(saa > floor_a) || !(sbb > floor_b)) throw NumericalError("degenerate window: signal has no variance");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_same_grid(const RealSeries& a, const RealSeries& b) {
    if (std::abs(a.dt - b.dt) > 1e-12 * a.dt || std::abs(a.t0 - b.t0) > 1e-9 * std::max(1.0, a.dt))
        throw ValidationError("signals are sampled on different grids");
}

// Cubic Lagrange interpolation of b at sample position x (in units of dt).
double interpolate(const RealSeries& b, double x) {
    const auto n = static_cast<long>(b.size());
    const long j = std::clamp(static_cast<long>(std::floor(x)), 1L, n - 3);
    const double u = x - static_cast<double>(j);
    const double* p = b.values.data() + j;
    return -u * (u - 1.0) * (u - 2.0) / 6.0 * p[-1] + (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0 * p[0] -
           (u + 1.0) * u * (u - 2.0) / 2.0 * p[1] + (u + 1.0) * u * (u - 1.0) / 6.0 * p[2];
}

template <class T>
Spectrum fourier_impl(const Series<T>& s, const WindowSpec& w, std::span<const double> grid) {
    if (grid.empty()) throw ValidationError("frequency grid is empty");
    const Span sp = window_span(s, w.t_start, w.delta_t);
    Spectrum out;
    out.window = w;
    out.frequencies.assign(grid.begin(), grid.end());
    out.amplitudes.reserve(grid.size());
    double wsum = 0.0;
    for (std::size_t i = sp.first; i <= sp.last; ++i) wsum += trapezoid_weight(i, sp);
    for (double eps : grid) {
        // incremental rotation, re-seeded every 256 samples to bound drift
        const Complex step = std::exp(Complex(0.0, eps * s.dt));
        Complex phase = std::exp(Complex(0.0, eps * s.time(sp.first)));
        Complex acc = 0.0;
        for (std::size_t i = sp.first; i <= sp.last; ++i) {
            if ((i - sp.first) % 256 == 0) phase = std::exp(Complex(0.0, eps * s.time(i)));
            acc += trapezoid_weight(i, sp) * phase * s.values[i];
            phase *= step;
        }
        out.amplitudes.push_back(acc / wsum);
    }
    return out;
}

}  // namespace

double pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w) {
    check_window(w);
    check_same_grid(a, b);
    const Span sp = window_span(a, w.t_start, w.delta_t);
    window_span(b, w.t_start, w.delta_t);
    return weighted_pearson(a, sp, [&b](std::size_t i) { return b.values[i]; });
}

ShiftedPearson shifted_pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w) {
    check_window(w);
    check_same_grid(a, b);
    const auto kmax = static_cast<std::size_t>(std::floor(w.shift_search / b.dt + 1e-9));
    const Span sp = window_span(a, w.t_start, w.delta_t);
    window_span(b, w.t_start, w.delta_t, kmax);

    ShiftedPearson best{-2.0, 0.0};
    std::size_t kbest = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const double v = weighted_pearson(a, sp, [&b, k](std::size_t i) { return b.values[i + k]; });
        if (v > best.value) {
            best = {v, static_cast<double>(k) * b.dt};
            kbest = k;
        }
    }
    if (kmax == 0) return best;

    const double lo = std::max(0.0, static_cast<double>(kbest) - 1.0);
    const double hi = std::min(w.shift_search / b.dt, static_cast<double>(kbest) + 1.0);
    if (hi <= lo) return best;
    auto negative = [&](double shift) {
        return -weighted_pearson(a, sp, [&](std::size_t i) { return interpolate(b, static_cast<double>(i) + shift); });
    };
    const auto [x, fx] = boost::math::tools::brent_find_minima(negative, lo, hi, 40);
    if (-fx > best.value) best = {std::min(-fx, 1.0), x * b.dt};
    return best;
}

ShiftedPearson symmetric_shifted_pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w) {
    const auto ab = shifted_pearson(a, b, w);
    const auto ba = shifted_pearson(b, a, w);
    if (ab.value >= ba.value) return ab;
    return {ba.value, -ba.shift};
}

double collective_index(std::span<const RealSeries> signals, std::span<const std::size_t> subset,
                        const WindowSpec& w, bool shifted) {
    if (subset.size() < 2) throw ValidationError("collective index needs at least two nodes");
    for (auto k : subset)
        if (k >= signals.size()) throw ValidationError("node " + std::to_string(k) + " has no signal");
    for (auto k : subset) {
        try {
            pearson(signals[k], signals[k], w);
        } catch (const NumericalError&) {
            throw NumericalError("degenerate window for node " + std::to_string(k));
        }
    }
    double prod = 1.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j) {
            const auto& a = signals[subset[i]];
            const auto& b = signals[subset[j]];
            prod *= shifted ? symmetric_shifted_pearson(a, b, w).value : pearson(a, b, w);
        }
    return prod;
}

Spectrum windowed_fourier(const ComplexSeries& s, const WindowSpec& w, std::span<const double> grid) {
    check_window(w);
    return fourier_impl(s, w, grid);
}

Spectrum windowed_fourier(const RealSeries& s, const WindowSpec& w, std::span<const double> grid) {
    check_window(w);
    return fourier_impl(s, w, grid);
}

std::vector<double> frequency_grid(double delta_t, double f_max) {
    if (!(delta_t > 0.0) || !(f_max >= 0.0)) throw ValidationError("invalid frequency grid request");
    const double step = 2.0 * std::numbers::pi / delta_t;
    std::vector<double> out;
    for (std::size_t k = 0; static_cast<double>(k) * step <= f_max * (1.0 + 1e-12); ++k)
        out.push_back(static_cast<double>(k) * step);
    return out;
}

std::vector<Peak> dominant_peaks(const Spectrum& s, double rel_threshold) {
    const std::size_t n = s.amplitudes.size();
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(s.amplitudes[k]);
    const double top = n ? *std::max_element(mag.begin(), mag.end()) : 0.0;
    std::vector<Peak> out;
    if (!(top > 0.0)) return out;
    for (std::size_t k = 0; k < n; ++k) {
        const bool left = k == 0 || mag[k] > mag[k - 1];
        const bool right = k + 1 == n || mag[k] >= mag[k + 1];
        if (left && right && mag[k] >= rel_threshold * top) out.push_back({s.frequencies[k], mag[k]});
    }
    std::stable_sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
    return out;
}

std::string_view signal_kind_name(SignalKind k) {
    switch (k) {
    case SignalKind::mean_real: return "re_mean";
    case SignalKind::x_squared: return "x_squared";
    case SignalKind::xy_symmetric: return "xy_symmetric";
    }
    return "?";
}

SyncMatrix sync_matrix(std::span<const RealSeries> signals, const WindowSpec& w, bool shifted, SignalKind kind) {
    const auto n = static_cast<Eigen::Index>(signals.size());
    SyncMatrix out;
    out.window_start = w.t_start;
    out.kind = kind;
    out.shifted = shifted;
    out.values = Eigen::MatrixXd::Identity(n, n);
    out.shifts = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            ShiftedPearson p{0.0, 0.0};
            if (shifted) p = symmetric_shifted_pearson(signals[i], signals[j], w);
            else p.value = pearson(signals[i], signals[j], w);
            out.values(i, j) = out.values(j, i) = p.value;
            out.shifts(i, j) = p.shift;
            out.shifts(j, i) = -p.shift;
        }
    return out;
}

Communities detect_communities(const SyncMatrix& sync, double threshold) {
    const auto n = static_cast<std::size_t>(sync.values.rows());
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(sync.values(i, j)) >= threshold) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> byroot(n);
    for (std::size_t i = 0; i < n; ++i) byroot[find(i)].push_back(i);
    Communities out;
    for (auto& g : byroot) {
        if (g.size() >= 2) out.groups.push_back(g);
        else if (g.size() == 1) out.unsynchronised.push_back(g.front());
    }
    std::sort(out.groups.begin(), out.groups.end());
    std::sort(out.unsynchronised.begin(), out.unsynchronised.end());
    return out;
}

namespace {

double uniform_step(const std::vector<double>& t) {
    if (t.size() < 2) throw ValidationError("trajectory needs at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs(t[k] - t[k - 1] - dt) > 1e-6 * dt) throw ValidationError("trajectory grid is not uniform");
    return dt;
}

}  // namespace

std::vector<RealSeries> mean_signals(const MeanTrajectory& traj) {
    const double dt = uniform_step(traj.times);
    std::vector<RealSeries> out(static_cast<std::size_t>(traj.amplitudes.cols()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].t0 = traj.times.front();
        out[k].dt = dt;
        out[k].values.resize(traj.times.size());
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            out[k].values[i] = traj.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)).real();
    }
    return out;
}

std::vector<RealSeries> quadrature_signals(const MeanTrajectory& means, const CovarianceTrajectory& cov,
                                           SignalKind kind) {
    if (kind == SignalKind::mean_real) return mean_signals(means);
    if (means.times.size() != cov.times.size()) throw ValidationError("mean and covariance grids differ");
    const double dt = uniform_step(cov.times);
    const auto n = means.amplitudes.cols();
    std::vector<RealSeries> out(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        auto& s = out[static_cast<std::size_t>(k)];
        s.t0 = cov.times.front();
        s.dt = dt;
        s.values.resize(cov.times.size());
        for (std::size_t i = 0; i < cov.times.size(); ++i) {
            const auto& c = cov.frames[i];
            const Complex a = means.amplitudes(static_cast<Eigen::Index>(i), k);
            if (kind == SignalKind::x_squared) {
                const double sxx = 0.25 * (c(k, k) + 2.0 * c(k, n + k) + c(n + k, n + k)).real();
                s.values[i] = sxx + a.real() * a.real();
            } else {
                const double sxy = (0.25 * Complex(0.0, 1.0) * (c(n + k, n + k) - c(k, k))).real();
                s.values[i] = 2.0 * sxy + 2.0 * a.real() * a.imag();
            }
        }
    }
    return out;
}

}  // namespace chiralsync
