#pragma once

#include "chiralsync/dynamics.hpp"
#include "chiralsync/moments.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace chiralsync {

// Uniformly sampled signal, sample i at t0 + i*dt.
template <class T>
struct Series {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<T> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
};
using RealSeries = Series<double>;
using ComplexSeries = Series<Complex>;

struct WindowSpec {
    double t_start = 0.0;
    double delta_t = 1.0;
    double stride = 1.0;
    double shift_search = 0.0;
};

void check_window(const WindowSpec& w);

// Window length 20 slowest periods, stride a quarter window, shift search one
// slowest period.
WindowSpec default_window(const NetworkSpec& spec);
// Twenty samples per period of the fastest node.
double default_sample_step(const NetworkSpec& spec);
// Window starts t_first, t_first + stride, ... with the window inside [0, horizon - margin].
std::vector<double> window_starts(const WindowSpec& w, double horizon, double margin = 0.0, double t_first = 0.0);

// Trapezoidal weighted correlation coefficient over [t_start, t_start + delta_t].
double pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w);

struct ShiftedPearson {
    double value = 0.0;
    double shift = 0.0;  // b is read at t + shift
};

// Max over shift in [0, w.shift_search]: integer-sample scan, then Brent
// refinement around the best sample with cubic interpolation of b.
ShiftedPearson shifted_pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w);

// Max over both orderings, shift signed (negative: a lags).
ShiftedPearson symmetric_shifted_pearson(const RealSeries& a, const RealSeries& b, const WindowSpec& w);

double collective_index(std::span<const RealSeries> signals, std::span<const std::size_t> subset,
                        const WindowSpec& w, bool shifted = true);

struct Spectrum {
    std::vector<double> frequencies;
    std::vector<Complex> amplitudes;
    WindowSpec window;
};

// f(eps) = (1/dt) * integral of e^{+i eps tau} s(tau) over the window, so a tone
// e^{-i eps0 tau} peaks at +eps0.
Spectrum windowed_fourier(const ComplexSeries& s, const WindowSpec& w, std::span<const double> freq_grid);
Spectrum windowed_fourier(const RealSeries& s, const WindowSpec& w, std::span<const double> freq_grid);

// Grid 0, 2pi/delta_t, ... up to f_max.
std::vector<double> frequency_grid(double delta_t, double f_max);

struct Peak {
    double frequency = 0.0;
    double magnitude = 0.0;
};

std::vector<Peak> dominant_peaks(const Spectrum& s, double rel_threshold);

enum class SignalKind { mean_real, x_squared, xy_symmetric };
std::string_view signal_kind_name(SignalKind k);

struct SyncMatrix {
    double window_start = 0.0;
    Eigen::MatrixXd values;
    Eigen::MatrixXd shifts;
    SignalKind kind = SignalKind::mean_real;
    bool shifted = false;
};

SyncMatrix sync_matrix(std::span<const RealSeries> signals, const WindowSpec& w, bool shifted,
                       SignalKind kind = SignalKind::mean_real);

struct Communities {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> unsynchronised;
};

Communities detect_communities(const SyncMatrix& sync, double threshold = 0.9);

// Re<a_k>(t) per node. The trajectory grid must be uniform.
std::vector<RealSeries> mean_signals(const MeanTrajectory& traj);
// <x_k^2> or <x_k y_k + y_k x_k> per node, full moments (fluctuations plus mean).
std::vector<RealSeries> quadrature_signals(const MeanTrajectory& means, const CovarianceTrajectory& cov,
                                           SignalKind kind);

}  // namespace chiralsync
