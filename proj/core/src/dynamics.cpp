#include "chiralsync/dynamics.hpp"
#include "chiralsync/errors.hpp"
#include "ode.hpp"

#include <cmath>
#include <string>

namespace chiralsync {

DriftMatrix assemble_drift(const NetworkSpec& spec) {
    const auto profile = degree_profile(spec);
    const auto n = static_cast<Eigen::Index>(spec.n_nodes);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        m(k, k) = Complex(0.5 * (spec.pump_rates[k] - profile.gamma_total[k]), -spec.frequencies[k]);
    // target row, source column
    for (auto [s, r] : spec.edges()) m(r, s) = -spec.gamma;
    return {std::move(m), spec};
}

namespace {

void check_grid(std::span<const double> times) {
    if (times.empty()) throw ValidationError("time grid is empty");
    if (times.front() != 0.0) throw ValidationError("time grid must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw ValidationError("time grid must be strictly increasing");
}

Eigen::MatrixXcd means_by_integration(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& a0,
                                      std::span<const double> times, const MeanOptions& opts) {
    const Eigen::Index n = m.rows();
    detail::OdeState x0(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x0(2 * k) = a0(k).real();
        x0(2 * k + 1) = a0(k).imag();
    }
    auto rhs = [&m, n](const detail::OdeState& x, detail::OdeState& dx, double) {
        Eigen::Map<const Eigen::VectorXcd> a(reinterpret_cast<const Complex*>(x.data()), n);
        Eigen::Map<Eigen::VectorXcd> da(reinterpret_cast<Complex*>(dx.data()), n);
        da.noalias() = m * a;
    };
    detail::OdeOptions o;
    o.rel_tol = opts.rel_tol;
    o.abs_tol = opts.abs_tol;
    std::vector<detail::OdeState> states;
    try {
        states = detail::integrate_at(rhs, x0, times, o);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("mean-amplitude integration failed: ") + e.what());
    }
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(times.size()), n);
    for (std::size_t i = 0; i < states.size(); ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            out(static_cast<Eigen::Index>(i), k) = Complex(states[i](2 * k), states[i](2 * k + 1));
    return out;
}

}  // namespace

MeanTrajectory propagate_means(const DriftMatrix& drift, const Eigen::VectorXcd& a0,
                               std::span<const double> times, const MeanOptions& opts) {
    const Eigen::Index n = drift.m.rows();
    if (a0.size() != n)
        throw ValidationError("initial amplitudes have length " + std::to_string(a0.size()) +
                              ", network has " + std::to_string(n) + " nodes");
    check_grid(times);

    MeanTrajectory traj;
    traj.times.assign(times.begin(), times.end());

    bool use_eigen = !opts.force || *opts.force == MeanPath::eigen;
    SpectralDecomposition dec;
    if (use_eigen) {
        dec = spectral_analysis(drift);
        if (!dec.diagonalizable || dec.condition > opts.condition_limit) {
            if (opts.force) throw NumericalError("eigenbasis is ill-conditioned, eigen path unavailable");
            use_eigen = false;
            traj.fallback = true;
        }
    }

    if (!use_eigen) {
        traj.path = MeanPath::integrator;
        traj.amplitudes = means_by_integration(drift.m, a0, times, opts);
        return traj;
    }

    traj.path = MeanPath::eigen;
    const Eigen::VectorXcd coeff = dec.vectors.fullPivLu().solve(a0);
    Eigen::VectorXcd lambda(n);
    for (Eigen::Index k = 0; k < n; ++k) lambda(k) = dec.eigenvalues[k];
    traj.amplitudes.resize(static_cast<Eigen::Index>(times.size()), n);
    Eigen::VectorXcd c(n);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        for (Eigen::Index k = 0; k < n; ++k) c(k) = coeff(k) * std::exp(lambda(k) * t);
        traj.amplitudes.row(static_cast<Eigen::Index>(i)) = (dec.vectors * c).transpose();
    }
    return traj;
}

}  // namespace chiralsync
