#include "chiralsync/moments.hpp"
#include "chiralsync/errors.hpp"
#include "ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace chiralsync {

NoiseMatrix assemble_noise(const NetworkSpec& spec) {
    const auto profile = degree_profile(spec);
    const auto n = static_cast<Eigen::Index>(spec.n_nodes);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) s(k, k) = 0.5 * (spec.pump_rates[k] + profile.gamma_total[k]);
    for (auto [a, b] : spec.edges()) {
        s(a, b) += 0.5 * spec.gamma;
        s(b, a) += 0.5 * spec.gamma;
    }
    return {std::move(s)};
}

CovarianceState vacuum_covariance(std::size_t n_modes) {
    const auto n = static_cast<Eigen::Index>(n_modes);
    CovarianceState st;
    st.c = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        st.c(k, n + k) = 0.5;
        st.c(n + k, k) = 0.5;
    }
    return st;
}

namespace {

Eigen::MatrixXcd block_drift(const Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    k.topLeftCorner(n, n) = m;
    k.bottomRightCorner(n, n) = m.conjugate();
    return k;
}

Eigen::MatrixXcd block_noise(const Eigen::MatrixXd& s) {
    const Eigen::Index n = s.rows();
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    q.topRightCorner(n, n) = s.cast<Complex>();
    q.bottomLeftCorner(n, n) = s.cast<Complex>();
    return q;
}

void check_shapes(const DriftMatrix& drift, const NoiseMatrix& noise) {
    if (drift.m.rows() != noise.s.rows())
        throw ValidationError("drift and noise matrices describe different networks");
}

}  // namespace

CovarianceTrajectory propagate_covariance(const DriftMatrix& drift, const NoiseMatrix& noise,
                                          const CovarianceState& c0, std::span<const double> times,
                                          const CovarianceOptions& opts) {
    check_shapes(drift, noise);
    const Eigen::Index dim = 2 * drift.m.rows();
    if (c0.c.rows() != dim || c0.c.cols() != dim)
        throw ValidationError("initial covariance has the wrong dimension");
    if ((c0.c - c0.c.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError("initial covariance is not complex symmetric");
    if (times.empty()) throw ValidationError("time grid is empty");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw ValidationError("time grid must be strictly increasing");

    const Eigen::MatrixXcd K = block_drift(drift.m);
    const Eigen::MatrixXcd Q = block_noise(noise.s);
    const Eigen::Index packed = dim * (dim + 1) / 2;

    auto pack = [dim](const Eigen::MatrixXcd& c, detail::OdeState& x) {
        Eigen::Index p = 0;
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j, ++p) {
                x(2 * p) = c(i, j).real();
                x(2 * p + 1) = c(i, j).imag();
            }
    };
    auto unpack = [dim](const detail::OdeState& x, Eigen::MatrixXcd& c) {
        Eigen::Index p = 0;
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j, ++p) {
                c(i, j) = Complex(x(2 * p), x(2 * p + 1));
                c(j, i) = c(i, j);
            }
    };

    detail::OdeState x0(2 * packed);
    pack(c0.c, x0);
    Eigen::MatrixXcd c(dim, dim), kc(dim, dim), dc(dim, dim);
    auto rhs = [&](const detail::OdeState& x, detail::OdeState& dx, double) {
        unpack(x, c);
        kc.noalias() = K * c;
        // C symmetric, so C K^T = (K C)^T
        dc = kc + kc.transpose() + Q;
        pack(dc, dx);
    };

    std::vector<double> grid(times.begin(), times.end());
    if (grid.front() != c0.time) grid.insert(grid.begin(), c0.time);
    if (grid.front() > times.front()) throw ValidationError("time grid starts before the initial covariance");

    detail::OdeOptions o;
    o.rel_tol = opts.rel_tol;
    o.abs_tol = opts.abs_tol;
    std::vector<detail::OdeState> states;
    try {
        states = detail::integrate_at(rhs, x0, grid, o);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("covariance integration failed: ") + e.what());
    }

    CovarianceTrajectory traj;
    traj.times.assign(times.begin(), times.end());
    const std::size_t skip = grid.size() - times.size();
    for (std::size_t i = skip; i < states.size(); ++i) {
        Eigen::MatrixXcd frame(dim, dim);
        unpack(states[i], frame);
        traj.max_asymmetry = std::max(traj.max_asymmetry, (frame - frame.transpose()).cwiseAbs().maxCoeff());
        traj.frames.push_back(std::move(frame));
    }
    traj.growth = spectral_analysis(drift).stability != Stability::stable;
    return traj;
}

double lyapunov_residual(const DriftMatrix& drift, const NoiseMatrix& noise, const Eigen::MatrixXcd& c) {
    const Eigen::MatrixXcd K = block_drift(drift.m);
    return (K * c + c * K.transpose() + block_noise(noise.s)).norm();
}

CovarianceState steady_covariance(const DriftMatrix& drift, const NoiseMatrix& noise) {
    check_shapes(drift, noise);
    if (spectral_analysis(drift).stability == Stability::unstable)
        throw NumericalError("no stationary covariance: spectrum is unstable");

    // aa block vanishes; the a a^dag block X solves M X + X M^dag + S = 0
    const Eigen::Index n = drift.m.rows();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(drift.m);
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd& U = schur.matrixU();
    const Eigen::MatrixXcd F = -(U.adjoint() * noise.s.cast<Complex>() * U);
    const double scale = std::max(drift.m.norm(), 1.0);
    const double rhs_scale = std::max(noise.s.norm(), 1e-300);

    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = n - 1; i >= 0; --i)
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            Complex acc = F(i, j);
            for (Eigen::Index k = i + 1; k < n; ++k) acc -= T(i, k) * Y(k, j);
            for (Eigen::Index k = j + 1; k < n; ++k) acc -= Y(i, k) * std::conj(T(j, k));
            const Complex denom = T(i, i) + std::conj(T(j, j));
            if (std::abs(denom) <= 1e-12 * scale) {
                // undamped, unpumped direction: only vacuum is consistent
                if (std::abs(acc) > 1e-12 * rhs_scale)
                    throw NumericalError("no stationary covariance: marginal mode is driven by noise");
                Y(i, j) = i == j ? Complex(0.5) : Complex(0.0);
            } else {
                Y(i, j) = acc / denom;
            }
        }
    Eigen::MatrixXcd X = U * Y * U.adjoint();
    X = 0.5 * (X + X.adjoint()).eval();

    CovarianceState st;
    st.c = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    st.c.topRightCorner(n, n) = X;
    st.c.bottomLeftCorner(n, n) = X.transpose();
    st.time = std::numeric_limits<double>::infinity();
    return st;
}

namespace {

Eigen::MatrixXcd quadrature_map(Eigen::Index n) {
    const Complex half(0.5), ihalf(0.0, 0.5);
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        L(2 * k, k) = half;
        L(2 * k, n + k) = half;
        L(2 * k + 1, k) = -ihalf;
        L(2 * k + 1, n + k) = ihalf;
    }
    return L;
}

Eigen::MatrixXcd inverse_quadrature_map(Eigen::Index n) {
    const Complex i1(0.0, 1.0);
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        L(k, 2 * k) = 1.0;
        L(k, 2 * k + 1) = i1;
        L(n + k, 2 * k) = 1.0;
        L(n + k, 2 * k + 1) = -i1;
    }
    return L;
}

}  // namespace

QuadratureCovariance to_quadrature(const CovarianceState& st) {
    const Eigen::Index n = st.modes();
    const Eigen::MatrixXcd L = quadrature_map(n);
    const Eigen::MatrixXcd s = L * st.c * L.transpose();
    const double residue = s.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9 * std::max(1.0, s.real().cwiseAbs().maxCoeff()))
        throw NumericalError("quadrature covariance has imaginary residue " + std::to_string(residue));
    Eigen::MatrixXd sigma = s.real();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return {std::move(sigma)};
}

CovarianceState from_quadrature(const QuadratureCovariance& q, double time) {
    const Eigen::Index n = q.sigma.rows() / 2;
    const Eigen::MatrixXcd L = inverse_quadrature_map(n);
    CovarianceState st;
    st.c = L * q.sigma.cast<Complex>() * L.transpose();
    st.time = time;
    return st;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
    const Eigen::Index dim = sigma.rows();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k + 1 < dim; k += 2) {
        omega(k, k + 1) = 1.0;
        omega(k + 1, k) = -1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Complex(0.0, 1.0) * (omega * sigma).cast<Complex>(), false);
    if (es.info() != Eigen::Success) throw NumericalError("symplectic spectrum did not converge");
    std::vector<double> mags(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) mags[k] = std::abs(es.eigenvalues()(k));
    std::sort(mags.begin(), mags.end());
    Eigen::VectorXd nu(dim / 2);
    for (Eigen::Index k = 0; k < dim / 2; ++k) nu(k) = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
    return nu;
}

double physicality_check(const QuadratureCovariance& q) {
    if ((q.sigma - q.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError("quadrature covariance is not symmetric");
    const double margin = symplectic_eigenvalues(q.sigma).minCoeff() - 0.25;
    if (margin < -1e-9) throw NumericalError("unphysical state: symplectic margin " + std::to_string(margin));
    return margin;
}

}  // namespace chiralsync
