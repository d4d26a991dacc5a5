#include "chiralsync/discord.hpp"
#include "chiralsync/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace chiralsync {

TwoModeGaussian TwoModeGaussian::from_matrix(const Eigen::Matrix4d& sigma) {
    TwoModeGaussian tm;
    tm.sigma = 0.5 * (sigma + sigma.transpose());
    tm.A = tm.sigma.topLeftCorner<2, 2>().determinant();
    tm.B = tm.sigma.bottomRightCorner<2, 2>().determinant();
    tm.C = tm.sigma.topRightCorner<2, 2>().determinant();
    tm.D = tm.sigma.determinant();
    return tm;
}

TwoModeGaussian TwoModeGaussian::swapped() const {
    Eigen::Matrix4d s;
    s << sigma.bottomRightCorner<2, 2>(), sigma.bottomLeftCorner<2, 2>(),
         sigma.topRightCorner<2, 2>(), sigma.topLeftCorner<2, 2>();
    return from_matrix(s);
}

namespace {

void check_unit_physical(const Eigen::MatrixXd& sigma, const char* what) {
    const double nu = symplectic_eigenvalues(sigma).minCoeff();
    if (nu < 1.0 - 1e-9)
        throw NumericalError(std::string("unphysical ") + what + ": smallest symplectic eigenvalue " + std::to_string(nu));
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Conditional covariance of the first mode after a Gaussian measurement on the
// second, u in [0, 1] sets the seed squeezing, u = 1 is homodyne.
double conditional_det(const TwoModeGaussian& tm, double u, double phi) {
    const Eigen::Matrix2d alpha = tm.sigma.topLeftCorner<2, 2>();
    const Eigen::Matrix2d beta = tm.sigma.bottomRightCorner<2, 2>();
    const Eigen::Matrix2d g = tm.sigma.topRightCorner<2, 2>();
    const double c = std::cos(phi), s = std::sin(phi);
    if (u >= 1.0) {
        const Eigen::Vector2d dir(-s, c);
        const Eigen::Vector2d gd = g * dir;
        return (alpha - gd * gd.transpose() / dir.dot(beta * dir)).determinant();
    }
    const double lambda = (1.0 + u) / (1.0 - u);
    Eigen::Matrix2d rot;
    rot << c, -s, s, c;
    const Eigen::Matrix2d seed = rot * Eigen::Vector2d(lambda, 1.0 / lambda).asDiagonal() * rot.transpose();
    return (alpha - g * (beta + seed).inverse() * g.transpose()).determinant();
}

}  // namespace

TwoModeGaussian reduce_two_mode(const QuadratureCovariance& q, std::size_t i, std::size_t j) {
    const auto n = static_cast<std::size_t>(q.sigma.rows() / 2);
    if (i == j) throw ValidationError("discord needs two distinct nodes");
    if (i >= n || j >= n) throw ValidationError("node index out of range");
    const Eigen::Index idx[4] = {static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * i + 1),
                                 static_cast<Eigen::Index>(2 * j), static_cast<Eigen::Index>(2 * j + 1)};
    Eigen::Matrix4d s;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) s(r, c) = 4.0 * q.sigma(idx[r], idx[c]);
    check_unit_physical(s, "two-mode state");
    return TwoModeGaussian::from_matrix(s);
}

double entropy_function(double nu) {
    if (nu < 1.0 - 1e-9) throw NumericalError("symplectic eigenvalue " + std::to_string(nu) + " below vacuum");
    if (nu <= 1.0) return 0.0;
    return xlogx((nu + 1.0) / 2.0) - xlogx((nu - 1.0) / 2.0);
}

Eigen::VectorXd unit_symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
    Eigen::VectorXd nu = symplectic_eigenvalues(sigma);
    for (Eigen::Index k = 0; k < nu.size(); ++k) {
        if (nu(k) < 1.0 - 1e-9) throw NumericalError("unphysical covariance: symplectic eigenvalue " + std::to_string(nu(k)));
        nu(k) = std::max(nu(k), 1.0);
    }
    return nu;
}

double gaussian_entropy(const Eigen::MatrixXd& sigma) {
    double s = 0.0;
    for (double nu : unit_symplectic_eigenvalues(sigma)) s += entropy_function(nu);
    return s;
}

double gaussian_discord(const TwoModeGaussian& input, Measured measured) {
    check_unit_physical(input.sigma, "two-mode state");
    // arrange so the second mode is the measured one
    const TwoModeGaussian tm = measured == Measured::second ? input : input.swapped();
    const double scale = std::max(1.0, tm.sigma.cwiseAbs().maxCoeff());
    if (tm.sigma.topRightCorner<2, 2>().cwiseAbs().maxCoeff() <= 1e-14 * scale) return 0.0;
    const double A = tm.A, B = tm.B, C = tm.C, D = tm.D;
    if (B - 1.0 <= 1e-14) return 0.0;

    const double delta = A + B + 2.0 * C;
    const double root = std::sqrt(std::max(delta * delta - 4.0 * D, 0.0));
    const double nu_minus = std::sqrt(std::max((delta - root) / 2.0, 0.0));
    const double nu_plus = std::sqrt((delta + root) / 2.0);

    double emin;
    if ((D - A * B) * (D - A * B) <= (1.0 + B) * C * C * (A + D)) {
        const double inner = std::max(C * C + (B - 1.0) * (D - A), 0.0);
        emin = (2.0 * C * C + (B - 1.0) * (D - A) + 2.0 * std::abs(C) * std::sqrt(inner)) / ((B - 1.0) * (B - 1.0));
    } else {
        const double inner = std::max(C * C * C * C + (D - A * B) * (D - A * B) - 2.0 * C * C * (A * B + D), 0.0);
        emin = (A * B - C * C + D - std::sqrt(inner)) / (2.0 * B);
    }
    const double d = entropy_function(std::sqrt(B)) - entropy_function(std::max(nu_minus, 1.0)) -
                     entropy_function(nu_plus) + entropy_function(std::max(std::sqrt(std::max(emin, 0.0)), 1.0));
    return std::max(d, 0.0);
}

double discord_brute_force(const TwoModeGaussian& input, Measured measured, std::size_t grid_size) {
    check_unit_physical(input.sigma, "two-mode state");
    const TwoModeGaussian tm = measured == Measured::second ? input : input.swapped();
    const std::size_t g = std::max<std::size_t>(grid_size, 4);

    double best = std::numeric_limits<double>::infinity();
    double bu = 0.0, bphi = 0.0;
    for (std::size_t a = 0; a < g; ++a) {
        const double u = static_cast<double>(a) / static_cast<double>(g - 1);
        for (std::size_t b = 0; b < g; ++b) {
            const double phi = std::numbers::pi * static_cast<double>(b) / static_cast<double>(g);
            const double v = conditional_det(tm, u, phi);
            if (v < best) {
                best = v;
                bu = u;
                bphi = phi;
            }
        }
    }
    const double du = 1.0 / static_cast<double>(g - 1);
    const double dphi = std::numbers::pi / static_cast<double>(g);
    for (int round = 0; round < 6; ++round) {
        const auto [p, vp] = boost::math::tools::brent_find_minima(
            [&](double phi) { return conditional_det(tm, bu, phi); }, bphi - dphi, bphi + dphi, 52);
        if (vp < best) {
            best = vp;
            bphi = p;
        }
        const auto [u, vu] = boost::math::tools::brent_find_minima(
            [&](double x) { return conditional_det(tm, x, bphi); }, std::max(0.0, bu - du), std::min(1.0, bu + du), 52);
        if (vu < best) {
            best = vu;
            bu = u;
        }
        // endpoint u = 1 is the homodyne limit, Brent never samples it
        const double vh = conditional_det(tm, 1.0, bphi);
        if (vh < best) {
            best = vh;
            bu = 1.0;
        }
    }
    const Eigen::Matrix2d beta = tm.sigma.bottomRightCorner<2, 2>();
    const double cond = entropy_function(std::max(std::sqrt(std::max(best, 0.0)), 1.0));
    const double d = gaussian_entropy(beta) - gaussian_entropy(tm.sigma) + cond;
    return std::max(d, 0.0);
}

DiscordSeries discord_trajectory(const CovarianceTrajectory& traj, std::size_t i, std::size_t j) {
    DiscordSeries out;
    out.times = traj.times;
    out.forward.reserve(traj.times.size());
    out.backward.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        try {
            CovarianceState st{traj.frames[k], traj.times[k]};
            const auto tm = reduce_two_mode(to_quadrature(st), i, j);
            out.forward.push_back(gaussian_discord(tm, Measured::first));
            out.backward.push_back(gaussian_discord(tm, Measured::second));
        } catch (const NumericalError& e) {
            throw NumericalError("frame at t=" + std::to_string(traj.times[k]) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace chiralsync
