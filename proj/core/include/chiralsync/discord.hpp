#pragma once

#include "chiralsync/moments.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chiralsync {

// Two modes (i, j) in the unit-vacuum convention (vacuum = identity).
struct TwoModeGaussian {
    Eigen::Matrix4d sigma;
    double A = 1.0;  // det of the first mode block
    double B = 1.0;  // det of the second mode block
    double C = 0.0;  // det of the cross block
    double D = 1.0;  // det sigma

    static TwoModeGaussian from_matrix(const Eigen::Matrix4d& sigma);
    TwoModeGaussian swapped() const;
};

// Rows/cols (x_i, y_i, x_j, y_j) of the quarter-vacuum covariance, rescaled by 4.
TwoModeGaussian reduce_two_mode(const QuadratureCovariance& q, std::size_t i, std::size_t j);

// f(nu) = ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2)
double entropy_function(double nu);

// Unit-vacuum symplectic eigenvalues; values in [1 - 1e-9, 1) are projected to 1.
Eigen::VectorXd unit_symplectic_eigenvalues(const Eigen::MatrixXd& sigma);

// Von Neumann entropy in nats of a unit-vacuum covariance.
double gaussian_entropy(const Eigen::MatrixXd& sigma);

enum class Measured { first, second };

// Gaussian discord with the measurement on the tagged mode, closed form in the
// symplectic invariants A, B, C, D.
double gaussian_discord(const TwoModeGaussian& tm, Measured measured);

// Minimises the conditional entropy of the unmeasured mode over general-dyne
// measurements: seed covariance R(phi) diag(lambda, 1/lambda) R(phi)^T with
// lambda = (1+u)/(1-u), u in [0, 1], u = 1 being homodyne. Grid, then
// alternating Brent refinement.
double discord_brute_force(const TwoModeGaussian& tm, Measured measured, std::size_t grid_size = 48);

struct DiscordSeries {
    std::vector<double> times;
    std::vector<double> forward;   // measuring i
    std::vector<double> backward;  // measuring j
};

DiscordSeries discord_trajectory(const CovarianceTrajectory& traj, std::size_t i, std::size_t j);

}  // namespace chiralsync
