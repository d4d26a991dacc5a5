#pragma once

#include "chiralsync/dynamics.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace chiralsync {

struct NoiseMatrix {
    Eigen::MatrixXd s;  // (W + Gamma + gamma (A + A^T)) / 2
};

NoiseMatrix assemble_noise(const NetworkSpec& spec);

// Central symmetrised moments in the ordering (a_1..a_N, a_1^dag..a_N^dag).
struct CovarianceState {
    Eigen::MatrixXcd c;
    double time = 0.0;

    Eigen::Index modes() const { return c.rows() / 2; }
};

CovarianceState vacuum_covariance(std::size_t n_modes);

struct CovarianceTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> frames;
    bool growth = false;         // spectrum not stable, moments may diverge
    double max_asymmetry = 0.0;  // max |C - C^T| seen
};

struct CovarianceOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
};

// dC/dt = K C + C K^T + [[0, S], [S, 0]], K = blockdiag(M, M*). Only the upper
// triangle is integrated, so complex symmetry holds by construction.
CovarianceTrajectory propagate_covariance(const DriftMatrix& drift, const NoiseMatrix& noise,
                                          const CovarianceState& c0, std::span<const double> times,
                                          const CovarianceOptions& opts = {});

// Stationary point of the same equation (Bartels-Stewart on the complex Schur form).
CovarianceState steady_covariance(const DriftMatrix& drift, const NoiseMatrix& noise);

// Frobenius norm of K C + C K^T + Q.
double lyapunov_residual(const DriftMatrix& drift, const NoiseMatrix& noise, const Eigen::MatrixXcd& c);

// Ordering (x_1, y_1, ..., x_N, y_N) with x = (a + a^dag)/2, y = -i (a - a^dag)/2,
// vacuum variance 1/4.
struct QuadratureCovariance {
    Eigen::MatrixXd sigma;
};

QuadratureCovariance to_quadrature(const CovarianceState& c);
CovarianceState from_quadrature(const QuadratureCovariance& q, double time = 0.0);

// Sorted ascending, quarter-vacuum convention.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& sigma);

// Smallest symplectic eigenvalue minus 1/4. Throws NumericalError below -1e-9.
double physicality_check(const QuadratureCovariance& q);

struct FockOracleResult {
    std::vector<double> times;
    Eigen::MatrixXcd means;                  // rows: time, cols: node
    std::vector<Eigen::MatrixXcd> moments;   // central symmetrised, same ordering as CovarianceState
    double leakage = 0.0;                    // max population on the truncation edge
};

struct FockOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double leakage_budget = 1e-6;
};

// Density-matrix integration in a truncated number basis, (cutoff + 1)^N states.
// Initial state: product of coherent states with amplitudes a0.
FockOracleResult fock_oracle(const NetworkSpec& spec, std::size_t cutoff, const Eigen::VectorXcd& a0,
                             std::span<const double> times, const FockOptions& opts = {});

}  // namespace chiralsync
