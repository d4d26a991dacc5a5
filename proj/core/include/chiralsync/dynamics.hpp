#pragma once

#include "chiralsync/network.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace chiralsync {

using Complex = std::complex<double>;

struct DriftMatrix {
    Eigen::MatrixXcd m;
    NetworkSpec source;
};

// M[k][k] = (w_k - Gamma_kk)/2 - i eps_k, M[r][s] = -gamma for an edge s -> r.
DriftMatrix assemble_drift(const NetworkSpec& spec);

enum class MeanPath { eigen, integrator };

struct MeanTrajectory {
    std::vector<double> times;
    Eigen::MatrixXcd amplitudes;  // rows: time samples, cols: nodes
    MeanPath path = MeanPath::eigen;
    bool fallback = false;  // integrator used because the eigenbasis was ill-conditioned
};

struct MeanOptions {
    std::optional<MeanPath> force;
    double condition_limit = 1e8;
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
};

MeanTrajectory propagate_means(const DriftMatrix& drift, const Eigen::VectorXcd& a0,
                               std::span<const double> times, const MeanOptions& opts = {});

// Closed-form solutions for single-edge cascades. Degenerate denominators are
// handled through the confluent limit.
std::array<Complex, 2> analytic_dimer(const NetworkSpec& spec, const std::array<Complex, 2>& a0, double t);

enum class TrimerKind { out, in };
std::array<Complex, 3> analytic_trimer(TrimerKind kind, const NetworkSpec& spec,
                                       const std::array<Complex, 3>& a0, double t);

enum class Stability { stable, marginal, unstable };

struct SpectralDecomposition {
    std::vector<Complex> eigenvalues;  // descending real part
    Eigen::MatrixXcd vectors;          // unit-norm right eigenvectors as columns
    bool diagonalizable = true;
    double condition = 1.0;            // 2-norm condition number of the eigenvector matrix
    bool structured = true;            // block-triangular path, zeros are exact
    double max_residual = 0.0;
    Stability stability = Stability::stable;
    double norm = 0.0;                 // Frobenius norm of M

    double lifetime(std::size_t m) const;
    double frequency(std::size_t m) const { return -eigenvalues[m].imag(); }
};

// Eigenpairs of M. The matrix is permuted to block lower-triangular form along
// its strongly connected components; each block is diagonalised on its own and
// eigenvectors are completed by forward substitution, so nodes that a mode
// cannot reach carry exactly zero weight.
SpectralDecomposition spectral_analysis(const DriftMatrix& drift);

struct ClusterOptions {
    // modes within slow_gap * |Re lambda_slowest| of the slowest; unset means
    // largest relative gap
    std::optional<double> slow_gap;
    // support of a mode: |v_i|^2 > support_threshold * max |v|^2
    double support_threshold = 0.0;
    // decay rates within this relative distance count as one tier
    double tie_tolerance = 0.05;
    // within a tier a node follows its largest normalised component when it
    // beats the runner-up by this factor, otherwise it is left unassigned
    double dominance = 1.0;
};

struct Cluster {
    std::vector<std::size_t> nodes;
    std::size_t mode = 0;
    double frequency = 0.0;
    double lifetime = 0.0;
};

struct ClusterPrediction {
    std::vector<Cluster> clusters;
    std::vector<std::size_t> unassigned;
    std::vector<std::size_t> node_mode;  // governing mode per node
    std::vector<std::size_t> slow_modes;
    bool gap_found = false;
    ClusterOptions options;
};

ClusterPrediction predict_clusters(const SpectralDecomposition& decomp, const ClusterOptions& opts = {});

}  // namespace chiralsync
