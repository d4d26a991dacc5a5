#pragma once

#include "chiralsync/witnesses.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>

namespace testsupport {

// Random two-mode symplectic matrix in unit-vacuum convention: passive rotations
// and a beam splitter around single-mode squeezers.
Eigen::Matrix4d random_symplectic(std::mt19937_64& rng, double max_squeeze = 1.0);

// S diag(nu1, nu1, nu2, nu2) S^T with nu >= 1, a physical state by construction.
Eigen::Matrix4d random_physical_state(std::mt19937_64& rng, double max_thermal = 3.0, double max_squeeze = 1.0);

// Entropy of a thermal state summed over its number distribution, mean n.
double geometric_entropy(double nbar, std::size_t terms = 20000);

chiralsync::RealSeries sample(const std::function<double(double)>& f, double dt, std::size_t n, double t0 = 0.0);

}  // namespace testsupport
