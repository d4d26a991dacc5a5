#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace chiralsync::detail {

using OdeState = Eigen::VectorXd;
using OdeRhs = std::function<void(const OdeState& x, OdeState& dxdt, double t)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double first_step = 1e-3;
};

// Adaptive Runge-Kutta-Fehlberg 7(8) with dense stops at the requested times.
// times[0] is the initial time of x0.
std::vector<OdeState> integrate_at(const OdeRhs& rhs, const OdeState& x0,
                                   std::span<const double> times, const OdeOptions& opts);

}  // namespace chiralsync::detail
