#include "ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

namespace chiralsync::detail {

namespace ode = boost::numeric::odeint;

std::vector<OdeState> integrate_at(const OdeRhs& rhs, const OdeState& x0,
                                   std::span<const double> times, const OdeOptions& opts) {
    using Stepper = ode::runge_kutta_fehlberg78<OdeState, double, OdeState, double, ode::vector_space_algebra>;
    std::vector<OdeState> out;
    out.reserve(times.size());
    if (times.empty()) return out;
    if (times.size() == 1) {
        out.push_back(x0);
        return out;
    }
    auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
    OdeState x = x0;
    auto sys = [&rhs](const OdeState& s, OdeState& d, double t) {
        d.resize(s.size());
        rhs(s, d, t);
    };
    const double dt0 = std::min(opts.first_step, times[1] - times[0]);
    ode::integrate_times(stepper, sys, x, times.begin(), times.end(), dt0,
                         [&out](const OdeState& s, double) { out.push_back(s); });
    return out;
}

}  // namespace chiralsync::detail
