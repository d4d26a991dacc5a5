#include "chiralsync/dynamics.hpp"
#include "chiralsync/errors.hpp"

#include <cmath>

namespace chiralsync {

namespace {

// (e^z - 1)/z, series near the origin so that the confluent limit is exact.
Complex phi1(Complex z) {
    if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return (std::exp(z) - 1.0) / z;
}

// (e^{a t} - e^{b t}) / (a - b), t e^{b t} when a == b.
Complex exp_difference(Complex a, Complex b, double t) {
    return t * std::exp(b * t) * phi1((a - b) * t);
}

// local eigenvalue -(Gamma - w + 2 i eps)/2 for a node with the given edge count
Complex local_rate(const NetworkSpec& s, std::size_t k, double edges) {
    return Complex(-(edges * s.gamma - s.pump_rates[k]) / 2.0, -s.frequencies[k]);
}

void expect_edges(const NetworkSpec& s, std::size_t n, const std::vector<Edge>& edges, const char* what) {
    require_valid(s);
    if (s.n_nodes != n || s.edges() != edges) throw ValidationError(std::string("network is not a ") + what);
}

}  // namespace

std::array<Complex, 2> analytic_dimer(const NetworkSpec& spec, const std::array<Complex, 2>& a0, double t) {
    expect_edges(spec, 2, {{0, 1}}, "dimer 0->1");
    const Complex l1 = local_rate(spec, 0, 1.0);
    const Complex l2 = local_rate(spec, 1, 1.0);
    // 2 gamma (e^{l2 t} - e^{l1 t}) / ((w1 - w2) - 2 i (eps1 - eps2)) written through l1 - l2
    const Complex a1 = std::exp(l1 * t) * a0[0];
    const Complex a2 = std::exp(l2 * t) * a0[1] - spec.gamma * exp_difference(l1, l2, t) * a0[0];
    return {a1, a2};
}

std::array<Complex, 3> analytic_trimer(TrimerKind kind, const NetworkSpec& spec,
                                       const std::array<Complex, 3>& a0, double t) {
    const double g = spec.gamma;
    if (kind == TrimerKind::out) {
        expect_edges(spec, 3, {{1, 0}, {1, 2}}, "trimer with node 1 driving nodes 0 and 2");
        const Complex lc = local_rate(spec, 1, 2.0);
        const Complex l1 = local_rate(spec, 0, 1.0);
        const Complex l3 = local_rate(spec, 2, 1.0);
        return {std::exp(l1 * t) * a0[0] - g * exp_difference(lc, l1, t) * a0[1],
                std::exp(lc * t) * a0[1],
                std::exp(l3 * t) * a0[2] - g * exp_difference(lc, l3, t) * a0[1]};
    }
    expect_edges(spec, 3, {{0, 1}, {2, 1}}, "trimer with nodes 0 and 2 driving node 1");
    const Complex lc = local_rate(spec, 1, 2.0);
    const Complex l1 = local_rate(spec, 0, 1.0);
    const Complex l3 = local_rate(spec, 2, 1.0);
    return {std::exp(l1 * t) * a0[0],
            std::exp(lc * t) * a0[1] - g * exp_difference(l1, lc, t) * a0[0] - g * exp_difference(l3, lc, t) * a0[2],
            std::exp(l3 * t) * a0[2]};
}

}  // namespace chiralsync
