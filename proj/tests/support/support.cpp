#include "support.hpp"

#include <cmath>
#include <numbers>

namespace testsupport {

namespace {

Eigen::Matrix4d rotation(double a, double b) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    r.block<2, 2>(0, 0) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    r.block<2, 2>(2, 2) << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
    return r;
}

Eigen::Matrix4d squeezer(double r1, double r2) {
    return Eigen::Vector4d(std::exp(r1), std::exp(-r1), std::exp(r2), std::exp(-r2)).asDiagonal();
}

Eigen::Matrix4d beam_splitter(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix4d b;
    b << c, 0, s, 0,
         0, c, 0, s,
        -s, 0, c, 0,
         0, -s, 0, c;
    return b;
}

}  // namespace

Eigen::Matrix4d random_symplectic(std::mt19937_64& rng, double max_squeeze) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> sq(-max_squeeze, max_squeeze);
    return rotation(ang(rng), ang(rng)) * beam_splitter(ang(rng)) * squeezer(sq(rng), sq(rng)) *
           rotation(ang(rng), ang(rng)) * beam_splitter(ang(rng)) * squeezer(sq(rng), sq(rng));
}

Eigen::Matrix4d random_physical_state(std::mt19937_64& rng, double max_thermal, double max_squeeze) {
    std::uniform_real_distribution<double> nu(1.0, max_thermal);
    const double n1 = nu(rng), n2 = nu(rng);
    const Eigen::Matrix4d s = random_symplectic(rng, max_squeeze);
    const Eigen::Matrix4d w = Eigen::Vector4d(n1, n1, n2, n2).asDiagonal();
    Eigen::Matrix4d sigma = s * w * s.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

double geometric_entropy(double nbar, std::size_t terms) {
    if (nbar <= 0.0) return 0.0;
    const double q = nbar / (nbar + 1.0);
    double h = 0.0, p = 1.0 / (nbar + 1.0);
    for (std::size_t n = 0; n < terms && p > 0.0; ++n, p *= q) h -= p * std::log(p);
    return h;
}

chiralsync::RealSeries sample(const std::function<double(double)>& f, double dt, std::size_t n, double t0) {
    chiralsync::RealSeries s{t0, dt, {}};
    s.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(f(s.time(i)));
    return s;
}

}  // namespace testsupport
