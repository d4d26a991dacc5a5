#include "chiralsync/moments.hpp"
#include "chiralsync/errors.hpp"
#include "ode.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <string>

namespace chiralsync {

namespace {

using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Mixed-radix number basis: index = sum_k n_k (K+1)^(N-1-k).
struct FockBasis {
    std::size_t modes;
    std::size_t levels;
    std::size_t dim;
    std::vector<std::vector<std::size_t>> occupation;

    FockBasis(std::size_t n, std::size_t cutoff) : modes(n), levels(cutoff + 1), dim(1) {
        for (std::size_t k = 0; k < n; ++k) dim *= levels;
        occupation.assign(dim, std::vector<std::size_t>(n));
        for (std::size_t s = 0; s < dim; ++s) {
            std::size_t r = s;
            for (std::size_t k = n; k-- > 0;) {
                occupation[s][k] = r % levels;
                r /= levels;
            }
        }
    }

    std::size_t stride(std::size_t k) const {
        std::size_t s = 1;
        for (std::size_t j = k + 1; j < modes; ++j) s *= levels;
        return s;
    }

    Sparse lowering(std::size_t k) const {
        std::vector<Eigen::Triplet<Complex>> t;
        const std::size_t st = stride(k);
        for (std::size_t s = 0; s < dim; ++s) {
            const std::size_t nk = occupation[s][k];
            if (nk > 0) t.emplace_back(s - st, s, std::sqrt(static_cast<double>(nk)));
        }
        Sparse a(dim, dim);
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }
};

Complex trace_product(const Sparse& op, const Eigen::Map<const Eigen::MatrixXcd>& rho) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < op.outerSize(); ++i)
        for (Sparse::InnerIterator it(op, i); it; ++it) acc += it.value() * rho(it.col(), i);
    return acc;
}

}  // namespace

FockOracleResult fock_oracle(const NetworkSpec& spec, std::size_t cutoff, const Eigen::VectorXcd& a0,
                             std::span<const double> times, const FockOptions& opts) {
    require_valid(spec);
    const std::size_t n = spec.n_nodes;
    if (n > 3) throw ValidationError("the number-basis oracle handles at most 3 nodes");
    if (cutoff < 1) throw ValidationError("cutoff must be at least 1");
    if (a0.size() != static_cast<Eigen::Index>(n)) throw ValidationError("initial amplitudes do not match the network");
    if (times.empty() || times.front() != 0.0) throw ValidationError("time grid must start at 0");

    const auto profile = degree_profile(spec);
    const FockBasis basis(n, cutoff);
    const auto d = static_cast<Eigen::Index>(basis.dim);

    std::vector<Sparse> a(n), adag(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = basis.lowering(k);
        adag[k] = Sparse(a[k].adjoint());
    }

    // Interaction picture with respect to sum_k eps_k n_k. The effective
    // non-Hermitian Hamiltonian keeps a time-independent diagonal and, per
    // edge s->r, the term -i gamma e^{i (eps_r - eps_s) t} a_r^dag a_s.
    Eigen::VectorXcd diag(d);
    for (Eigen::Index s = 0; s < d; ++s) {
        double rate = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double nk = static_cast<double>(basis.occupation[s][k]);
            rate += profile.gamma_total[k] * nk + spec.pump_rates[k] * (nk + 1.0);
        }
        diag(s) = Complex(0.0, -0.5 * rate);
    }
    struct Link {
        Sparse hop;   // a_r^dag a_s
        Sparse src;   // a_s
        Sparse dst;   // a_r
        double detuning;
    };
    std::vector<Link> links;
    for (auto [s, r] : spec.edges())
        links.push_back({Sparse(adag[r] * a[s]), a[s], a[r], spec.frequencies[r] - spec.frequencies[s]});

    const double g = spec.gamma;
    auto rhs = [&](const detail::OdeState& x, detail::OdeState& dx, double t) {
        Eigen::Map<const Eigen::MatrixXcd> rho(reinterpret_cast<const Complex*>(x.data()), d, d);
        Eigen::Map<Eigen::MatrixXcd> drho(reinterpret_cast<Complex*>(dx.data()), d, d);
        // G = -i H_eff rho, coherent part is G + G^dag
        Eigen::MatrixXcd G = (Complex(0.0, -1.0) * diag).asDiagonal() * rho;
        for (const auto& l : links) G.noalias() += Complex(-g) * std::exp(Complex(0.0, l.detuning * t)) * (l.hop * rho);
        drho = G + G.adjoint();
        for (const auto& l : links) {
            const Complex ph = std::exp(Complex(0.0, -l.detuning * t));
            Eigen::MatrixXcd X = l.src * rho + ph * (l.dst * rho);
            Eigen::MatrixXcd Xd = X.adjoint();
            Eigen::MatrixXcd Z = l.src * Xd + ph * (l.dst * Xd);
            drho += g * Z.adjoint();
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (spec.pump_rates[k] == 0.0) continue;
            Eigen::MatrixXcd Y = adag[k] * rho;
            Eigen::MatrixXcd Yd = Y.adjoint();
            drho += spec.pump_rates[k] * (adag[k] * Yd).adjoint();
        }
    };

    // product of truncated coherent states
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(d);
    for (Eigen::Index s = 0; s < d; ++s)
        for (std::size_t k = 0; k < n; ++k) {
            const auto nk = basis.occupation[s][k];
            // a^n / sqrt(n!), built up by multiplication so that a = 0 gives the vacuum
            for (std::size_t m = 1; m <= nk; ++m) psi(s) *= a0(k) / std::sqrt(static_cast<double>(m));
        }
    psi.normalize();
    detail::OdeState x0(2 * d * d);
    Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<Complex*>(x0.data()), d, d) = psi * psi.adjoint();

    detail::OdeOptions o;
    o.rel_tol = opts.rel_tol;
    o.abs_tol = opts.abs_tol;
    o.first_step = 1e-2;
    std::vector<detail::OdeState> states;
    try {
        states = detail::integrate_at(rhs, x0, times, o);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("master-equation integration failed: ") + e.what());
    }

    std::vector<Sparse> pair_aa, pair_da;  // a_k a_j, a_k^dag a_j
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            pair_aa.push_back(Sparse(a[k] * a[j]));
            pair_da.push_back(Sparse(adag[k] * a[j]));
        }

    FockOracleResult res;
    res.times.assign(times.begin(), times.end());
    res.means.resize(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(n));
    const auto N = static_cast<Eigen::Index>(n);
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double t = times[i];
        Eigen::Map<const Eigen::MatrixXcd> rho(reinterpret_cast<const Complex*>(states[i].data()), d, d);

        double edge = 0.0;
        std::vector<double> top(n, 0.0), below(n, 0.0);
        for (Eigen::Index s = 0; s < d; ++s) {
            const double p = rho(s, s).real();
            bool on_edge = false;
            for (std::size_t k = 0; k < n; ++k) {
                if (basis.occupation[s][k] == cutoff) {
                    on_edge = true;
                    top[k] += p;
                }
                if (basis.occupation[s][k] + 1 == cutoff) below[k] += p;
            }
            if (on_edge) edge += p;
        }
        res.leakage = std::max(res.leakage, edge);
        for (std::size_t k = 0; k < n; ++k)
            if (below[k] > 0.0) worst_ratio = std::max(worst_ratio, top[k] / below[k]);

        Eigen::VectorXcd mean(N);
        for (std::size_t k = 0; k < n; ++k)
            mean(k) = std::exp(Complex(0.0, -spec.frequencies[k] * t)) * trace_product(a[k], rho);
        res.means.row(static_cast<Eigen::Index>(i)) = mean.transpose();

        Eigen::MatrixXcd c(2 * N, 2 * N);
        for (Eigen::Index k = 0; k < N; ++k)
            for (Eigen::Index j = 0; j < N; ++j) {
                const auto idx = static_cast<std::size_t>(k * N + j);
                const Complex aa = std::exp(Complex(0.0, -(spec.frequencies[k] + spec.frequencies[j]) * t)) *
                                   trace_product(pair_aa[idx], rho);
                // <a_j^dag a_k>
                const auto jdx = static_cast<std::size_t>(j * N + k);
                const Complex da = std::exp(Complex(0.0, (spec.frequencies[j] - spec.frequencies[k]) * t)) *
                                   trace_product(pair_da[jdx], rho);
                c(k, j) = aa - mean(k) * mean(j);
                c(k, N + j) = da + (k == j ? 0.5 : 0.0) - mean(k) * std::conj(mean(j));
            }
        for (Eigen::Index k = 0; k < N; ++k)
            for (Eigen::Index j = 0; j < N; ++j) {
                c(N + j, k) = c(k, N + j);
                c(N + k, N + j) = std::conj(c(k, j));
            }
        res.moments.push_back(std::move(c));
    }

    if (res.leakage > opts.leakage_budget) {
        std::size_t suggest = 2 * cutoff;
        if (worst_ratio > 0.0 && worst_ratio < 1.0) {
            const double extra = std::log(opts.leakage_budget / res.leakage) / std::log(worst_ratio);
            suggest = cutoff + static_cast<std::size_t>(std::ceil(extra)) + 1;
        }
        throw NumericalError("truncation leakage " + std::to_string(res.leakage) + " exceeds budget; try cutoff " +
                             std::to_string(suggest));
    }
    return res;
}

}  // namespace chiralsync
