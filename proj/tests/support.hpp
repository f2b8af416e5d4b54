#pragma once

// Generators and independent reference computations shared by the tests.

#include "fcs/fcs.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace fcs::testing {

inline constexpr double kPi = std::numbers::pi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double angle() { return uniform(0.0, 2.0 * kPi); }

    ParameterVector params(int b, ParametrizationOptions opts = {}) {
        ParameterVector p = ParameterVector::zeros(b, opts);
        for (auto *part : {&p.alpha, &p.phi, &p.phase, &p.upper})
            for (auto &x : *part) x = angle();
        return p;
    }

    /// Random density matrix rho = G G^dagger / Tr, G with Gaussian entries.
    CMatrix density(int d) {
        std::normal_distribution<double> n(0.0, 1.0);
        CMatrix g(d, d);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(n(engine_), n(engine_));
        CMatrix rho = g * g.adjoint();
        return rho / rho.trace().real();
    }

private:
    std::mt19937_64 engine_;
};

inline double max_abs(const CMatrix &m) { return m.cwiseAbs().maxCoeff(); }

/// Products v_{s1} ... v_{sn}, computed by decoding each index separately.
inline CMatrix word(const KrausPair &pair, int n, int index) {
    CMatrix w = CMatrix::Identity(pair.dim(), pair.dim());
    for (int k = 0; k < n; ++k) w = w * pair[(index >> (n - 1 - k)) & 1];
    return w;
}

/// n-site state as the Gram matrix of vec(sqrt(rho_B) v_t): Tr(v_s^dag rho v_t)
/// = <vec X_s, vec X_t> with X = sqrt(rho_B) v.
inline CMatrix gram_reduced_state(const KrausPair &pair, const CMatrix &rho_b, int n) {
    const CMatrix root = linalg::sqrt_psd(rho_b);
    const int d = 1 << n;
    const int b = pair.dim();
    CMatrix g(b * b, d);
    for (int t = 0; t < d; ++t) {
        const CMatrix x = root * word(pair, n, t);
        g.col(t) = Eigen::Map<const Eigen::VectorXcd>(x.data(), b * b);
    }
    return g.adjoint() * g;
}

/// Partial trace by scanning every full index pair and keeping those whose
/// traced bits agree. keep lists 1-based sites; output site order follows keep.
inline CMatrix brute_partial_trace(const CMatrix &rho, int n, const std::vector<int> &keep) {
    const int m = static_cast<int>(keep.size());
    CMatrix out = CMatrix::Zero(1 << m, 1 << m);
    auto bit = [n](int index, int site) { return (index >> (n - site)) & 1; };
    for (int i = 0; i < (1 << n); ++i) {
        for (int j = 0; j < (1 << n); ++j) {
            bool same = true;
            for (int site = 1; site <= n && same; ++site) {
                bool kept = false;
                for (int k : keep) kept = kept || k == site;
                if (!kept && bit(i, site) != bit(j, site)) same = false;
            }
            if (!same) continue;
            int a = 0, c = 0;
            for (int k = 0; k < m; ++k) {
                a = (a << 1) | bit(i, keep[k]);
                c = (c << 1) | bit(j, keep[k]);
            }
            out(a, c) += rho(i, j);
        }
    }
    return out;
}

/// Fixed point of rho -> sum_s v_s^dag rho v_s by Cesaro-averaged iteration
/// from the tracial state.
inline CMatrix power_iteration_fixed_point(const KrausPair &pair, int iterations = 20000) {
    const int b = pair.dim();
    CMatrix rho = CMatrix::Identity(b, b) / static_cast<double>(b);
    CMatrix avg = CMatrix::Zero(b, b);
    for (int i = 0; i < iterations; ++i) {
        rho = pair.v1().adjoint() * rho * pair.v1() + pair.v2().adjoint() * rho * pair.v2();
        rho /= rho.trace();
        if (i >= iterations / 2) avg += rho;
    }
    return avg / avg.trace();
}

/// Concurrence from the eigenvalues of the non-Hermitian product rho rho~,
/// with the spin flip built from an explicit Kronecker product.
inline double eigen_concurrence(const CMatrix &rho) {
    CMatrix sy(2, 2);
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    CMatrix yy(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) yy.block(2 * i, 2 * j, 2, 2) = sy(i, j) * sy;
    const CMatrix flipped = yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<CMatrix> es(rho * flipped);
    std::vector<double> l;
    for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

/// The b = 2 closed form written out term by term (the two expressions
/// evaluate to -B and -A), independent of the library implementation.
inline double literal_b2_numerator(double a, double f) {
    return std::pow(std::cos(a), 2) * (1 + std::sin(a)) * std::pow(std::sin(f), 2);
}
inline double literal_b2_denominator(double a, double f) {
    return std::pow(std::cos(a), 2) * std::pow(std::cos(f), 2) * (-1 + std::sin(a)) -
           2 * (1 + std::sin(a)) * std::pow(std::sin(f), 2);
}

inline CMatrix pure(const Eigen::Vector4cd &psi) { return psi * psi.adjoint(); }

} // namespace fcs::testing
