#pragma once

#include "fcs/core.hpp"
#include "fcs/error.hpp"
#include "fcs/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fcs {

/// Opt-in extensions of the default real, nilpotent parametrization.
struct ParametrizationOptions {
    /// R becomes a general unitary: Givens rotations with complex phases
    /// followed by a diagonal phase matrix.
    bool complex_rotation = false;
    /// v1 gains entries sin(beta_k) at (2k-1, 2k), which breaks nilpotency.
    bool non_nilpotent = false;

    friend bool operator==(const ParametrizationOptions &, const ParametrizationOptions &) = default;
};

constexpr int alpha_count(int b) noexcept { return b / 2; }
constexpr int phi_count(int b) noexcept { return b * (b - 1) / 2; }
constexpr int phase_count(int b) noexcept { return b * (b - 1) / 2 + b; }
constexpr int upper_count(int b) noexcept { return b / 2; }

/// Unconstrained angles (radians) generating a Kraus pair. No wrapping is
/// applied anywhere; every angle is 2pi-periodic.
struct ParameterVector {
    int b = 2;
    std::vector<double> alpha; ///< floor(b/2) weights of the nilpotent v1
    std::vector<double> phi;   ///< b(b-1)/2 plane-rotation angles of R
    std::vector<double> phase; ///< complex-rotation extension, empty by default
    std::vector<double> upper; ///< non-nilpotent extension, empty by default

    [[nodiscard]] ParametrizationOptions options() const noexcept {
        return {!phase.empty(), !upper.empty()};
    }

    [[nodiscard]] std::size_t size() const noexcept {
        return alpha.size() + phi.size() + phase.size() + upper.size();
    }

    void validate() const {
        if (b < 2) throw Error(ErrorKind::InvalidArgument, "dimension b must be at least 2");
        auto require = [](std::size_t got, int want, const char *what) {
            if (got != static_cast<std::size_t>(want))
                throw Error(ErrorKind::InvalidArgument, std::string(what) + " must have " + std::to_string(want) +
                                                            " entries, got " + std::to_string(got));
        };
        require(alpha.size(), alpha_count(b), "alpha");
        require(phi.size(), phi_count(b), "phi");
        if (!phase.empty()) require(phase.size(), phase_count(b), "phase");
        if (!upper.empty()) require(upper.size(), upper_count(b), "upper");
    }

    /// Flat layout alpha, phi, phase, upper.
    [[nodiscard]] std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(size());
        for (const auto *part : {&alpha, &phi, &phase, &upper}) out.insert(out.end(), part->begin(), part->end());
        return out;
    }

    static ParameterVector zeros(int b, ParametrizationOptions opts = {}) {
        ParameterVector p;
        p.b = b;
        p.alpha.assign(alpha_count(b), 0.0);
        p.phi.assign(phi_count(b), 0.0);
        if (opts.complex_rotation) p.phase.assign(phase_count(b), 0.0);
        if (opts.non_nilpotent) p.upper.assign(upper_count(b), 0.0);
        return p;
    }

    static std::size_t flat_size(int b, ParametrizationOptions opts) {
        return static_cast<std::size_t>(alpha_count(b) + phi_count(b) + (opts.complex_rotation ? phase_count(b) : 0) +
                                        (opts.non_nilpotent ? upper_count(b) : 0));
    }

    static ParameterVector unflatten(int b, ParametrizationOptions opts, std::span<const double> flat) {
        if (flat.size() != flat_size(b, opts))
            throw Error(ErrorKind::InvalidArgument, "flat parameter vector has the wrong length");
        ParameterVector p = zeros(b, opts);
        auto it = flat.begin();
        for (auto *part : {&p.alpha, &p.phi, &p.phase, &p.upper})
            for (auto &x : *part) x = *it++;
        return p;
    }

    friend bool operator==(const ParameterVector &, const ParameterVector &) = default;
};

/// Nilpotent v1: cos(alpha_k) at 1-based (2k, 2k-1), zero elsewhere; with the
/// non-nilpotent extension also sin(beta_k) at (2k-1, 2k).
inline CMatrix build_v1(const ParameterVector &p) {
    p.validate();
    CMatrix v1 = CMatrix::Zero(p.b, p.b);
    for (int k = 0; k < alpha_count(p.b); ++k) {
        v1(2 * k + 1, 2 * k) = std::cos(p.alpha[k]);
        if (!p.upper.empty()) v1(2 * k, 2 * k + 1) = std::sin(p.upper[k]);
    }
    return v1;
}

/// R = G(1,2) G(1,3) ... G(1,b) G(2,3) ... G(b-1,b), each G(i,j) rotating the
/// (i,j) plane with +sin above the diagonal.
inline RMatrix build_rotation(const ParameterVector &p) {
    p.validate();
    const int b = p.b;
    RMatrix r = RMatrix::Identity(b, b);
    int idx = 0;
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j, ++idx) {
            const double c = std::cos(p.phi[idx]);
            const double s = std::sin(p.phi[idx]);
            RVector ci = r.col(i);
            r.col(i) = c * ci - s * r.col(j);
            r.col(j) = s * ci + c * r.col(j);
        }
    }
    return r;
}

/// The rotation factor of v2. Without the complex extension this is
/// build_rotation; with it, each plane rotation carries phase e^{i chi} on
/// its +sin entry and the product is followed by diag(e^{i theta}).
inline CMatrix build_unitary(const ParameterVector &p) {
    if (p.phase.empty()) return build_rotation(p).cast<Complex>();
    p.validate();
    const int b = p.b;
    CMatrix u = CMatrix::Identity(b, b);
    int idx = 0;
    for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j, ++idx) {
            const double c = std::cos(p.phi[idx]);
            const Complex s = std::sin(p.phi[idx]) * std::polar(1.0, p.phase[idx]);
            Eigen::VectorXcd ci = u.col(i);
            u.col(i) = c * ci - std::conj(s) * u.col(j);
            u.col(j) = s * ci + c * u.col(j);
        }
    }
    for (int k = 0; k < b; ++k) u.col(k) *= std::polar(1.0, p.phase[phi_count(b) + k]);
    return u;
}

/// v2 = diag(1, sin a1, 1, sin a2, ...) R; odd b ends the diagonal with 1.
/// The non-nilpotent extension replaces the odd-position 1s by cos(beta_k).
inline CMatrix build_v2(const ParameterVector &p) {
    p.validate();
    RVector d = RVector::Ones(p.b);
    for (int k = 0; k < alpha_count(p.b); ++k) {
        d(2 * k + 1) = std::sin(p.alpha[k]);
        if (!p.upper.empty()) d(2 * k) = std::cos(p.upper[k]);
    }
    return d.cast<Complex>().asDiagonal() * build_unitary(p);
}

inline KrausPair build_pair(const ParameterVector &p) { return KrausPair(build_v1(p), build_v2(p)); }

/// Generalised Bloch vector. Components exist for b = 2 (Pauli) and b = 3
/// (Gell-Mann); for larger b only length_sq is meaningful.
struct BlochVector {
    int b = 2;
    std::vector<double> components;
    double length_sq = 0.0;
};

/// (b Tr rho^2 - 1) / (b - 1).
inline double bloch_length_sq(const CMatrix &rho) {
    const double b = static_cast<double>(rho.rows());
    const double tr_sq = (rho * rho).trace().real();
    return (b * tr_sq - 1.0) / (b - 1.0);
}

namespace detail {

inline std::vector<CMatrix> pauli_matrices() {
    const Complex i{0.0, 1.0};
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    return {x, y, z};
}

inline std::vector<CMatrix> gell_mann_matrices() {
    const Complex i{0.0, 1.0};
    std::vector<CMatrix> l(8, CMatrix::Zero(3, 3));
    l[0](0, 1) = l[0](1, 0) = 1.0;
    l[1](0, 1) = -i;
    l[1](1, 0) = i;
    l[2](0, 0) = 1.0;
    l[2](1, 1) = -1.0;
    l[3](0, 2) = l[3](2, 0) = 1.0;
    l[4](0, 2) = -i;
    l[4](2, 0) = i;
    l[5](1, 2) = l[5](2, 1) = 1.0;
    l[6](1, 2) = -i;
    l[6](2, 1) = i;
    const double r3 = 1.0 / std::sqrt(3.0);
    l[7](0, 0) = l[7](1, 1) = r3;
    l[7](2, 2) = -2.0 * r3;
    return l;
}

} // namespace detail

/// b = 2: n_i = Tr(rho sigma_i). b = 3: n_i = (sqrt(3)/2) Tr(rho lambda_i),
/// matching rho = (1 + sqrt(3) n.lambda) / 3.
inline BlochVector bloch_decompose(const CMatrix &rho, int b) {
    if (b != 2 && b != 3)
        throw Error(ErrorKind::UnsupportedDimension, "Bloch components exist for b = 2 or 3 only, got " + std::to_string(b));
    if (rho.rows() != b || rho.cols() != b) throw Error(ErrorKind::BadShape, "density matrix does not match b");
    const auto basis = b == 2 ? detail::pauli_matrices() : detail::gell_mann_matrices();
    const double scale = b == 2 ? 1.0 : std::sqrt(3.0) / 2.0;
    BlochVector out{b, {}, 0.0};
    for (const auto &g : basis) {
        const double n = scale * (rho * g).trace().real();
        out.components.push_back(n);
        out.length_sq += n * n;
    }
    return out;
}

/// n1^2 / (1/2) + (n3 - 1/2)^2 / (1/4) - 1: zero on the ellipse of b = 2
/// invariant states.
inline double ellipse_residual(const BlochVector &bloch) {
    if (bloch.b != 2 || bloch.components.size() != 3)
        throw Error(ErrorKind::UnsupportedDimension, "ellipse residual is defined for b = 2 Bloch vectors");
    const double n1 = bloch.components[0];
    const double n3 = bloch.components[2];
    return n1 * n1 / 0.5 + (n3 - 0.5) * (n3 - 0.5) / 0.25 - 1.0;
}

} // namespace fcs
