#pragma once

#include "fcs/error.hpp"
#include "fcs/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace fcs {

/// sigma_y (x) sigma_y in the |00>, |01>, |10>, |11> basis.
inline CMatrix sigma_yy() {
    CMatrix yy = CMatrix::Zero(4, 4);
    yy(0, 3) = yy(3, 0) = -1.0;
    yy(1, 2) = yy(2, 1) = 1.0;
    return yy;
}

inline void require_two_qubit(const CMatrix &rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw Error(ErrorKind::BadShape, "expected a 4x4 two-qubit matrix, got " + std::to_string(rho.rows()) + "x" +
                                             std::to_string(rho.cols()));
}

/// (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y).
inline CMatrix spin_flip(const CMatrix &rho) {
    require_two_qubit(rho);
    const CMatrix yy = sigma_yy();
    return yy * rho.conjugate() * yy;
}

struct ConcurrenceSpectrum {
    std::array<double, 4> lambdas{}; ///< descending square roots of eig(rho rho~)
    double concurrence = 0.0;
    double assistance = 0.0;
};

/// Wootters concurrence and concurrence of assistance.
///
/// The lambdas are the singular values of sqrt(rho) sqrt(rho~), which share
/// their squares with the eigenvalues of rho rho~. Taking singular values
/// directly keeps zero lambdas at round-off level instead of sqrt(round-off).
inline ConcurrenceSpectrum concurrence_spectrum(const CMatrix &rho) {
    require_two_qubit(rho);
    const CMatrix root = linalg::sqrt_psd(rho);
    const CMatrix root_flipped = spin_flip(root);
    Eigen::JacobiSVD<CMatrix> svd(root * root_flipped);
    if (svd.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "SVD of sqrt(rho) sqrt(rho~) failed");
    ConcurrenceSpectrum out;
    for (int i = 0; i < 4; ++i) out.lambdas[i] = svd.singularValues()(i);
    std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
    const auto &l = out.lambdas;
    out.concurrence = std::max(0.0, l[0] - l[1] - l[2] - l[3]);
    out.assistance = l[0] + l[1] + l[2] + l[3];
    return out;
}

inline double concurrence(const CMatrix &rho) { return concurrence_spectrum(rho).concurrence; }

/// Tr rho^2.
inline double purity(const CMatrix &rho) { return linalg::trace_inner(rho.adjoint(), rho).real(); }

/// Entries of a two-qubit state of the nilpotent form
///   [[0,0,0,0],[0,A,B,C],[0,B*,A,C],[0,C*,C*,1-2A]].
struct AbcElements {
    double A = 0.0;
    Complex B{};
    Complex C{};
};

inline AbcElements abc_elements(const CMatrix &rho12) {
    require_two_qubit(rho12);
    return {rho12(1, 1).real(), rho12(1, 2), rho12(1, 3)};
}

inline CMatrix abc_matrix(double a, Complex b, Complex c) {
    CMatrix m = CMatrix::Zero(4, 4);
    m(1, 1) = m(2, 2) = a;
    m(1, 2) = b;
    m(2, 1) = std::conj(b);
    m(1, 3) = m(2, 3) = c;
    m(3, 1) = m(3, 2) = std::conj(c);
    m(3, 3) = 1.0 - 2.0 * a;
    return m;
}

/// Largest deviation of rho12 from the A/B/C pattern (zero first row and
/// column, equal diagonal A entries, repeated C, trace-fixed corner).
inline double abc_structure_residual(const CMatrix &rho12) {
    const auto e = abc_elements(rho12);
    return (rho12 - abc_matrix(e.A, e.B, e.C)).cwiseAbs().maxCoeff();
}

/// Closed-form purities of the A/B/C form.
inline double abc_purity(double a, double b_abs, double c_abs) {
    return 1.0 - 4.0 * a + 6.0 * a * a + 2.0 * b_abs * b_abs + 4.0 * c_abs * c_abs;
}
inline double abc_single_site_purity(double a, double c_abs) {
    return 1.0 - 2.0 * a + 2.0 * a * a + 2.0 * c_abs * c_abs;
}

namespace detail {

// Common rational structure of the b = 2 nearest-neighbour entries; the
// closed forms below evaluate to -B and -A respectively.
struct B2Fraction {
    double numerator_base; // cos^2 a (1 + sin a) sin^2 phi
    double denominator;
};

inline B2Fraction b2_fraction(double alpha1, double phi1) {
    const double ca = std::cos(alpha1), sa = std::sin(alpha1);
    const double cp = std::cos(phi1), sp = std::sin(phi1);
    const double num = ca * ca * (1.0 + sa) * sp * sp;
    const double den = ca * ca * cp * cp * (-1.0 + sa) - 2.0 * (1.0 + sa) * sp * sp;
    return {num, den};
}

} // namespace detail

/// Nearest-neighbour concurrence 2|B| for b = 2 in closed form. Returns 0 on
/// the measure-zero set where the closed form is 0/0.
inline double analytic_concurrence_b2(double alpha1, double phi1) {
    const auto f = detail::b2_fraction(alpha1, phi1);
    if (f.denominator == 0.0) return 0.0;
    const double cp = std::cos(phi1);
    return 2.0 * std::abs(f.numerator_base * cp * cp / f.denominator);
}

/// Nearest-neighbour concurrence of assistance 2A for b = 2 in closed form.
inline double analytic_assistance_b2(double alpha1, double phi1) {
    const auto f = detail::b2_fraction(alpha1, phi1);
    if (f.denominator == 0.0) return 0.0;
    return 2.0 * std::abs(f.numerator_base / f.denominator);
}

struct PurityConcurrence {
    double purity = 0.0;
    double concurrence = 0.0;
};

inline Eigen::Vector4cd bell_psi(double sign) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(1) = 1.0 / std::sqrt(2.0);
    psi(2) = sign / std::sqrt(2.0);
    return psi;
}

/// Maximally entangled mixed state family: for q <= 2/3,
/// (1/3 + q/2) psi+ + (1/3 - q/2) psi- + (1/3)|11><11|; above, q psi+ + (1-q)|11><11|.
inline CMatrix mems_state(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::OutOfRange, "MEMS parameter q must lie in [0, 1]");
    const Eigen::Vector4cd plus = bell_psi(1.0), minus = bell_psi(-1.0);
    CMatrix eleven = CMatrix::Zero(4, 4);
    eleven(3, 3) = 1.0;
    if (q <= 2.0 / 3.0)
        return (1.0 / 3.0 + q / 2.0) * plus * plus.adjoint() + (1.0 / 3.0 - q / 2.0) * minus * minus.adjoint() +
               eleven / 3.0;
    return q * plus * plus.adjoint() + (1.0 - q) * eleven;
}

inline CMatrix werner_state(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::OutOfRange, "Werner parameter p must lie in [0, 1]");
    const Eigen::Vector4cd plus = bell_psi(1.0);
    return (1.0 - p) / 4.0 * CMatrix::Identity(4, 4) + p * plus * plus.adjoint();
}

inline PurityConcurrence mems_point(double q) {
    const CMatrix rho = mems_state(q);
    return {purity(rho), concurrence(rho)};
}

inline PurityConcurrence werner_point(double p) {
    const CMatrix rho = werner_state(p);
    return {purity(rho), concurrence(rho)};
}

} // namespace fcs
