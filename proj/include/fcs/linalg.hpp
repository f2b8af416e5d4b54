#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>

namespace fcs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace linalg {

inline bool is_real(const CMatrix &m) { return (m.imag().array() == 0.0).all(); }

inline double hermiticity_residual(const CMatrix &m) { return (m - m.adjoint()).norm(); }

inline CMatrix hermitian_part(const CMatrix &m) { return 0.5 * (m + m.adjoint()); }

/// Tr(a^dagger b) without forming the product.
inline Complex trace_inner(const CMatrix &a, const CMatrix &b) {
    return (a.conjugate().array() * b.array()).sum();
}

/// Square root of a Hermitian positive semidefinite matrix; negative
/// round-off eigenvalues are treated as zero.
inline CMatrix sqrt_psd(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m));
    RVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

inline double min_eigenvalue(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

} // namespace linalg
} // namespace fcs
