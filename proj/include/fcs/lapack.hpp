#pragma once

// Thin wrappers over LAPACK's gesvd for the small dense SVDs of the
// nullspace solve.

#include "fcs/error.hpp"
#include "fcs/linalg.hpp"

#include <complex>
#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#include <lapacke.h>

#include <algorithm>
#include <string>

namespace fcs::lapack {

template <typename Scalar>
struct Svd {
    RVector singular_values;                                   ///< descending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vt;  ///< V^dagger; empty unless requested
};

inline Svd<double> gesvd(RMatrix a, bool want_v) {
    const auto n = static_cast<lapack_int>(a.cols());
    const auto m = static_cast<lapack_int>(a.rows());
    Svd<double> out;
    out.singular_values.resize(std::min(m, n));
    RVector superb(std::max<lapack_int>(1, std::min(m, n)));
    double dummy = 0.0;
    if (want_v) out.vt.resize(n, n);
    const lapack_int info =
        LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', want_v ? 'A' : 'N', m, n, a.data(), m, out.singular_values.data(),
                       &dummy, 1, want_v ? out.vt.data() : &dummy, want_v ? n : 1, superb.data());
    if (info != 0) throw Error(ErrorKind::NonConvergence, "dgesvd failed with info " + std::to_string(info));
    return out;
}

inline Svd<Complex> gesvd(CMatrix a, bool want_v) {
    const auto n = static_cast<lapack_int>(a.cols());
    const auto m = static_cast<lapack_int>(a.rows());
    Svd<Complex> out;
    out.singular_values.resize(std::min(m, n));
    RVector superb(std::max<lapack_int>(1, std::min(m, n)));
    lapack_complex_double dummy{};
    if (want_v) out.vt.resize(n, n);
    auto *data = reinterpret_cast<lapack_complex_double *>(a.data());
    auto *vt = want_v ? reinterpret_cast<lapack_complex_double *>(out.vt.data()) : &dummy;
    const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', want_v ? 'A' : 'N', m, n, data, m,
                                           out.singular_values.data(), &dummy, 1, vt, want_v ? n : 1, superb.data());
    if (info != 0) throw Error(ErrorKind::NonConvergence, "zgesvd failed with info " + std::to_string(info));
    return out;
}

} // namespace fcs::lapack
