#pragma once

// Finitely correlated states of a qubit chain generated by a single Kraus
// operator V with V|s> (x) psi = v_s psi, s in {0, 1}. Qubit state |0> pairs
// with v1 and |1> with v2.

#include "fcs/error.hpp"
#include "fcs/lapack.hpp"
#include "fcs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fcs {

/// The two b x b matrices of the completely positive map. Unitality
/// (v1 v1^dagger + v2 v2^dagger = 1) is a property checked separately, not an
/// invariant enforced on construction.
class KrausPair {
public:
    KrausPair(CMatrix v1, CMatrix v2) : v1_(std::move(v1)), v2_(std::move(v2)) {
        if (v1_.rows() != v1_.cols() || v2_.rows() != v2_.cols() || v1_.rows() != v2_.rows())
            throw Error(ErrorKind::BadShape, "Kraus matrices must be square and of equal size");
        if (v1_.rows() < 2) throw Error(ErrorKind::BadShape, "auxiliary dimension must be at least 2");
    }

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(v1_.rows()); }
    [[nodiscard]] const CMatrix &v1() const noexcept { return v1_; }
    [[nodiscard]] const CMatrix &v2() const noexcept { return v2_; }

    /// Matrix attached to qubit basis state s (0 -> v1, 1 -> v2).
    [[nodiscard]] const CMatrix &operator[](int s) const noexcept { return s == 0 ? v1_ : v2_; }

    [[nodiscard]] bool is_real() const { return linalg::is_real(v1_) && linalg::is_real(v2_); }

private:
    CMatrix v1_;
    CMatrix v2_;
};

/// Frobenius norm of v1 v1^dagger + v2 v2^dagger - 1.
inline double check_unitality(const KrausPair &pair) {
    const auto b = pair.dim();
    CMatrix sum = pair.v1() * pair.v1().adjoint() + pair.v2() * pair.v2().adjoint();
    sum -= CMatrix::Identity(b, b);
    return sum.norm();
}

/// L(rho) = v1^dagger rho v1 + v2^dagger rho v2 - rho.
inline CMatrix apply_transfer_defect(const KrausPair &pair, const CMatrix &rho) {
    return pair.v1().adjoint() * rho * pair.v1() + pair.v2().adjoint() * rho * pair.v2() - rho;
}

inline double fixed_point_residual(const KrausPair &pair, const CMatrix &rho) {
    return apply_transfer_defect(pair, rho).norm();
}

struct SolverTolerances {
    double nullspace_relative = 1e-9; ///< singular values below this times the largest count as zero
    double psd_clip = 1e-10;          ///< eigenvalues in [-psd_clip, 0) are set to zero
    double psd_reject = 1e-8;         ///< eigenvalues below -psd_reject are an error
};

/// The translation-invariant auxiliary density matrix rho_B, plus what the
/// nullspace solve measured on the way.
struct AuxiliaryState {
    CMatrix rho;
    int rank = 0;                  ///< numerical rank of L on b^2-dimensional matrix space
    double smallest_singular = 0.0; ///< relative to the largest singular value
    double spectral_gap = 0.0;      ///< second-smallest singular value, relative
};

namespace detail {

struct NullVector {
    CMatrix matrix; // b x b, unnormalised
    int rank = 0;
    double smallest = 0.0;
    double gap = 0.0;
};

// Counts singular values below tol * largest over all blocks of L and fills
// the rank diagnostics; throws unless exactly one vanishes.
inline int count_null(NullVector &nv, std::initializer_list<const RVector *> blocks, double relative_tol) {
    double largest = 0.0;
    std::vector<double> all;
    for (const auto *sv : blocks) {
        for (Eigen::Index i = 0; i < sv->size(); ++i) all.push_back((*sv)(i));
        if (sv->size() > 0) largest = std::max(largest, (*sv)(0));
    }
    if (!(largest > 0.0)) throw Error(ErrorKind::NullspaceDegenerate, "L vanishes identically");
    std::sort(all.begin(), all.end());
    int nullity = 0;
    for (double v : all)
        if (v < relative_tol * largest) ++nullity;
    nv.rank = static_cast<int>(all.size()) - nullity;
    nv.smallest = all[0] / largest;
    nv.gap = all.size() > 1 ? all[1] / largest : 0.0;
    if (nullity == 0)
        throw Error(ErrorKind::NullspaceEmpty,
                    "no singular value below tolerance (smallest relative " + std::to_string(nv.smallest) + ")");
    if (nullity > 1)
        throw Error(ErrorKind::NullspaceDegenerate,
                    "invariant state is not unique (nullity " + std::to_string(nullity) + ")");
    return nullity;
}

// For real Kraus matrices L commutes with transposition, so in the
// Frobenius-orthonormal basis of symmetric and antisymmetric matrices its
// matrix is block diagonal; the singular values of the two blocks are those
// of L on the full b^2-dimensional space.
inline NullVector real_null_vector(const RMatrix &v1, const RMatrix &v2, double relative_tol) {
    const int b = static_cast<int>(v1.rows());
    const double r2 = 1.0 / std::sqrt(2.0);
    std::vector<std::pair<int, int>> sym, anti;
    for (int l = 0; l < b; ++l)
        for (int k = 0; k <= l; ++k) {
            sym.emplace_back(k, l);
            if (k < l) anti.emplace_back(k, l);
        }
    auto unit = [&](int k, int l, double sign) {
        RMatrix e = RMatrix::Zero(b, b);
        if (k == l) {
            e(k, k) = 1.0;
        } else {
            e(k, l) = r2;
            e(l, k) = sign * r2;
        }
        return e;
    };
    auto image = [&](const RMatrix &e) -> RMatrix {
        return v1.transpose() * e * v1 + v2.transpose() * e * v2 - e;
    };
    auto block = [&](const std::vector<std::pair<int, int>> &basis, double sign) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        RMatrix m(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const RMatrix x = image(unit(basis[j].first, basis[j].second, sign));
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto [k, l] = basis[i];
                m(i, j) = k == l ? x(k, k) : r2 * (x(k, l) + sign * x(l, k));
            }
        }
        return m;
    };

    const auto sym_svd = lapack::gesvd(block(sym, 1.0), true);
    const auto anti_svd = lapack::gesvd(block(anti, -1.0), false);
    NullVector nv;
    count_null(nv, {&sym_svd.singular_values, &anti_svd.singular_values}, relative_tol);

    const auto ns = static_cast<Eigen::Index>(sym.size());
    const double sym_last = sym_svd.singular_values(ns - 1);
    const bool in_sym = anti.empty() || sym_last <= anti_svd.singular_values(anti_svd.singular_values.size() - 1);
    if (!in_sym) throw Error(ErrorKind::NotPositive, "invariant matrix is antisymmetric (traceless)");
    RMatrix rho = RMatrix::Zero(b, b);
    for (Eigen::Index i = 0; i < ns; ++i) rho += sym_svd.vt(ns - 1, i) * unit(sym[i].first, sym[i].second, 1.0);
    nv.matrix = rho.cast<Complex>();
    return nv;
}

// Complex Kraus matrices: SVD of L on column-major vectorised matrices,
// assembled column by column from the images of the matrix units E_kl.
inline NullVector complex_null_vector(const KrausPair &pair, double relative_tol) {
    const int b = pair.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(b) * b;
    CMatrix op = CMatrix::Zero(n, n);
    for (int l = 0; l < b; ++l) {
        for (int k = 0; k < b; ++k) {
            const Eigen::Index column = k + static_cast<Eigen::Index>(l) * b;
            for (int s = 0; s < 2; ++s) {
                const CMatrix image = pair[s].adjoint().col(k) * pair[s].row(l);
                op.col(column) += Eigen::Map<const Eigen::VectorXcd>(image.data(), n);
            }
            op(column, column) -= 1.0;
        }
    }
    const auto svd = lapack::gesvd(op, true);
    NullVector nv;
    count_null(nv, {&svd.singular_values}, relative_tol);
    const Eigen::VectorXcd v = svd.vt.row(n - 1).adjoint();
    nv.matrix = Eigen::Map<const CMatrix>(v.data(), b, b);
    return nv;
}

} // namespace detail

/// Solves v1^dagger rho v1 + v2^dagger rho v2 = rho for the unique density
/// matrix rho_B.
///
/// The nullspace of L is found by SVD; a nullity other than one is an error.
/// The null vector is phase-fixed so its trace is positive, Hermitised,
/// normalised to unit trace and checked for positivity. Throws
/// NullspaceEmpty, NullspaceDegenerate or NotPositive.
inline AuxiliaryState solve_invariant_state(const KrausPair &pair, const SolverTolerances &tol = {}) {
    detail::NullVector nv = pair.is_real()
                                ? detail::real_null_vector(pair.v1().real(), pair.v2().real(), tol.nullspace_relative)
                                : detail::complex_null_vector(pair, tol.nullspace_relative);

    CMatrix raw = std::move(nv.matrix);
    const Complex tr = raw.trace();
    if (std::abs(tr) < 1e-12) throw Error(ErrorKind::NotPositive, "null vector is traceless");
    raw *= std::conj(tr) / std::abs(tr);
    CMatrix rho = linalg::hermitian_part(raw);
    rho /= rho.trace().real();

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho);
    const double lowest = eig.eigenvalues().minCoeff();
    if (lowest < -tol.psd_reject)
        throw Error(ErrorKind::NotPositive, "invariant state has eigenvalue " + std::to_string(lowest));
    if (lowest < 0.0 && lowest >= -tol.psd_clip) {
        RVector clipped = eig.eigenvalues();
        for (Eigen::Index i = 0; i < clipped.size(); ++i)
            if (clipped(i) < 0.0) clipped(i) = 0.0;
        rho = linalg::hermitian_part(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint());
        rho /= rho.trace().real();
    }

    return AuxiliaryState{std::move(rho), nv.rank, nv.smallest, nv.gap};
}

inline constexpr int kDefaultWindowCap = 6;

/// Density matrix of n consecutive sites. Index bit n-1-k holds the state of
/// site k+1, i.e. site 1 is the most significant qubit of |s1 s2 ... sn>.
struct ReducedState {
    int sites = 0;
    CMatrix rho;
};

namespace detail {

// Products v_{s1} v_{s2} ... v_{sn} for every n-bit string s (site 1 = MSB).
inline std::vector<CMatrix> word_products(const KrausPair &pair, int n) {
    const int b = pair.dim();
    std::vector<CMatrix> words{CMatrix::Identity(b, b)};
    for (int site = 0; site < n; ++site) {
        std::vector<CMatrix> next;
        next.reserve(words.size() * 2);
        for (const auto &w : words) {
            next.push_back(w * pair.v1());
            next.push_back(w * pair.v2());
        }
        words = std::move(next);
    }
    return words;
}

} // namespace detail

/// <s|rho|t> = Tr((v_{s1}...v_{sn})^dagger rho_B v_{t1}...v_{tn}).
inline ReducedState reduced_density(const KrausPair &pair, const AuxiliaryState &aux, int n,
                                    int cap = kDefaultWindowCap) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "window must contain at least one site");
    if (n > cap)
        throw Error(ErrorKind::CapExceeded,
                    "window of " + std::to_string(n) + " sites exceeds cap " + std::to_string(cap));
    const auto words = detail::word_products(pair, n);
    const auto d = static_cast<Eigen::Index>(words.size());
    std::vector<CMatrix> weighted;
    weighted.reserve(words.size());
    for (const auto &w : words) weighted.push_back(aux.rho * w);

    CMatrix rho(d, d);
    for (Eigen::Index t = 0; t < d; ++t) {
        for (Eigen::Index s = t; s < d; ++s) {
            const Complex value = linalg::trace_inner(words[s], weighted[t]);
            rho(s, t) = value;
            rho(t, s) = std::conj(value);
        }
    }
    return ReducedState{n, std::move(rho)};
}

/// Partial trace keeping the listed sites (1-based). The output orders its
/// sites as listed in keep, so {3, 1} also swaps them.
inline ReducedState partial_trace(const ReducedState &state, std::span<const int> keep) {
    const int n = state.sites;
    if (keep.empty()) throw Error(ErrorKind::BadSubset, "empty site subset");
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    for (int site : keep) {
        if (site < 1 || site > n)
            throw Error(ErrorKind::BadSubset, "site " + std::to_string(site) + " outside 1.." + std::to_string(n));
        if (kept[site - 1]) throw Error(ErrorKind::BadSubset, "site " + std::to_string(site) + " listed twice");
        kept[site - 1] = true;
    }
    std::vector<int> traced;
    for (int site = 1; site <= n; ++site)
        if (!kept[site - 1]) traced.push_back(site);

    const int m = static_cast<int>(keep.size());
    auto bit_of = [n](int site) { return n - site; };
    // Full index from kept-site bits (keep[0] is MSB of the output) and traced bits.
    auto compose = [&](int kept_bits, int traced_bits) {
        int index = 0;
        for (int k = 0; k < m; ++k)
            if ((kept_bits >> (m - 1 - k)) & 1) index |= 1 << bit_of(keep[k]);
        const int r = static_cast<int>(traced.size());
        for (int k = 0; k < r; ++k)
            if ((traced_bits >> (r - 1 - k)) & 1) index |= 1 << bit_of(traced[k]);
        return index;
    };

    const int dout = 1 << m;
    const int dtr = 1 << static_cast<int>(traced.size());
    CMatrix out = CMatrix::Zero(dout, dout);
    for (int a = 0; a < dout; ++a)
        for (int c = 0; c < dout; ++c)
            for (int x = 0; x < dtr; ++x) out(a, c) += state.rho(compose(a, x), compose(c, x));
    return ReducedState{m, std::move(out)};
}

inline ReducedState partial_trace(const ReducedState &state, std::initializer_list<int> keep) {
    return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

/// Next-nearest-neighbour state rho_13, summing the traced middle site
/// directly: <s1 s3|rho|t1 t3> = sum_m Tr((v_s1 v_m v_s3)^dagger rho_B v_t1 v_m v_t3).
inline ReducedState next_nearest(const KrausPair &pair, const AuxiliaryState &aux) {
    std::vector<CMatrix> words; // index (s1, m, s3) with s1 as MSB
    words.reserve(8);
    for (int s1 = 0; s1 < 2; ++s1)
        for (int mid = 0; mid < 2; ++mid)
            for (int s3 = 0; s3 < 2; ++s3) words.push_back(pair[s1] * pair[mid] * pair[s3]);
    CMatrix rho = CMatrix::Zero(4, 4);
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            Complex sum{0.0, 0.0};
            for (int mid = 0; mid < 2; ++mid) {
                const auto &ws = words[((s >> 1) << 2) | (mid << 1) | (s & 1)];
                const auto &wt = words[((t >> 1) << 2) | (mid << 1) | (t & 1)];
                sum += linalg::trace_inner(ws, aux.rho * wt);
            }
            rho(s, t) = sum;
        }
    }
    return ReducedState{2, std::move(rho)};
}

} // namespace fcs
