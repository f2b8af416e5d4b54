#pragma once

// Invariant suite run over random parameter draws.

#include "fcs/core.hpp"
#include "fcs/diagnostics.hpp"
#include "fcs/entanglement.hpp"
#include "fcs/known_optima.hpp"
#include "fcs/optimizer.hpp"
#include "fcs/parametrization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace fcs {

struct VerifyOptions {
    std::vector<int> dims{2, 3, 4};
    std::uint64_t seed = 1;
    int draws = 1000;
    int max_window = 4;      ///< marginal consistency is checked for n + 1 <= max_window
    bool corrupt_v2 = false; ///< scale v2 by 1.01 so unitality fails (negative control)
};

/// Tally of one named check at one dimension. worst is the largest residual
/// seen (or the smallest margin for inequality checks).
struct CheckTally {
    std::string name;
    int b = 0;
    double tolerance = 0.0;
    long passed = 0;
    long failed = 0;
    double worst = 0.0;

    [[nodiscard]] bool ok() const noexcept { return failed == 0; }
};

struct VerifyReport {
    std::vector<CheckTally> checks;
    std::vector<long> skipped; ///< draws per dimension whose solve failed, parallel to dims
    std::vector<long> solved;  ///< draws per dimension that reached the state checks

    [[nodiscard]] bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckTally &c) { return c.ok(); });
    }
    [[nodiscard]] long failures() const {
        return std::accumulate(checks.begin(), checks.end(), 0L,
                               [](long acc, const CheckTally &c) { return acc + c.failed; });
    }
};

namespace detail {

class Tallies {
public:
    explicit Tallies(int b) : b_(b) {}

    // Residual check: passes when value <= tol.
    void residual(const std::string &name, double tol, double value) {
        auto &t = get(name, tol);
        t.worst = std::max(t.worst, value);
        (std::isfinite(value) && value <= tol ? t.passed : t.failed) += 1;
    }

    // Inequality check: passes when margin >= -tol; worst tracks the minimum margin.
    void margin(const std::string &name, double tol, double value) {
        auto &t = get(name, tol);
        const bool first = t.passed + t.failed == 0;
        t.worst = first ? value : std::min(t.worst, value);
        (value >= -tol ? t.passed : t.failed) += 1;
    }

    std::vector<CheckTally> take() { return std::move(tallies_); }

private:
    CheckTally &get(const std::string &name, double tol) {
        for (auto &t : tallies_)
            if (t.name == name) return t;
        tallies_.push_back(CheckTally{name, b_, tol, 0, 0, 0.0});
        return tallies_.back();
    }

    int b_;
    std::vector<CheckTally> tallies_;
};

inline double max_abs(const CMatrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double density_defect(const CMatrix &rho) {
    const double herm = linalg::hermiticity_residual(rho);
    const double trace = std::abs(rho.trace() - Complex(1.0, 0.0));
    const double negativity = std::max(0.0, -linalg::min_eigenvalue(rho));
    return std::max({herm, trace, negativity});
}

} // namespace detail

/// Runs the invariant suite until `draws` parameter points per dimension have
/// a solvable invariant state (at most 10 x draws attempts). Draws whose solve
/// fails are counted in `skipped` and otherwise ignored; the unitality check
/// runs before the solve so the corrupt_v2 negative control always registers.
inline VerifyReport run_verification(const VerifyOptions &opts) {
    if (opts.draws < 1) throw Error(ErrorKind::InvalidArgument, "draws must be at least 1");
    if (opts.max_window < 2 || opts.max_window > kDefaultWindowCap)
        throw Error(ErrorKind::InvalidArgument, "max_window must lie in [2, " + std::to_string(kDefaultWindowCap) + "]");
    VerifyReport report;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    for (int b : opts.dims) {
        if (b < 2) throw Error(ErrorKind::InvalidArgument, "dimension b must be at least 2");
        detail::Tallies tally(b);
        detail::UnitUniform uniform(opts.seed * 1000003ULL + static_cast<std::uint64_t>(b));
        long skipped = 0;
        long solved = 0;
        const long max_attempts = 10L * opts.draws;

        for (long attempt = 0; attempt < max_attempts && solved < opts.draws; ++attempt) {
            ParameterVector p = ParameterVector::zeros(b);
            for (auto &a : p.alpha) a = two_pi * uniform();
            for (auto &f : p.phi) f = two_pi * uniform();
            CMatrix v1 = build_v1(p), v2 = build_v2(p);
            if (opts.corrupt_v2) v2 *= 1.01;
            const KrausPair pair(v1, v2);
            tally.residual("unitality", 1e-12, check_unitality(pair));
            tally.residual("nilpotency", 1e-14, detail::max_abs(v1 * v1));

            AuxiliaryState aux;
            try {
                aux = solve_invariant_state(pair);
            } catch (const Error &e) {
                if (!is_solve_failure(e.kind())) throw;
                ++skipped;
                continue;
            }
            ++solved;
            tally.residual("fixed_point", 1e-9, fixed_point_residual(pair, aux.rho));
            tally.residual("density_rho_B", 1e-10, detail::density_defect(aux.rho));

            std::vector<ReducedState> windows;
            for (int n = 1; n <= opts.max_window; ++n) windows.push_back(reduced_density(pair, aux, n));
            double marginal = 0.0, density = 0.0;
            for (int n = 1; n < opts.max_window; ++n) {
                const auto &big = windows[static_cast<std::size_t>(n)];
                const auto &small = windows[static_cast<std::size_t>(n - 1)];
                std::vector<int> first(static_cast<std::size_t>(n)), last(static_cast<std::size_t>(n));
                std::iota(first.begin(), first.end(), 1);
                std::iota(last.begin(), last.end(), 2);
                marginal = std::max(marginal, detail::max_abs(partial_trace(big, first).rho - small.rho));
                marginal = std::max(marginal, detail::max_abs(partial_trace(big, last).rho - small.rho));
            }
            for (const auto &w : windows) density = std::max(density, detail::density_defect(w.rho));
            tally.residual("marginal_consistency", 1e-10, marginal);
            tally.residual("density_windows", 1e-10, density);

            const CMatrix &rho12 = windows[1].rho;
            tally.residual("abc_structure", 1e-10, abc_structure_residual(rho12));
            const auto spectrum = concurrence_spectrum(rho12);
            const auto e = abc_elements(rho12);
            const auto without_c = concurrence_spectrum(abc_matrix(e.A, e.B, 0.0));
            double c_shift = 0.0;
            for (int i = 0; i < 4; ++i)
                c_shift = std::max(c_shift, std::abs(spectrum.lambdas[i] - without_c.lambdas[i]));
            tally.residual("c_independence", 1e-10, c_shift);
            tally.margin("assistance_ge_concurrence", 1e-12, spectrum.assistance - spectrum.concurrence);

            const ReducedState direct13 = next_nearest(pair, aux);
            tally.residual("next_nearest_route", 1e-12,
                           detail::max_abs(direct13.rho - partial_trace(windows[2], {1, 3}).rho));

            if (b == 2) {
                const auto bloch = bloch_decompose(aux.rho, 2);
                tally.residual("ellipse", 1e-9, std::abs(ellipse_residual(bloch)));
                tally.residual("bloch_y", 1e-12, std::abs(bloch.components[1]));
                const double a = p.alpha[0], f = p.phi[0];
                tally.residual("analytic_concurrence", 1e-10,
                               std::abs(analytic_concurrence_b2(a, f) - spectrum.concurrence));
                tally.residual("analytic_assistance", 1e-10,
                               std::abs(analytic_assistance_b2(a, f) - spectrum.assistance));
                ParameterVector mirror = p;
                mirror.alpha[0] = std::numbers::pi - a;
                mirror.phi[0] = -f;
                if (const auto c = try_objective(mirror))
                    tally.residual("symmetry", 1e-10, std::abs(*c - spectrum.concurrence));
            }
        }

        if (const auto known = known::reference_optimum(b); known && !opts.corrupt_v2) {
            const auto d = diagnose(known->params);
            tally.margin("purity_growth_at_optimum", 0.0, d.purity123 - d.purity12 - 1e-12);
            tally.residual("next_nearest_at_optimum", 1e-6, d.next_nearest_concurrence);
        }

        for (auto &t : tally.take()) report.checks.push_back(std::move(t));
        report.skipped.push_back(skipped);
        report.solved.push_back(solved);
    }
    return report;
}

} // namespace fcs
