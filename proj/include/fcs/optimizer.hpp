#pragma once

#include "fcs/diagnostics.hpp"
#include "fcs/error.hpp"
#include "fcs/parametrization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fcs {

/// Control parameters of the Corana/Goffe annealer. Per temperature the
/// annealer performs nt rounds of ns sweeps over all coordinates, adapting
/// step widths after every ns sweeps; the temperature is then scaled by rt.
struct AnnealingConfig {
    int nt = 20;
    int ns = 10;
    double rt = 0.75;
    int neps = 5;
    double eps = 1e-10;
    double t0 = 1.0;
    std::int64_t max_evals = 5'000'000;
    std::uint64_t seed = 1;
    double initial_step = std::numbers::pi;
    ParametrizationOptions options;
    bool record_trace = true;

    void validate() const {
        if (!(rt > 0.0 && rt < 1.0)) throw Error(ErrorKind::InvalidArgument, "rt must lie in (0, 1)");
        if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
        if (nt < 1 || ns < 1 || neps < 1) throw Error(ErrorKind::InvalidArgument, "nt, ns and neps must be at least 1");
        if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
        if (max_evals < 1) throw Error(ErrorKind::InvalidArgument, "max_evals must be at least 1");
        if (!(initial_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial_step must be positive");
    }
};

enum class StopReason {
    Converged,
    BudgetExhausted,
    GradientTolerance,
    StepUnderflow,
    LineSearchFailed,
    IterationLimit,
};

constexpr std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::Converged: return "Converged";
        case StopReason::BudgetExhausted: return "BudgetExhausted";
        case StopReason::GradientTolerance: return "GradientTolerance";
        case StopReason::StepUnderflow: return "StepUnderflow";
        case StopReason::LineSearchFailed: return "LineSearchFailed";
        case StopReason::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

struct TracePoint {
    std::int64_t eval = 0;
    double best = 0.0;
};

/// Outcome of one start (annealing, optionally followed by refinement).
struct StartSummary {
    std::uint64_t seed = 0;
    bool ok = false;
    double annealed = 0.0;
    double refined = 0.0;
    std::int64_t evals = 0;
    std::string error;
};

struct OptimizationResult {
    ParameterVector params;
    StateDiagnostics diagnostics; ///< recomputed from params
    std::int64_t evals = 0;
    bool converged = false;
    StopReason stop = StopReason::Converged;
    std::vector<TracePoint> trace;

    std::uint64_t seed = 0;
    double annealed_concurrence = 0.0;
    int refine_iterations = 0;
    double gradient_norm = std::numeric_limits<double>::quiet_NaN();
    std::vector<StartSummary> starts; ///< filled by multi_start

    [[nodiscard]] double concurrence() const noexcept { return diagnostics.concurrence; }
};

namespace detail {

// Portable uniform [0, 1) draws from a 64-bit Mersenne twister.
class UnitUniform {
public:
    explicit UnitUniform(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

inline double wrap_angle(double x) {
    constexpr double period = 2.0 * std::numbers::pi;
    x = std::fmod(x, period);
    return x < 0.0 ? x + period : x;
}

} // namespace detail

/// Maximises the nearest-neighbour concurrence over the periodic box
/// [0, 2pi)^dim by simulated annealing (Metropolis on -C).
///
/// Candidates whose invariant-state solve fails count as evaluations and as
/// rejected moves. Terminates when the stage-end value has stayed within eps
/// of the best value for neps consecutive temperatures, or when max_evals is
/// spent (converged = false, stop = BudgetExhausted).
inline OptimizationResult simulated_annealing(int b, const AnnealingConfig &cfg) {
    cfg.validate();
    if (b < 2) throw Error(ErrorKind::InvalidArgument, "dimension b must be at least 2");
    constexpr double period = 2.0 * std::numbers::pi;
    const auto opts = cfg.options;
    const std::size_t n = ParameterVector::flat_size(b, opts);
    detail::UnitUniform uniform(cfg.seed);

    std::int64_t evals = 0;
    auto evaluate = [&](const std::vector<double> &x) {
        ++evals;
        return try_objective(ParameterVector::unflatten(b, opts, x));
    };

    std::vector<double> x(n);
    std::optional<double> first;
    do {
        for (auto &xi : x) xi = period * uniform();
        first = evaluate(x);
    } while (!first && evals < cfg.max_evals);
    if (!first) throw Error(ErrorKind::NonConvergence, "no valid starting point within the evaluation budget");

    double f = *first;
    std::vector<double> xopt = x;
    double fopt = f;
    std::vector<TracePoint> trace;
    if (cfg.record_trace) trace.push_back({evals, fopt});

    std::vector<double> step(n, std::min(cfg.initial_step, period));
    std::vector<int> accepted(n, 0);
    std::vector<double> fstar(static_cast<std::size_t>(cfg.neps), std::numeric_limits<double>::infinity());
    double temperature = cfg.t0;
    bool budget_hit = false;
    bool converged = false;
    constexpr double adjust = 2.0; // Corana's step-variation constant

    while (!budget_hit && !converged) {
        for (int m = 0; m < cfg.nt && !budget_hit; ++m) {
            for (int j = 0; j < cfg.ns && !budget_hit; ++j) {
                for (std::size_t h = 0; h < n; ++h) {
                    if (evals >= cfg.max_evals) {
                        budget_hit = true;
                        break;
                    }
                    std::vector<double> trial = x;
                    trial[h] = detail::wrap_angle(x[h] + (2.0 * uniform() - 1.0) * step[h]);
                    const auto ft = evaluate(trial);
                    if (!ft) continue;
                    bool accept = *ft >= f;
                    if (!accept) accept = uniform() < std::exp((*ft - f) / temperature);
                    if (!accept) continue;
                    x = std::move(trial);
                    f = *ft;
                    ++accepted[h];
                    if (f > fopt) {
                        fopt = f;
                        xopt = x;
                        if (cfg.record_trace) trace.push_back({evals, fopt});
                    }
                }
            }
            if (budget_hit) break;
            for (std::size_t h = 0; h < n; ++h) {
                const double ratio = static_cast<double>(accepted[h]) / cfg.ns;
                if (ratio > 0.6)
                    step[h] *= 1.0 + adjust * (ratio - 0.6) / 0.4;
                else if (ratio < 0.4)
                    step[h] /= 1.0 + adjust * (0.4 - ratio) / 0.4;
                step[h] = std::min(step[h], period);
                accepted[h] = 0;
            }
        }
        if (budget_hit) break;

        fstar[0] = f;
        converged = fopt - fstar[0] <= cfg.eps;
        for (double past : fstar)
            if (std::abs(f - past) > cfg.eps) converged = false;
        temperature *= cfg.rt;
        for (std::size_t i = fstar.size() - 1; i > 0; --i) fstar[i] = fstar[i - 1];
        x = xopt;
        f = fopt;
    }

    OptimizationResult result;
    result.params = ParameterVector::unflatten(b, opts, xopt);
    result.diagnostics = diagnose(result.params);
    result.evals = evals;
    result.converged = converged;
    result.stop = converged ? StopReason::Converged : StopReason::BudgetExhausted;
    result.trace = std::move(trace);
    result.seed = cfg.seed;
    result.annealed_concurrence = result.diagnostics.concurrence;
    return result;
}

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. f may throw.
template <typename F>
RVector central_difference(F &&f, const std::vector<double> &x, double h) {
    RVector grad(static_cast<Eigen::Index>(x.size()));
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        grad(static_cast<Eigen::Index>(i)) = (up - down) / (2.0 * h);
    }
    return grad;
}

/// Gradient of the objective with respect to the flattened parameters.
/// Propagates the solver's Error if a probe point fails.
inline RVector numerical_gradient(const ParameterVector &p, double h = 1e-6) {
    const auto opts = p.options();
    return central_difference(
        [&](const std::vector<double> &x) { return objective(ParameterVector::unflatten(p.b, opts, x)); },
        p.flatten(), h);
}

struct RefineOptions {
    int max_iters = 500;
    double gradient_tol = 1e-7;
    double fd_step = 1e-6;
    double armijo = 1e-4;
};

/// BFGS ascent with numerical gradients and backtracking from start.params.
/// The returned concurrence never falls below the start's.
inline OptimizationResult refine(const OptimizationResult &start, const RefineOptions &ropts = {}) {
    const int b = start.params.b;
    const auto opts = start.params.options();
    std::int64_t evals = 0;
    auto f = [&](const std::vector<double> &x) {
        ++evals;
        return objective(ParameterVector::unflatten(b, opts, x));
    };
    auto try_f = [&](const std::vector<double> &x) -> std::optional<double> {
        try {
            return f(x);
        } catch (const Error &e) {
            if (is_solve_failure(e.kind())) return std::nullopt;
            throw;
        }
    };
    auto gradient = [&](const std::vector<double> &x) -> std::optional<RVector> {
        try {
            return central_difference(f, x, ropts.fd_step);
        } catch (const Error &e) {
            if (is_solve_failure(e.kind())) return std::nullopt;
            throw;
        }
    };

    std::vector<double> x = start.params.flatten();
    const auto n = static_cast<Eigen::Index>(x.size());
    double fx = start.diagnostics.concurrence;
    auto grad = gradient(x);

    OptimizationResult out = start;
    out.stop = StopReason::IterationLimit;
    RMatrix inv_hessian = RMatrix::Identity(n, n);
    bool scaled = false;
    int iter = 0;

    if (!grad) {
        out.stop = StopReason::LineSearchFailed;
    } else {
        for (; iter < ropts.max_iters; ++iter) {
            if (grad->norm() <= ropts.gradient_tol) {
                out.stop = StopReason::GradientTolerance;
                break;
            }
            RVector dir = inv_hessian * *grad;
            if (dir.dot(*grad) <= 0.0) {
                inv_hessian.setIdentity();
                dir = *grad;
            }
            double t = std::min(1.0, std::numbers::pi / dir.cwiseAbs().maxCoeff());
            const double slope = grad->dot(dir);
            std::vector<double> next(x.size());
            std::optional<double> fnext;
            bool probe_failed = false;
            while (true) {
                for (Eigen::Index i = 0; i < n; ++i) next[i] = x[i] + t * dir(i);
                fnext = try_f(next);
                if (!fnext) probe_failed = true;
                if (fnext && *fnext >= fx + ropts.armijo * t * slope && *fnext > fx) break;
                t *= 0.5;
                if (t * dir.cwiseAbs().maxCoeff() < 1e-15) {
                    fnext.reset();
                    break;
                }
            }
            if (!fnext) {
                out.stop = probe_failed ? StopReason::LineSearchFailed : StopReason::StepUnderflow;
                break;
            }
            auto next_grad = gradient(next);
            if (!next_grad) {
                // Keep the improved point even though the gradient probe failed.
                x = next;
                fx = *fnext;
                out.stop = StopReason::LineSearchFailed;
                ++iter;
                break;
            }
            RVector s(n);
            for (Eigen::Index i = 0; i < n; ++i) s(i) = next[i] - x[i];
            const RVector y = *grad - *next_grad; // gradient change of -C
            const double sy = s.dot(y);
            if (sy > 1e-14 * s.norm() * y.norm()) {
                if (!scaled) {
                    inv_hessian *= sy / y.squaredNorm();
                    scaled = true;
                }
                const double rho = 1.0 / sy;
                const RMatrix left = RMatrix::Identity(n, n) - rho * s * y.transpose();
                inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
            }
            x = std::move(next);
            fx = *fnext;
            grad = std::move(next_grad);
        }
    }

    out.params = ParameterVector::unflatten(b, opts, x);
    if (out.params != start.params) out.diagnostics = diagnose(out.params);
    out.evals = start.evals + evals;
    out.refine_iterations = iter;
    out.gradient_norm = grad ? grad->norm() : std::numeric_limits<double>::quiet_NaN();
    out.converged = out.stop == StopReason::GradientTolerance || out.stop == StopReason::StepUnderflow;
    if (!out.trace.empty() && out.diagnostics.concurrence > out.trace.back().best)
        out.trace.push_back({out.evals, out.diagnostics.concurrence});
    return out;
}

/// Annealing followed by refinement from seeds seed, seed+1, ...; returns the
/// best run. Runs are independent and may execute on up to `threads` workers;
/// the winner is the highest concurrence with ties going to the lowest seed
/// index, so the outcome does not depend on scheduling.
inline OptimizationResult multi_start(int b, const AnnealingConfig &cfg, int n_starts, unsigned threads = 1,
                                      const RefineOptions &ropts = {}) {
    if (n_starts < 1) throw Error(ErrorKind::InvalidArgument, "n_starts must be at least 1");
    cfg.validate();
    std::vector<std::optional<OptimizationResult>> results(static_cast<std::size_t>(n_starts));
    std::vector<StartSummary> summaries(static_cast<std::size_t>(n_starts));
    std::atomic<int> next{0};

    auto worker = [&] {
        for (int k = next.fetch_add(1); k < n_starts; k = next.fetch_add(1)) {
            AnnealingConfig run = cfg;
            run.seed = cfg.seed + static_cast<std::uint64_t>(k);
            auto &summary = summaries[static_cast<std::size_t>(k)];
            summary.seed = run.seed;
            try {
                auto annealed = simulated_annealing(b, run);
                summary.annealed = annealed.concurrence();
                auto refined = refine(annealed, ropts);
                summary.refined = refined.concurrence();
                summary.evals = refined.evals;
                summary.ok = true;
                results[static_cast<std::size_t>(k)] = std::move(refined);
            } catch (const Error &e) {
                summary.error = e.what();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min(threads, static_cast<unsigned>(n_starts)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!results[k]) continue;
        if (!best || results[k]->concurrence() > results[*best]->concurrence()) best = k;
    }
    if (!best) throw Error(ErrorKind::AllStartsFailed, "every start failed: " + summaries.front().error);
    OptimizationResult out = std::move(*results[*best]);
    out.starts = std::move(summaries);
    return out;
}

} // namespace fcs
