#include "support.hpp"

#include <gtest/gtest.h>

using namespace fcs;
using namespace fcs::testing;

namespace {

ParameterVector b2(double a, double f) {
    ParameterVector p = ParameterVector::zeros(2);
    p.alpha = {a};
    p.phi = {f};
    return p;
}

bool same_result(const OptimizationResult &x, const OptimizationResult &y) {
    return x.params == y.params && x.evals == y.evals && x.concurrence() == y.concurrence() && x.stop == y.stop;
}

} // namespace

TEST(Objective, ReferenceValues) {
    EXPECT_NEAR(objective(b2(0.427079, 0.571859)), 0.414214, 1e-6);
    EXPECT_NEAR(objective(known::reference_optimum(4)->params), 0.43200, 5e-6);
    EXPECT_EQ(objective(b2(0.0, 0.0)), 0.0);
}

TEST(Objective, FailuresMapToNullopt) {
    // alpha = pi/2 switches v1 off; with phi = 0 the channel is the identity.
    EXPECT_FALSE(try_objective(b2(kPi / 2, 0.0)).has_value());
    EXPECT_THROW(objective(b2(kPi / 2, 0.0)), Error);
}

TEST(Objective, B2MirrorSymmetry) {
    Rng rng(1);
    for (int draw = 0; draw < 100; ++draw) {
        const double a = rng.angle(), f = rng.angle();
        const auto c = try_objective(b2(a, f));
        const auto m = try_objective(b2(kPi - a, -f));
        ASSERT_EQ(c.has_value(), m.has_value());
        if (c) EXPECT_NEAR(*c, *m, 1e-10);
    }
}

TEST(Objective, PeriodicInEveryAngle) {
    Rng rng(2);
    const auto p = rng.params(4);
    const double base = objective(p);
    for (std::size_t i = 0; i < p.flatten().size(); ++i) {
        auto flat = p.flatten();
        flat[i] += 2.0 * kPi;
        EXPECT_NEAR(objective(ParameterVector::unflatten(4, {}, flat)), base, 1e-10);
    }
}

TEST(AnnealingConfig, Validation) {
    AnnealingConfig c;
    EXPECT_NO_THROW(c.validate());
    for (auto mutate : std::vector<std::function<void(AnnealingConfig &)>>{
             [](auto &x) { x.rt = 1.0; }, [](auto &x) { x.rt = 0.0; }, [](auto &x) { x.eps = 0.0; },
             [](auto &x) { x.nt = 0; }, [](auto &x) { x.ns = 0; }, [](auto &x) { x.neps = 0; },
             [](auto &x) { x.t0 = -1.0; }, [](auto &x) { x.max_evals = 0; }}) {
        AnnealingConfig bad;
        mutate(bad);
        EXPECT_THROW(bad.validate(), Error);
        EXPECT_THROW(simulated_annealing(2, bad), Error);
    }
    EXPECT_THROW(simulated_annealing(1, c), Error);
}

TEST(Annealing, UniformDrawsAreInUnitInterval) {
    fcs::detail::UnitUniform u(42);
    for (int i = 0; i < 10000; ++i) {
        const double x = u();
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
    EXPECT_NEAR(fcs::detail::wrap_angle(-0.5), 2 * kPi - 0.5, 1e-15);
    EXPECT_NEAR(fcs::detail::wrap_angle(7.0), 7.0 - 2 * kPi, 1e-15);
}

TEST(Annealing, B2ReachesOptimumForSeveralSeeds) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        AnnealingConfig c;
        c.seed = seed;
        const auto r = simulated_annealing(2, c);
        EXPECT_GE(r.concurrence(), known::kOptimumB2 - 1e-3) << "seed " << seed;
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.stop, StopReason::Converged);
        EXPECT_LE(r.evals, c.max_evals);
    }
}

TEST(Annealing, TinyBudgetIsExhausted) {
    AnnealingConfig c;
    c.max_evals = 10;
    const auto r = simulated_annealing(2, c);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.stop, StopReason::BudgetExhausted);
    EXPECT_GE(r.concurrence(), 0.0);
    EXPECT_LE(r.evals, 10);
}

TEST(Annealing, DeterministicAndMonotoneTrace) {
    AnnealingConfig c;
    c.seed = 9;
    c.max_evals = 20000;
    const auto a = simulated_annealing(3, c);
    const auto b = simulated_annealing(3, c);
    EXPECT_TRUE(same_result(a, b));
    ASSERT_FALSE(a.trace.empty());
    for (std::size_t i = 1; i < a.trace.size(); ++i) {
        EXPECT_GE(a.trace[i].best, a.trace[i - 1].best);
        EXPECT_GT(a.trace[i].eval, a.trace[i - 1].eval);
    }
    EXPECT_DOUBLE_EQ(a.trace.back().best, a.concurrence());
    EXPECT_EQ(objective(a.params), a.concurrence());
}

TEST(Annealing, ProbesStayInPeriodicBox) {
    AnnealingConfig c;
    c.max_evals = 5000;
    const auto r = simulated_annealing(4, c);
    for (double x : r.params.flatten()) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 2 * kPi);
    }
}

TEST(NumericalGradient, FlatDirectionAtZeroPhi) {
    const auto g = numerical_gradient(b2(0.7, 0.0));
    EXPECT_NEAR(g(0), 0.0, 1e-8);
}

TEST(NumericalGradient, SmallAtOptimum) {
    AnnealingConfig c;
    const auto r = refine(simulated_annealing(2, c));
    EXPECT_LE(numerical_gradient(r.params).norm(), 1e-4);
}

TEST(NumericalGradient, ConsistentAcrossStepSizes) {
    Rng rng(3);
    const auto p = rng.params(3);
    const RVector g5 = numerical_gradient(p, 1e-5);
    const RVector g6 = numerical_gradient(p, 1e-6);
    const RVector g7 = numerical_gradient(p, 1e-7);
    EXPECT_LE((g5 - g6).norm(), 1e-7 * std::max(1.0, g6.norm()));
    EXPECT_LE((g6 - g7).norm(), 1e-6 * std::max(1.0, g6.norm()));
    // Directional derivative against a secant along a random direction.
    RVector dir(static_cast<Eigen::Index>(p.size()));
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = rng.uniform(-1.0, 1.0);
    dir.normalize();
    const double h = 1e-4;
    auto shifted = [&](double t) {
        auto flat = p.flatten();
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += t * dir(static_cast<Eigen::Index>(i));
        return objective(ParameterVector::unflatten(3, {}, flat));
    };
    EXPECT_NEAR((shifted(h) - shifted(-h)) / (2 * h), g6.dot(dir), 1e-6);
}

TEST(NumericalGradient, ProbeFailurePropagates) {
    EXPECT_THROW(numerical_gradient(b2(kPi / 2, 0.0)), Error);
}

TEST(Refine, B2ReachesAnalyticOptimum) {
    AnnealingConfig c;
    c.seed = 4;
    const auto annealed = simulated_annealing(2, c);
    const auto r = refine(annealed);
    EXPECT_NEAR(r.concurrence(), known::kOptimumB2, 1e-6);
    EXPECT_GE(r.concurrence(), annealed.concurrence());
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.evals, annealed.evals);
}

TEST(Refine, NeverDecreasesFromOptimalStart) {
    OptimizationResult start;
    start.params = known::reference_optimum(2)->params;
    start.diagnostics = diagnose(start.params);
    const auto once = refine(start);
    const auto twice = refine(once);
    EXPECT_GE(once.concurrence(), start.concurrence());
    EXPECT_GE(twice.concurrence(), once.concurrence());
    EXPECT_NEAR(twice.concurrence(), once.concurrence(), 1e-12);
}

TEST(Refine, ImprovesRandomStarts) {
    Rng rng(5);
    for (int b = 2; b <= 4; ++b) {
        OptimizationResult start;
        start.params = rng.params(b);
        start.diagnostics = diagnose(start.params);
        const auto r = refine(start, {60, 1e-7, 1e-6, 1e-4});
        EXPECT_GE(r.concurrence(), start.concurrence());
        EXPECT_LE(r.refine_iterations, 60);
        EXPECT_EQ(objective(r.params), r.concurrence());
    }
}

TEST(MultiStart, DeterministicAcrossInvocationsAndThreads) {
    AnnealingConfig c;
    c.seed = 11;
    const auto a = multi_start(2, c, 4);
    const auto b = multi_start(2, c, 4);
    const auto threaded = multi_start(2, c, 4, 3);
    EXPECT_TRUE(same_result(a, b));
    EXPECT_TRUE(same_result(a, threaded));
    EXPECT_NEAR(a.concurrence(), known::kOptimumB2, 1e-6);
    ASSERT_EQ(a.starts.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(a.starts[k].seed, 11 + k);
        EXPECT_TRUE(a.starts[k].ok);
        EXPECT_LE(a.starts[k].refined, a.concurrence());
    }
}

TEST(MultiStart, WinnerIsLowestSeedAmongTies) {
    AnnealingConfig c;
    c.seed = 20;
    const auto r = multi_start(2, c, 3);
    double best = -1.0;
    std::uint64_t winner = 0;
    for (const auto &s : r.starts)
        if (s.refined > best) {
            best = s.refined;
            winner = s.seed;
        }
    EXPECT_EQ(r.seed, winner);
    EXPECT_EQ(r.concurrence(), best);
}

TEST(MultiStart, RejectsZeroStarts) { EXPECT_THROW(multi_start(2, AnnealingConfig{}, 0), Error); }

TEST(MultiStart, ReportedOptimumHasReferenceProperties) {
    AnnealingConfig c;
    c.seed = 3;
    const auto r = multi_start(3, c, 2);
    EXPECT_NEAR(r.concurrence(), 0.41825, 5e-4);
    EXPECT_EQ(objective(r.params), r.concurrence());
    EXPECT_LE(r.diagnostics.next_nearest_concurrence, 1e-6);
    EXPECT_GT(r.diagnostics.assistance, r.diagnostics.concurrence);
    EXPECT_LT(r.diagnostics.purity12, r.diagnostics.purity123);
}

TEST(Probes, ComplexRotationAndNonNilpotentRun) {
    for (auto opts : {ParametrizationOptions{true, false}, ParametrizationOptions{false, true}}) {
        AnnealingConfig c;
        c.options = opts;
        c.max_evals = 4000;
        const auto r = simulated_annealing(2, c);
        EXPECT_EQ(r.params.options(), opts);
        EXPECT_GE(r.concurrence(), 0.0);
        EXPECT_LE(r.diagnostics.unitality_residual, 1e-13);
    }
}
