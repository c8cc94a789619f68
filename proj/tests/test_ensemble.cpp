#include "coopdecay/ensemble.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace coopdecay;

TEST(Statistics, TwoPointMeans) {
    const std::vector<double> v{1e-2, 1e-6};
    const auto s = summarize(v);
    EXPECT_NEAR(s.mean_geom, 1e-4, 1e-18);
    EXPECT_NEAR(s.mean_arith, 5.0005e-3, 1e-15);
    EXPECT_EQ(s.minimum, 1e-6);
    EXPECT_EQ(s.maximum, 1e-2);
    EXPECT_EQ(s.count, 2u);
}

TEST(Statistics, AmGmOrderingOnRandomSamples) {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(1 + trial % 40);
        for (auto& x : v) x = std::pow(10.0, -20.0 * rng.uniform());
        const auto s = summarize(v);
        EXPECT_LE(s.minimum, s.mean_geom);
        EXPECT_LE(s.mean_geom, s.mean_arith);
        EXPECT_LE(s.mean_arith, s.maximum);
    }
}

TEST(Statistics, ZerosAreFlooredForGeometricMean) {
    const std::vector<double> v{0.0, 1.0};
    const auto s = summarize(v);
    EXPECT_EQ(s.floored, 1u);
    EXPECT_NEAR(s.mean_geom, std::sqrt(geometric_floor), 1e-160);
}

TEST(Statistics, AllZeroSampleKeepsOrdering) {
    const std::vector<double> v{0.0, 0.0, 0.0};
    const auto s = summarize(v);
    EXPECT_EQ(s.mean_arith, 0.0);
    EXPECT_EQ(s.mean_geom, 0.0);
}

TEST(Statistics, StandardErrorShrinksAsInverseRootCount) {
    Rng rng(5);
    auto sample_se = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = 3.0 + rng.centered(1.0);
        return summarize(v).standard_error;
    };
    const double small = sample_se(1000), large = sample_se(16000);
    EXPECT_NEAR(small / large, 4.0, 0.4);
    EXPECT_NEAR(small, std::sqrt(1.0 / 12.0 / 1000.0), 0.1 * small);
}

TEST(Statistics, EmptySampleRejected) {
    EXPECT_THROW(summarize(std::vector<double>{}), ValidationError);
}

TEST(Pool, ResultsIndependentOfThreadCount) {
    const LatticeSpec spec{Environment::HalfWaveguide, {20}, 0.15};
    const auto dis = disorder_realizations(1.0, 0.2, 42, 12);
    ObservableRequest req;
    req.observables = {Observable::SlowestRate, Observable::Population};
    req.times = {0.0, 10.0, 50.0};
    const auto one = run_realizations(spec, dis, req, 1);
    const auto four = run_realizations(spec, dis, req, 4);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].slowest_rate, four[i].slowest_rate);
        EXPECT_EQ(one[i].population, four[i].population);
    }
}

TEST(Pool, LowestFailingIndexIsRethrown) {
    try {
        parallel_for(50, 4, [](std::size_t i) {
            if (i == 7 || i == 30) throw ValidationError("job " + std::to_string(i));
        });
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_STREQ(e.what(), "job 7");
    }
}

TEST(Realizations, DoublingKeepsFirstHalf) {
    const LatticeSpec spec{Environment::FreeSpace1D, {15}, 0.2};
    ObservableRequest req;
    const auto first = run_realizations(spec, disorder_realizations(0.5, 0.0, 9, 10), req);
    const auto both = run_realizations(spec, disorder_realizations(0.5, 0.0, 9, 20), req);
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].slowest_rate, both[i].slowest_rate);
}

TEST(Population, NonInteractingGeometricMeanIsExponential) {
    // A lone atom has no partners, so every trajectory is identical.
    const LatticeSpec spec{Environment::FreeSpace1D, {1}, 0.3};
    const std::vector<double> times{0.0, 1.0, 2.5, 7.0};
    const auto ens = population_ensemble(spec, disorder_realizations(0.0, 0.0, 1, 6), times,
                                         InitialState::random_phase(), 2);
    for (std::size_t i = 0; i < times.size(); ++i)
        EXPECT_NEAR(ens.per_time[i].mean_geom, std::exp(-times[i]), 1e-12);
}

TEST(Sweep, OrderedLevelsRunOneRealization) {
    SweepSpec sweep;
    sweep.base = {Environment::FreeSpace1D, {10}, 0.3};
    sweep.values = {0.2, 0.3, 0.4};
    sweep.levels = {{0.0, 0.0}, {0.5, 0.0}};
    sweep.realizations = 5;
    sweep.seed = 3;
    const auto s = run_sweep(sweep);
    ASSERT_EQ(s.points.size(), 6u);
    EXPECT_EQ(s.points[0].stats.count, 1u);
    EXPECT_EQ(s.points[1].stats.count, 5u);
    for (const auto& p : s.points) {
        EXPECT_LE(p.stats.minimum, p.stats.mean_geom);
        EXPECT_LE(p.stats.mean_geom, p.stats.mean_arith);
        EXPECT_LE(p.stats.mean_arith, p.stats.maximum);
    }
}

TEST(Sweep, DisorderAxisOverridesLevel) {
    SweepSpec sweep;
    sweep.base = {Environment::HalfWaveguide, {10}, 0.15};
    sweep.axis = SweepAxis::DisorderStrength;
    sweep.values = {0.1, 0.5};
    sweep.realizations = 3;
    sweep.keep_raw = true;
    const auto s = run_sweep(sweep);
    EXPECT_EQ(s.points[1].rd_over_a, 0.5);
    EXPECT_EQ(s.points[1].raw.size(), 3u);
}

TEST(Sweep, SystemSizeAxis) {
    SweepSpec sweep;
    sweep.base = {Environment::FreeSpace2D, {2, 2}, 0.3};
    sweep.axis = SweepAxis::SystemSize;
    sweep.values = {2, 3};
    const auto s = run_sweep(sweep);
    EXPECT_EQ(s.points[1].n_atoms, 9u);
    sweep.values = {2.5};
    EXPECT_THROW(run_sweep(sweep), ValidationError);
}

TEST(Sweep, RejectsNonMonotoneValues) {
    SweepSpec sweep;
    sweep.values = {0.3, 0.2, 0.4};
    EXPECT_THROW(sweep.validate(), ValidationError);
}

TEST(Sweep, IprObservableAveragesSlowModes) {
    SweepSpec sweep;
    sweep.base = {Environment::FreeSpace1D, {8}, 0.3};
    sweep.values = {0.3};
    sweep.observable = SweepObservable::SlowModeIpr;
    sweep.slow_modes = 2;
    const auto s = run_sweep(sweep);
    const auto dec = decompose(build_hamiltonian(build_ordered(sweep.base)));
    EXPECT_NEAR(s.points[0].stats.mean_arith, slow_mode_ipr(dec, 2), 1e-14);
}

TEST(Scaling, SingleAtomRateIsBare) {
    const auto s = size_scaling_sweep(1, {1}, {0.2, 0.7});
    for (const auto& p : s.points) EXPECT_DOUBLE_EQ(p.stats.mean_arith, 1.0);
}

TEST(Scaling, SteepestDropLocatesLargestLogRise) {
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4};
    EXPECT_DOUBLE_EQ(steepest_drop(grid, {1e-3, 2e-3, 0.5, 0.6}), 0.25);
    EXPECT_THROW(steepest_drop(grid, {1.0}), ValidationError);
}

TEST(Grids, LogGridEndpoints) {
    const auto g = log_grid(0.1, 10.0, 5);
    EXPECT_DOUBLE_EQ(g.front(), 0.1);
    EXPECT_DOUBLE_EQ(g.back(), 10.0);
    EXPECT_NEAR(g[2], 1.0, 1e-14);
}
