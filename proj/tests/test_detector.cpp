#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "mmdscan/detector.hpp"
#include "mmdscan/errors.hpp"
#include "mmdscan/experiments.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using mmdscan::AlgorithmKind;
using mmdscan::Decision;
using mmdscan::DistributionSpec;
using mmdscan::ErrorCode;
using mmdscan::Interval;
using mmdscan::Kernel;
using mmdscan::SampleSeries;
using mmdscan::ScanOutcome;
using mmdscan::SummaryMode;
using mmdscan::TestConfig;
using mmdscan::Trigger;

namespace {

SampleSeries constant_series(std::size_t n, double value) {
    SampleSeries series;
    series.reference.assign(n, value);
    series.observed.assign(n, value);
    return series;
}

TestConfig fixed_config(std::size_t i_min, double t, AlgorithmKind algorithm) {
    TestConfig config;
    config.i_min = i_min;
    config.threshold_mode = mmdscan::ThresholdMode::fixed;
    config.threshold = t;
    config.algorithm = algorithm;
    return config;
}

DistributionSpec test1_background() { return DistributionSpec::gaussian(0.0, 0.5); }

DistributionSpec test1_anomaly() {
    return DistributionSpec::gaussian_mixture(
        {{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}});
}

}  // namespace

TEST_CASE("known-discrepancy threshold") {
    CHECK(mmdscan::threshold_known(0.4, 0.5) == doctest::Approx(0.2));
    CHECK(mmdscan::threshold_known(0.17716, 0.25) == doctest::Approx(0.13287));
    CHECK(mmdscan::threshold_known(1.0, 0.999) == doctest::Approx(0.001));
    CHECK(testutil::error_code_of([] { mmdscan::threshold_known(0.0, 0.5); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([] { mmdscan::threshold_known(0.4, 1.0); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("decaying threshold schedule") {
    const double t100 = mmdscan::threshold_decaying(100);
    CHECK(t100 == doctest::Approx(4.0 * std::sqrt(std::log(100.0) / std::pow(100.0, 0.9)))
                      .epsilon(1e-12));
    CHECK(t100 == doctest::Approx(1.0806456).epsilon(1e-6));

    // Strictly decreasing from n = 8 on.
    double previous = mmdscan::threshold_decaying(8);
    for (std::size_t n = 9; n <= 4096; ++n) {
        const double current = mmdscan::threshold_decaying(n);
        CHECK(current < previous);
        previous = current;
    }
    for (std::size_t n = 4096; n <= 1000000; n *= 2) {
        CHECK(mmdscan::threshold_decaying(2 * n) < mmdscan::threshold_decaying(n));
    }
    CHECK(mmdscan::threshold_decaying(1000000) < 0.05);
}

TEST_CASE("minimum-length bound") {
    CHECK(mmdscan::i_min_bound(1.0, 0.25, 0.1, 500) == 1751);

    // Doubling the threshold quarters the bound, up to the ceiling.
    for (double t : {0.2, 0.5, 1.0}) {
        const auto coarse = mmdscan::i_min_bound(1.0, 2.0 * t, 0.3, 1000);
        const auto fine = mmdscan::i_min_bound(1.0, t, 0.3, 1000);
        CHECK(std::llabs(static_cast<long long>(4 * coarse) -
                         static_cast<long long>(fine)) <= 4);
    }
    CHECK(testutil::error_code_of([] { mmdscan::i_min_bound(1.0, 0.0, 0.1, 100); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("exhaustive scan on constant data accepts the null") {
    const Kernel k = Kernel::gaussian(1.0);
    const ScanOutcome outcome =
        scan_exhaustive(constant_series(16, 1.5), k, fixed_config(4, 0.25, AlgorithmKind::exhaustive));
    CHECK(outcome.decision == Decision::h0);
    CHECK(outcome.trigger == Trigger::none);
    CHECK(outcome.best_statistic == doctest::Approx(0.0));
    CHECK(outcome.evaluations == mmdscan::candidate_intervals(16, 4).count());
}

TEST_CASE("single-candidate scan") {
    std::mt19937_64 rng(67);
    SampleSeries series;
    series.reference = testutil::random_vector(rng, 8);
    series.observed = testutil::random_vector(rng, 8);
    const Kernel k = Kernel::gaussian(1.0);
    const ScanOutcome outcome =
        scan_exhaustive(series, k, fixed_config(8, 0.25, AlgorithmKind::exhaustive));
    CHECK(outcome.evaluations == 1);
    CHECK(outcome.best_interval == Interval{0, 8});
    CHECK((outcome.decision == Decision::h1) == (outcome.best_statistic >= 0.25));
}

TEST_CASE("exhaustive scan reports the argmax with deterministic tie-breaks") {
    std::mt19937_64 rng(71);
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t n = 12 + static_cast<std::size_t>(rng() % 53);
        SampleSeries series;
        series.reference = testutil::random_vector(rng, n);
        series.observed = testutil::random_vector(rng, n);
        const Kernel k = rep % 2 == 0 ? Kernel::gaussian(1.0) : Kernel::laplace(1.0);
        const TestConfig config = fixed_config(3, 0.25, AlgorithmKind::exhaustive);
        const ScanOutcome outcome = scan_exhaustive(series, k, config);

        double best = -10.0;
        Interval best_interval{0, 0};
        for (const Interval interval : mmdscan::candidate_intervals(n, 3)) {
            const double value = oracle::naive_interval_statistic(series.reference,
                                                                  series.observed, interval, k);
            if (value > best + 1e-12) {
                best = value;
                best_interval = interval;
            }
        }
        CHECK(outcome.best_statistic == doctest::Approx(best).epsilon(1e-9));
        CHECK(outcome.best_interval == best_interval);
    }
}

TEST_CASE("exhaustive scan agrees across summary modes") {
    std::mt19937_64 rng(73);
    SampleSeries series;
    series.reference = testutil::random_vector(rng, 48);
    series.observed = testutil::random_vector(rng, 48);
    const Kernel k = Kernel::gaussian(1.0);

    TestConfig config = fixed_config(4, 0.3, AlgorithmKind::exhaustive);
    config.summary_mode = SummaryMode::dense;
    const ScanOutcome dense = scan_exhaustive(series, k, config);
    config.summary_mode = SummaryMode::streaming;
    const ScanOutcome streaming = scan_exhaustive(series, k, config);

    CHECK(dense.decision == streaming.decision);
    CHECK(dense.best_interval == streaming.best_interval);
    CHECK(dense.evaluations == streaming.evaluations);
    CHECK(dense.best_statistic == doctest::Approx(streaming.best_statistic).epsilon(1e-9));
}

TEST_CASE("decision is monotone in the threshold") {
    std::mt19937_64 rng(79);
    SampleSeries series;
    series.reference = testutil::random_vector(rng, 32);
    series.observed = testutil::random_vector(rng, 32);
    const Kernel k = Kernel::gaussian(1.0);

    Decision previous = Decision::h1;
    for (double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const ScanOutcome outcome =
            scan_exhaustive(series, k, fixed_config(4, t, AlgorithmKind::exhaustive));
        if (outcome.decision == Decision::h1) {
            CHECK(previous == Decision::h1);
        }
        previous = outcome.decision;
    }
}

TEST_CASE("scan validates the candidate length") {
    const Kernel k = Kernel::gaussian(1.0);
    CHECK(testutil::error_code_of([&] {
              scan_exhaustive(constant_series(8, 0.0), k,
                              fixed_config(9, 0.25, AlgorithmKind::exhaustive));
          }) == static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([&] {
              scan_exhaustive(constant_series(8, 0.0), k,
                              fixed_config(1, 0.25, AlgorithmKind::exhaustive));
          }) == static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("multiscale scan on constant data accepts the null") {
    const Kernel k = Kernel::gaussian(1.0);
    const ScanOutcome outcome = scan_multiscale(constant_series(64, -2.0), k,
                                                fixed_config(8, 0.25, AlgorithmKind::multiscale));
    CHECK(outcome.decision == Decision::h0);
    CHECK(outcome.trigger == Trigger::none);
}

TEST_CASE("multiscale scan evaluates only known interval shapes") {
    const std::size_t n = 128;
    const auto series = mmdscan::plant_instance(test1_background(), test1_anomaly(), n,
                                                Interval{40, 48}, 12345);
    const Kernel k = Kernel::gaussian(1.0);

    TestConfig config = fixed_config(16, 0.25, AlgorithmKind::multiscale);
    config.eta = 4.0;

    // Universe: dyadic blocks and every extension member of any block.
    const mmdscan::DyadicGrid grid(n);
    std::set<Interval> universe;
    for (const Interval& block : grid.all()) universe.insert(block);
    for (const Interval& block : grid.all()) {
        const auto set = mmdscan::extensions(block, config.resolved_levels(), grid);
        universe.insert(set.members().begin(), set.members().end());
    }

    std::uint64_t observed_evaluations = 0;
    const ScanOutcome outcome = scan_multiscale(
        series, k, config, [&](const Interval& interval, double value) {
            ++observed_evaluations;
            CHECK(universe.count(interval) == 1);
            CHECK(interval.end() <= n);
            CHECK(interval.length >= 2);
            CHECK(value >= -2.0);
            CHECK(value <= 2.0);
        });
    CHECK(outcome.evaluations == observed_evaluations);
    CHECK(outcome.decision == mmdscan::Decision::h1);
}

TEST_CASE("multiscale scan detects a planted block and is cheaper than exhaustive") {
    const std::size_t n = 256;
    const auto series = mmdscan::plant_instance(test1_background(), test1_anomaly(), n,
                                                Interval{77, 96}, 777);
    const Kernel k = Kernel::gaussian(1.0);

    TestConfig config = fixed_config(32, 0.25, AlgorithmKind::multiscale);
    config.eta = 4.0;
    const ScanOutcome multiscale = scan_multiscale(series, k, config);
    CHECK(multiscale.decision == Decision::h1);
    CHECK(multiscale.trigger != Trigger::none);

    const ScanOutcome exhaustive =
        scan_exhaustive(series, k, fixed_config(32, 0.25, AlgorithmKind::exhaustive));
    CHECK(exhaustive.decision == Decision::h1);
    CHECK(exhaustive.evaluations == mmdscan::candidate_intervals(n, 32).count());
    CHECK(multiscale.evaluations < exhaustive.evaluations);
}

TEST_CASE("multiscale parameter validation") {
    const Kernel k = Kernel::gaussian(1.0);
    TestConfig config = fixed_config(8, 0.25, AlgorithmKind::multiscale);
    config.t_prime = 0.3;  // must stay below t
    CHECK(testutil::error_code_of([&] {
              scan_multiscale(constant_series(32, 0.0), k, config);
          }) == static_cast<int>(ErrorCode::invalid_argument));

    config = fixed_config(8, 0.25, AlgorithmKind::multiscale);
    config.eta = 1.0;
    config.delta_alg = 0.4;  // must exceed eta / 2
    CHECK(testutil::error_code_of([&] {
              scan_multiscale(constant_series(32, 0.0), k, config);
          }) == static_cast<int>(ErrorCode::invalid_argument));

    config = fixed_config(8, 0.25, AlgorithmKind::multiscale);
    CHECK(config.resolved_levels() == 3);  // eta = 1: ceil(log2(2) + 2)
    config.eta = 0.5;
    CHECK(config.resolved_levels() == 4);  // ceil(log2(3) + 2)
}

TEST_CASE("scan outcomes are deterministic") {
    const auto series = mmdscan::plant_instance(test1_background(), test1_anomaly(), 128,
                                                Interval{30, 40}, 999);
    const Kernel k = Kernel::gaussian(1.0);
    for (AlgorithmKind algorithm :
         {AlgorithmKind::exhaustive, AlgorithmKind::multiscale}) {
        TestConfig config = fixed_config(16, 0.25, algorithm);
        config.threads = 1;
        const ScanOutcome a = scan(series, k, config);
        config.threads = 5;
        const ScanOutcome b = scan(series, k, config);
        CHECK(a.decision == b.decision);
        CHECK(a.best_interval == b.best_interval);
        CHECK(a.best_statistic == b.best_statistic);  // bitwise
        CHECK(a.evaluations == b.evaluations);
        CHECK(a.trigger == b.trigger);
    }
}

TEST_CASE("outcome decision and trigger are consistent") {
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 10; ++rep) {
        SampleSeries series;
        series.reference = testutil::random_vector(rng, 64);
        series.observed = testutil::random_vector(rng, 64);
        const Kernel k = Kernel::gaussian(1.0);
        for (AlgorithmKind algorithm :
             {AlgorithmKind::exhaustive, AlgorithmKind::multiscale}) {
            const ScanOutcome outcome =
                scan(series, k, fixed_config(8, 0.2, algorithm));
            CHECK((outcome.decision == Decision::h1) == (outcome.trigger != Trigger::none));
        }
    }
}
