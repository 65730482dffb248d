#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mmdscan/intervals.hpp"
#include "mmdscan/kernels.hpp"
#include "mmdscan/mmd.hpp"

namespace mmdscan {

enum class AlgorithmKind { exhaustive, multiscale };
enum class ThresholdMode { fixed, known_mmd, decaying };
enum class Decision { h0, h1 };
enum class Trigger { none, cardinality, prescan_max, extension_max, exhaustive_max };

const char* algorithm_kind_name(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_name(const std::string& name);
const char* decision_name(Decision decision);
const char* trigger_name(Trigger trigger);

// Threshold for the regime where the population discrepancy is known:
// t = (1 - delta) * mmd2, 0 < delta < 1.
double threshold_known(double mmd2, double delta);

// Built-in decaying schedule for the unknown-discrepancy regime:
// t_n = 4 * sqrt(ln n / n^0.9), which tends to zero as n grows.
double threshold_decaying(std::size_t n);

// Minimum candidate length sufficient for an asymptotically successful test
// with a kernel bounded by K and test threshold t:
// ceil(16 K^2 (1 + eta) ln n / t^2). Natural log throughout.
std::size_t i_min_bound(double kernel_bound, double threshold, double eta, std::size_t n);

struct TestConfig {
    std::size_t i_min = 2;

    ThresholdMode threshold_mode = ThresholdMode::fixed;
    double threshold = 0.0;    // fixed mode
    double known_mmd2 = 0.0;   // known_mmd mode
    double known_delta = 0.0;  // known_mmd mode

    double eta = 1.0;

    AlgorithmKind algorithm = AlgorithmKind::exhaustive;
    // Multiscale knobs; unset values fall back to t/2, eta and
    // ceil(log2((1 + eta)/eta) + 2) respectively.
    std::optional<double> t_prime;
    std::optional<double> delta_alg;
    std::optional<int> levels;

    // Backend knobs. Unset summary mode picks dense for exhaustive scans that
    // fit the dense limit and streaming otherwise.
    std::optional<SummaryMode> summary_mode;
    std::size_t dense_limit = GramSummaries::default_dense_limit;
    unsigned threads = 0;

    double resolved_threshold(std::size_t n) const;
    double resolved_t_prime(std::size_t n) const;
    double resolved_delta_alg() const;
    int resolved_levels() const;
};

struct ScanOutcome {
    Decision decision = Decision::h0;
    std::optional<Interval> best_interval;
    double best_statistic = 0.0;
    std::uint64_t evaluations = 0;
    Trigger trigger = Trigger::none;
    double threshold = 0.0;  // resolved test threshold
};

// Test-support hook: receives every evaluated interval and its statistic in
// evaluation order.
using StatisticObserver = std::function<void(const Interval&, double)>;

// Max-over-candidates test: computes the statistic for every interval of
// length >= i_min and reports H1 when the maximum reaches the threshold.
// The reported interval is the argmax, ties broken by shorter length then
// smaller start; evaluations equals the candidate count.
ScanOutcome scan_exhaustive(const SampleSeries& series, const Kernel& kernel,
                            const TestConfig& config,
                            const StatisticObserver& observer = nullptr);

// Multiscale test over dyadic blocks and their extensions, in five steps:
// pre-scan of all dyadic blocks of length >= i_min/4 against t', a
// cardinality trigger on the surviving set, a pre-scan max trigger at
// 2t/sqrt(1 + eta/2), construction of level-l extensions of the long
// survivors, and a final max trigger at t. Short-circuits at the first
// trigger; evaluations counts pre-scan plus extension statistics.
ScanOutcome scan_multiscale(const SampleSeries& series, const Kernel& kernel,
                            const TestConfig& config,
                            const StatisticObserver& observer = nullptr);

ScanOutcome scan(const SampleSeries& series, const Kernel& kernel, const TestConfig& config,
                 const StatisticObserver& observer = nullptr);

}  // namespace mmdscan
