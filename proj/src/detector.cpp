#include "mmdscan/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mmdscan/errors.hpp"

namespace mmdscan {

const char* algorithm_kind_name(AlgorithmKind kind) {
    return kind == AlgorithmKind::exhaustive ? "exhaustive" : "multiscale";
}

AlgorithmKind algorithm_kind_from_name(const std::string& name) {
    if (name == "exhaustive") return AlgorithmKind::exhaustive;
    if (name == "multiscale") return AlgorithmKind::multiscale;
    raise(ErrorCode::invalid_argument,
          "unknown algorithm '" + name + "' (expected exhaustive or multiscale)");
}

const char* decision_name(Decision decision) {
    return decision == Decision::h0 ? "H0" : "H1";
}

const char* trigger_name(Trigger trigger) {
    switch (trigger) {
        case Trigger::none: return "none";
        case Trigger::cardinality: return "cardinality";
        case Trigger::prescan_max: return "prescan_max";
        case Trigger::extension_max: return "extension_max";
        case Trigger::exhaustive_max: return "exhaustive_max";
    }
    return "unknown";
}

double threshold_known(double mmd2, double delta) {
    if (!(mmd2 > 0.0) || !std::isfinite(mmd2)) {
        raise(ErrorCode::invalid_argument, "known discrepancy must be positive");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        raise(ErrorCode::invalid_argument, "delta must lie strictly between 0 and 1");
    }
    return (1.0 - delta) * mmd2;
}

double threshold_decaying(std::size_t n) {
    if (n < 2) {
        raise(ErrorCode::invalid_argument, "decaying threshold needs n >= 2");
    }
    const double dn = static_cast<double>(n);
    return 4.0 * std::sqrt(std::log(dn) / std::pow(dn, 0.9));
}

std::size_t i_min_bound(double kernel_bound, double threshold, double eta, std::size_t n) {
    if (!(kernel_bound > 0.0) || !(eta > 0.0)) {
        raise(ErrorCode::invalid_argument, "kernel bound and eta must be positive");
    }
    if (!(threshold > 0.0)) {
        raise(ErrorCode::invalid_argument, "threshold must be positive");
    }
    if (n < 2) {
        raise(ErrorCode::invalid_argument, "length bound needs n >= 2");
    }
    const double value = 16.0 * kernel_bound * kernel_bound * (1.0 + eta) *
                         std::log(static_cast<double>(n)) / (threshold * threshold);
    return static_cast<std::size_t>(std::ceil(value));
}

double TestConfig::resolved_threshold(std::size_t n) const {
    switch (threshold_mode) {
        case ThresholdMode::fixed:
            if (!(threshold > 0.0) || !std::isfinite(threshold)) {
                raise(ErrorCode::invalid_argument, "fixed threshold must be positive and finite");
            }
            return threshold;
        case ThresholdMode::known_mmd:
            return threshold_known(known_mmd2, known_delta);
        case ThresholdMode::decaying:
            return threshold_decaying(n);
    }
    raise(ErrorCode::internal, "unhandled threshold mode");
}

double TestConfig::resolved_t_prime(std::size_t n) const {
    const double t = resolved_threshold(n);
    const double tp = t_prime.value_or(t / 2.0);
    if (!(tp > 0.0) || !(tp < t)) {
        raise(ErrorCode::invalid_argument,
              "pre-scan threshold must satisfy 0 < t' < t");
    }
    return tp;
}

double TestConfig::resolved_delta_alg() const {
    const double d = delta_alg.value_or(eta);
    if (!(d > eta / 2.0)) {
        raise(ErrorCode::invalid_argument, "cardinality slack must exceed eta / 2");
    }
    return d;
}

int TestConfig::resolved_levels() const {
    if (levels.has_value()) {
        if (*levels < 1) {
            raise(ErrorCode::invalid_argument, "extension level must be >= 1");
        }
        return *levels;
    }
    return static_cast<int>(std::ceil(std::log2((1.0 + eta) / eta) + 2.0));
}

namespace {

struct BestTracker {
    bool has_value = false;
    Interval interval{0, 0};
    double statistic = 0.0;

    void offer(const Interval& candidate, double value) {
        if (!has_value || value > statistic ||
            (value == statistic && IntervalLengthStartLess{}(candidate, interval))) {
            has_value = true;
            interval = candidate;
            statistic = value;
        }
    }
};

void validate_common(const TestConfig& config, std::size_t n) {
    if (config.i_min < 2) {
        raise(ErrorCode::invalid_argument,
              "minimum candidate length must be >= 2 (the statistic needs two samples)");
    }
    if (config.i_min > n) {
        raise(ErrorCode::invalid_argument,
              "minimum candidate length exceeds the network size");
    }
    if (!(config.eta > 0.0)) {
        raise(ErrorCode::invalid_argument, "eta must be positive");
    }
}

SummaryMode pick_mode(const TestConfig& config, std::size_t n) {
    if (config.summary_mode.has_value()) return *config.summary_mode;
    if (config.algorithm == AlgorithmKind::exhaustive && n <= config.dense_limit) {
        return SummaryMode::dense;
    }
    return SummaryMode::streaming;
}

ScanOutcome finish(const BestTracker& best, Decision decision, Trigger trigger,
                   std::uint64_t evaluations, double threshold) {
    ScanOutcome out;
    out.decision = decision;
    out.trigger = trigger;
    out.evaluations = evaluations;
    out.threshold = threshold;
    out.best_statistic = best.statistic;
    if (best.has_value) out.best_interval = best.interval;
    return out;
}

}  // namespace

ScanOutcome scan_exhaustive(const SampleSeries& series, const Kernel& kernel,
                            const TestConfig& config, const StatisticObserver& observer) {
    const std::size_t n = series.size();
    validate_common(config, n);
    const double t = config.resolved_threshold(n);
    const SummaryMode mode = pick_mode(config, n);
    const GramSummaries summaries =
        build_summaries(series, kernel, mode, config.dense_limit, config.threads);

    BestTracker best;
    std::uint64_t evaluations = 0;

    if (mode == SummaryMode::dense) {
        for (const Interval interval : candidate_intervals(n, config.i_min)) {
            const double value = summaries.statistic(interval);
            ++evaluations;
            if (observer) observer(interval, value);
            best.offer(interval, value);
        }
    } else {
        // Grow-by-one windows share work across the lengths of one start.
        for (std::size_t start = 0; start + config.i_min <= n; ++start) {
            SlidingWindow window = summaries.window();
            window.reset(start);
            while (window.length() < config.i_min - 1) window.grow();
            while (window.end() < n) {
                window.grow();
                const double value = window.statistic();
                ++evaluations;
                const Interval interval{start, window.length()};
                if (observer) observer(interval, value);
                best.offer(interval, value);
            }
        }
    }

    const bool alarm = best.has_value && best.statistic >= t;
    return finish(best, alarm ? Decision::h1 : Decision::h0,
                  alarm ? Trigger::exhaustive_max : Trigger::none, evaluations, t);
}

ScanOutcome scan_multiscale(const SampleSeries& series, const Kernel& kernel,
                            const TestConfig& config, const StatisticObserver& observer) {
    const std::size_t n = series.size();
    validate_common(config, n);
    const double t = config.resolved_threshold(n);
    const double t_prime = config.resolved_t_prime(n);
    const double delta = config.resolved_delta_alg();
    const int levels = config.resolved_levels();
    const double eta = config.eta;

    const SummaryMode mode = pick_mode(config, n);
    const GramSummaries summaries =
        build_summaries(series, kernel, mode, config.dense_limit, config.threads);

    const DyadicGrid grid(n);
    const std::size_t prescan_min_length =
        std::max<std::size_t>((config.i_min + 3) / 4, 2);

    BestTracker best;
    std::uint64_t evaluations = 0;

    // Step 1: pre-scan the dyadic blocks.
    std::vector<Interval> survivors;
    double prescan_max = 0.0;
    bool prescan_any = false;
    for (std::size_t j = 0; j < grid.level_count(); ++j) {
        for (const Interval& block : grid.level(j)) {
            if (block.length < prescan_min_length) continue;
            const double value = summaries.statistic(block);
            ++evaluations;
            if (observer) observer(block, value);
            best.offer(block, value);
            if (!prescan_any || value > prescan_max) prescan_max = value;
            prescan_any = true;
            if (value >= t_prime) survivors.push_back(block);
        }
    }

    // Step 2: an implausibly large surviving set is itself an alarm.
    const double exponent =
        1.0 - (t_prime * t_prime) / (4.0 * t * t) * (1.0 + eta) + delta;
    const double cardinality_cap = std::pow(static_cast<double>(n), exponent);
    if (static_cast<double>(survivors.size()) > cardinality_cap) {
        return finish(best, Decision::h1, Trigger::cardinality, evaluations, t);
    }

    // Step 3: pre-scan max trigger.
    const double prescan_trigger = 2.0 * t / std::sqrt(1.0 + eta / 2.0);
    if (prescan_any && prescan_max > prescan_trigger) {
        return finish(best, Decision::h1, Trigger::prescan_max, evaluations, t);
    }

    // Step 4: extend the survivors that are long enough to matter.
    const double length_filter = 16.0 * kernel.bound() * kernel.bound() * (1.0 + eta / 2.0) *
                                 std::log(static_cast<double>(n)) / (t * t);
    std::vector<Interval> family;
    for (const Interval& block : survivors) {
        if (static_cast<double>(block.length) <= length_filter) continue;
        const ExtensionSet set = extensions(block, levels, grid);
        family.insert(family.end(), set.members().begin(), set.members().end());
    }
    std::sort(family.begin(), family.end(), IntervalLengthStartLess{});
    family.erase(std::unique(family.begin(), family.end()), family.end());

    // Step 5: final max over the extension family.
    double family_max = 0.0;
    bool family_any = false;
    for (const Interval& interval : family) {
        const double value = summaries.statistic(interval);
        ++evaluations;
        if (observer) observer(interval, value);
        best.offer(interval, value);
        if (!family_any || value > family_max) family_max = value;
        family_any = true;
    }
    if (family_any && family_max > t) {
        return finish(best, Decision::h1, Trigger::extension_max, evaluations, t);
    }
    return finish(best, Decision::h0, Trigger::none, evaluations, t);
}

ScanOutcome scan(const SampleSeries& series, const Kernel& kernel, const TestConfig& config,
                 const StatisticObserver& observer) {
    return config.algorithm == AlgorithmKind::exhaustive
               ? scan_exhaustive(series, kernel, config, observer)
               : scan_multiscale(series, kernel, config, observer);
}

}  // namespace mmdscan
