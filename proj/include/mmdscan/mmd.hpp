#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mmdscan/intervals.hpp"
#include "mmdscan/kernels.hpp"

namespace mmdscan {

// Error-compensated accumulator (Neumaier variant of Kahan summation).
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Reference sequence (drawn from the background distribution) and the
// observed per-node sequence, same length.
struct SampleSeries {
    std::vector<double> reference;
    std::vector<double> observed;

    std::size_t size() const { return reference.size(); }
    void validate() const;
};

enum class SummaryMode { dense, streaming };

const char* summary_mode_name(SummaryMode mode);

class SlidingWindow;

// Precomputed kernel aggregates over a SampleSeries:
//   - the reference pair sum (all off-diagonal reference kernel values),
//   - prefix sums of the per-node cross-column sums c_j = sum_i k(x_i, y_j),
//   - in dense mode, a 2-D prefix table of observed pair values giving O(1)
//     interval pair sums; in streaming mode interval pair sums are computed
//     on demand (use window() for incremental access patterns).
// Immutable after construction; safe to share across threads.
class GramSummaries {
public:
    static constexpr std::size_t default_dense_limit = 8192;

    std::size_t size() const { return n_; }
    SummaryMode mode() const { return mode_; }
    const Kernel& kernel() const { return kernel_; }
    const std::vector<double>& observed() const { return observed_; }

    double reference_pair_sum() const { return reference_pair_sum_; }

    // sum over i in [0,n), j in I of k(x_i, y_j)
    double cross_sum(const Interval& interval) const;

    // sum over i != j, both in I, of k(y_i, y_j)
    double observed_pair_sum(const Interval& interval) const;

    // The per-interval discrepancy statistic; see interval_statistic.
    double statistic(const Interval& interval) const;

    SlidingWindow window() const;

private:
    friend GramSummaries build_summaries(const SampleSeries&, const Kernel&, SummaryMode,
                                         std::size_t, unsigned);

    GramSummaries(const Kernel& kernel) : kernel_(kernel) {}

    void check_interval(const Interval& interval) const;
    double dense_rectangle(std::size_t a, std::size_t b) const {
        return dense_[a * (n_ + 1) + b];
    }

    Kernel kernel_;
    SummaryMode mode_ = SummaryMode::dense;
    std::size_t n_ = 0;
    std::vector<double> observed_;
    double reference_pair_sum_ = 0.0;
    std::vector<double> cross_prefix_;  // n + 1 entries
    std::vector<double> dense_;         // (n+1)^2 entries in dense mode
};

// Builds the Gram aggregates. Dense mode allocates an (n+1)^2 table and is
// guarded by dense_limit; exceeding it is a capacity error suggesting
// streaming mode. threads = 0 picks the hardware concurrency; the result is
// identical for every worker count.
GramSummaries build_summaries(const SampleSeries& series, const Kernel& kernel,
                              SummaryMode mode,
                              std::size_t dense_limit = GramSummaries::default_dense_limit,
                              unsigned threads = 0);

// Unbiased squared-discrepancy statistic for the observed samples inside the
// interval against the full reference sequence:
//   S_ref / (n(n-1)) + S_obs(I) / (|I|(|I|-1)) - 2 S_cross(I) / (n |I|)
// where S_ref sums k over all off-diagonal reference pairs, S_obs(I) over
// off-diagonal observed pairs inside I, and S_cross(I) over all reference x
// observed-in-I pairs. May be negative.
double interval_statistic(const GramSummaries& summaries, const Interval& interval);

// Incremental accumulator over the observed sequence, supporting
// grow-by-one updates of the in-window pair sum.
class SlidingWindow {
public:
    explicit SlidingWindow(const GramSummaries& summaries)
        : summaries_(&summaries), start_(0), end_(0) {}

    void reset(std::size_t start);
    void grow();

    std::size_t start() const { return start_; }
    std::size_t end() const { return end_; }
    std::size_t length() const { return end_ - start_; }
    double pair_sum() const { return pair_sum_.value(); }

    // Statistic of the current window; requires length >= 2.
    double statistic() const;

private:
    const GramSummaries* summaries_;
    std::size_t start_;
    std::size_t end_;
    CompensatedSum pair_sum_;
};

// Unbiased estimate of the squared kernel discrepancy between two sample
// sets. Requires at least two samples on each side; the estimate may be
// negative and always lies in [-2K, 2K] for a kernel bounded by K.
double mmd2_unbiased(const std::vector<double>& x_samples, const std::vector<double>& y_samples,
                     const Kernel& kernel, unsigned threads = 0);

// Closed form of the population squared discrepancy between two normal
// distributions under the gaussian kernel, via
//   E k = sigma / sqrt(sigma^2 + v1 + v2) * exp(-(m1-m2)^2 / (2(sigma^2 + v1 + v2))).
double mmd2_population_gaussian(double mean1, double var1, double mean2, double var2,
                                double sigma);

struct GaussianComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 1.0;
};

// Mixture extension of the closed form, by linearity of the kernel mean.
double mmd2_population_gaussian(const std::vector<GaussianComponent>& p,
                                const std::vector<GaussianComponent>& q, double sigma);

}  // namespace mmdscan
