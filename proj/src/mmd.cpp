#include "mmdscan/mmd.hpp"

#include <cmath>
#include <string>

#include "mmdscan/errors.hpp"
#include "mmdscan/parallel.hpp"

namespace mmdscan {

namespace {

void require_finite(const std::vector<double>& values, const char* label) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::invalid_argument,
                  std::string(label) + " contains a non-finite value");
        }
    }
}

}  // namespace

void SampleSeries::validate() const {
    if (reference.size() != observed.size()) {
        raise(ErrorCode::invalid_argument,
              "reference and observed sequences must have identical length");
    }
    if (reference.size() < 2) {
        raise(ErrorCode::insufficient_samples, "a series needs at least two nodes");
    }
    require_finite(reference, "reference sequence");
    require_finite(observed, "observed sequence");
}

const char* summary_mode_name(SummaryMode mode) {
    return mode == SummaryMode::dense ? "dense" : "streaming";
}

GramSummaries build_summaries(const SampleSeries& series, const Kernel& kernel,
                              SummaryMode mode, std::size_t dense_limit, unsigned threads) {
    series.validate();
    const std::size_t n = series.size();
    if (mode == SummaryMode::dense && n > dense_limit) {
        raise(ErrorCode::capacity,
              "dense summaries need an (n+1)^2 table and n = " + std::to_string(n) +
                  " exceeds the limit of " + std::to_string(dense_limit) +
                  "; use streaming mode");
    }

    GramSummaries out(kernel);
    out.mode_ = mode;
    out.n_ = n;
    out.observed_ = series.observed;

    const std::vector<double>& x = series.reference;
    const std::vector<double>& y = series.observed;

    // Upper-triangle row sums of the reference Gram matrix, combined in row
    // order so the result does not depend on the worker count.
    std::vector<double> row_sums(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        CompensatedSum row;
        for (std::size_t j = i + 1; j < n; ++j) {
            row.add(kernel.evaluate_unchecked(x[i], x[j]));
        }
        row_sums[i] = row.value();
    });
    CompensatedSum ref_total;
    for (std::size_t i = 0; i < n; ++i) ref_total.add(row_sums[i]);
    out.reference_pair_sum_ = 2.0 * ref_total.value();

    // Cross-column sums c_j = sum_i k(x_i, y_j), then their prefix sums.
    std::vector<double> columns(n, 0.0);
    parallel_for(n, threads, [&](std::size_t j) {
        CompensatedSum column;
        for (std::size_t i = 0; i < n; ++i) {
            column.add(kernel.evaluate_unchecked(x[i], y[j]));
        }
        columns[j] = column.value();
    });
    out.cross_prefix_.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        out.cross_prefix_[j + 1] = out.cross_prefix_[j] + columns[j];
    }

    if (mode == SummaryMode::dense) {
        // P[a][b] = sum over i < a, j < b of k(y_i, y_j). Row a first gets the
        // row-local prefix sums, then rows are accumulated top to bottom.
        const std::size_t stride = n + 1;
        out.dense_.assign(stride * stride, 0.0);
        parallel_for(n, threads, [&](std::size_t row) {
            double* dst = out.dense_.data() + (row + 1) * stride;
            CompensatedSum running;
            for (std::size_t j = 0; j < n; ++j) {
                running.add(kernel.evaluate_unchecked(y[row], y[j]));
                dst[j + 1] = running.value();
            }
        });
        for (std::size_t a = 1; a <= n; ++a) {
            double* cur = out.dense_.data() + a * stride;
            const double* prev = out.dense_.data() + (a - 1) * stride;
            for (std::size_t b = 1; b <= n; ++b) cur[b] += prev[b];
        }
    }
    return out;
}

void GramSummaries::check_interval(const Interval& interval) const {
    if (interval.end() > n_ || interval.end() < interval.start) {
        raise(ErrorCode::bounds, "interval exceeds the network range");
    }
    if (interval.length < 2) {
        raise(ErrorCode::insufficient_samples,
              "interval statistic needs at least two samples");
    }
}

double GramSummaries::cross_sum(const Interval& interval) const {
    check_interval(interval);
    return cross_prefix_[interval.end()] - cross_prefix_[interval.start];
}

double GramSummaries::observed_pair_sum(const Interval& interval) const {
    check_interval(interval);
    const std::size_t s = interval.start;
    const std::size_t e = interval.end();
    if (mode_ == SummaryMode::dense) {
        const double rect = dense_rectangle(e, e) - dense_rectangle(s, e) -
                            dense_rectangle(e, s) + dense_rectangle(s, s);
        return rect - static_cast<double>(interval.length) * kernel_.bound();
    }
    CompensatedSum sum;
    for (std::size_t i = s; i < e; ++i) {
        for (std::size_t j = i + 1; j < e; ++j) {
            sum.add(kernel_.evaluate_unchecked(observed_[i], observed_[j]));
        }
    }
    return 2.0 * sum.value();
}

double GramSummaries::statistic(const Interval& interval) const {
    check_interval(interval);
    const double n = static_cast<double>(n_);
    const double m = static_cast<double>(interval.length);
    const double ref = reference_pair_sum_ / (n * (n - 1.0));
    const double obs = observed_pair_sum(interval) / (m * (m - 1.0));
    const double cross = 2.0 * cross_sum(interval) / (n * m);
    return ref + obs - cross;
}

SlidingWindow GramSummaries::window() const { return SlidingWindow(*this); }

double interval_statistic(const GramSummaries& summaries, const Interval& interval) {
    return summaries.statistic(interval);
}

void SlidingWindow::reset(std::size_t start) {
    if (start >= summaries_->size()) {
        raise(ErrorCode::bounds, "window start beyond the network range");
    }
    start_ = start;
    end_ = start;
    pair_sum_ = CompensatedSum();
}

void SlidingWindow::grow() {
    if (end_ >= summaries_->size()) {
        raise(ErrorCode::bounds, "window cannot grow past the network range");
    }
    const std::vector<double>& y = summaries_->observed();
    const Kernel& kernel = summaries_->kernel();
    CompensatedSum added;
    for (std::size_t j = start_; j < end_; ++j) {
        added.add(kernel.evaluate_unchecked(y[j], y[end_]));
    }
    pair_sum_.add(2.0 * added.value());
    ++end_;
}

double SlidingWindow::statistic() const {
    if (length() < 2) {
        raise(ErrorCode::insufficient_samples,
              "window statistic needs at least two samples");
    }
    const double n = static_cast<double>(summaries_->size());
    const double m = static_cast<double>(length());
    const double ref = summaries_->reference_pair_sum() / (n * (n - 1.0));
    const double obs = pair_sum_.value() / (m * (m - 1.0));
    const double cross =
        2.0 * summaries_->cross_sum(Interval{start_, length()}) / (n * m);
    return ref + obs - cross;
}

double mmd2_unbiased(const std::vector<double>& x_samples,
                     const std::vector<double>& y_samples, const Kernel& kernel,
                     unsigned threads) {
    if (x_samples.size() < 2 || y_samples.size() < 2) {
        raise(ErrorCode::insufficient_samples,
              "the unbiased estimate needs at least two samples on each side");
    }
    require_finite(x_samples, "first sample set");
    require_finite(y_samples, "second sample set");

    const std::size_t n = x_samples.size();
    const std::size_t m = y_samples.size();

    auto self_pair_sum = [&](const std::vector<double>& v) {
        std::vector<double> rows(v.size(), 0.0);
        parallel_for(v.size(), threads, [&](std::size_t i) {
            CompensatedSum row;
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                row.add(kernel.evaluate_unchecked(v[i], v[j]));
            }
            rows[i] = row.value();
        });
        CompensatedSum total;
        for (double r : rows) total.add(r);
        return 2.0 * total.value();
    };

    const double xx = self_pair_sum(x_samples);
    const double yy = self_pair_sum(y_samples);

    std::vector<double> cross_rows(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        CompensatedSum row;
        for (std::size_t j = 0; j < m; ++j) {
            row.add(kernel.evaluate_unchecked(x_samples[i], y_samples[j]));
        }
        cross_rows[i] = row.value();
    });
    CompensatedSum cross_total;
    for (double r : cross_rows) cross_total.add(r);
    const double xy = cross_total.value();

    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return xx / (dn * (dn - 1.0)) + yy / (dm * (dm - 1.0)) - 2.0 * xy / (dn * dm);
}

namespace {

double gaussian_pair_expectation(double mean1, double var1, double mean2, double var2,
                                 double sigma) {
    const double denom = sigma * sigma + var1 + var2;
    const double diff = mean1 - mean2;
    return sigma / std::sqrt(denom) * std::exp(-(diff * diff) / (2.0 * denom));
}

void validate_component_list(const std::vector<GaussianComponent>& components,
                             const char* label) {
    if (components.empty()) {
        raise(ErrorCode::invalid_argument, std::string(label) + " mixture is empty");
    }
    double weight_sum = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            raise(ErrorCode::invalid_argument,
                  std::string(label) + " mixture weights must be positive");
        }
        if (c.variance < 0.0 || !std::isfinite(c.variance) || !std::isfinite(c.mean)) {
            raise(ErrorCode::invalid_argument,
                  std::string(label) + " mixture components must have finite mean and variance >= 0");
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        raise(ErrorCode::invalid_argument,
              std::string(label) + " mixture weights must sum to 1");
    }
}

double mixture_cross_expectation(const std::vector<GaussianComponent>& a,
                                 const std::vector<GaussianComponent>& b, double sigma) {
    CompensatedSum sum;
    for (const auto& ca : a) {
        for (const auto& cb : b) {
            sum.add(ca.weight * cb.weight *
                    gaussian_pair_expectation(ca.mean, ca.variance, cb.mean, cb.variance, sigma));
        }
    }
    return sum.value();
}

}  // namespace

double mmd2_population_gaussian(double mean1, double var1, double mean2, double var2,
                                double sigma) {
    if (var1 < 0.0 || var2 < 0.0) {
        raise(ErrorCode::invalid_argument, "variances must be non-negative");
    }
    if (!(sigma > 0.0)) {
        raise(ErrorCode::invalid_argument, "kernel bandwidth must be positive");
    }
    return gaussian_pair_expectation(mean1, var1, mean1, var1, sigma) -
           2.0 * gaussian_pair_expectation(mean1, var1, mean2, var2, sigma) +
           gaussian_pair_expectation(mean2, var2, mean2, var2, sigma);
}

double mmd2_population_gaussian(const std::vector<GaussianComponent>& p,
                                const std::vector<GaussianComponent>& q, double sigma) {
    if (!(sigma > 0.0)) {
        raise(ErrorCode::invalid_argument, "kernel bandwidth must be positive");
    }
    validate_component_list(p, "first");
    validate_component_list(q, "second");
    return mixture_cross_expectation(p, p, sigma) -
           2.0 * mixture_cross_expectation(p, q, sigma) +
           mixture_cross_expectation(q, q, sigma);
}

}  // namespace mmdscan
