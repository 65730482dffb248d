#include "mmdscan/mmdscan.h"

#include <cstring>
#include <new>
#include <string>

#include "mmdscan/detector.hpp"
#include "mmdscan/errors.hpp"
#include "mmdscan/experiments.hpp"
#include "mmdscan/intervals.hpp"
#include "mmdscan/io.hpp"
#include "mmdscan/kernels.hpp"
#include "mmdscan/mmd.hpp"

using namespace mmdscan;

struct mmdscan_kernel {
    Kernel kernel;
};

struct mmdscan_scan_result {
    ScanOutcome outcome;
};

struct mmdscan_plan {
    ExperimentPlan plan;
};

struct mmdscan_results {
    std::vector<ErrorEstimate> rows;
    std::uint64_t seed = 0;
};

namespace {

thread_local std::string g_last_error;

mmdscan_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return MMDSCAN_ERR_INVALID_ARGUMENT;
        case ErrorCode::insufficient_samples: return MMDSCAN_ERR_INSUFFICIENT_SAMPLES;
        case ErrorCode::bounds: return MMDSCAN_ERR_BOUNDS;
        case ErrorCode::capacity: return MMDSCAN_ERR_CAPACITY;
        case ErrorCode::io: return MMDSCAN_ERR_IO;
        case ErrorCode::parse: return MMDSCAN_ERR_PARSE;
        case ErrorCode::internal: return MMDSCAN_ERR_INTERNAL;
    }
    return MMDSCAN_ERR_INTERNAL;
}

template <typename Fn>
mmdscan_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MMDSCAN_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MMDSCAN_ERR_CAPACITY;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MMDSCAN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MMDSCAN_ERR_INTERNAL;
    }
}

mmdscan_status require(bool condition, const char* message) {
    if (condition) return MMDSCAN_OK;
    g_last_error = message;
    return MMDSCAN_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

std::string intervals_csv_header() { return "level,start,length\n"; }

}  // namespace

extern "C" {

const char* mmdscan_status_name(mmdscan_status status) {
    switch (status) {
        case MMDSCAN_OK: return "ok";
        case MMDSCAN_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case MMDSCAN_ERR_INSUFFICIENT_SAMPLES: return "insufficient_samples";
        case MMDSCAN_ERR_BOUNDS: return "bounds";
        case MMDSCAN_ERR_CAPACITY: return "capacity";
        case MMDSCAN_ERR_IO: return "io";
        case MMDSCAN_ERR_PARSE: return "parse";
        case MMDSCAN_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* mmdscan_last_error(void) { return g_last_error.c_str(); }

const char* mmdscan_version(void) { return "0.1.0"; }

mmdscan_status mmdscan_kernel_create(const char* kind, double sigma,
                                     mmdscan_kernel** out_kernel) {
    if (auto s = require(kind && out_kernel, "kind and out_kernel must not be null"))
        return s;
    return guarded([&] {
        *out_kernel = new mmdscan_kernel{Kernel::make(kernel_kind_from_name(kind), sigma)};
    });
}

void mmdscan_kernel_destroy(mmdscan_kernel* kernel) { delete kernel; }

mmdscan_status mmdscan_kernel_evaluate(const mmdscan_kernel* kernel, double x, double y,
                                       double* out_value) {
    if (auto s = require(kernel && out_value, "kernel and out_value must not be null"))
        return s;
    return guarded([&] { *out_value = kernel->kernel.evaluate(x, y); });
}

mmdscan_status mmdscan_kernel_bound(const mmdscan_kernel* kernel, double* out_bound) {
    if (auto s = require(kernel && out_bound, "kernel and out_bound must not be null"))
        return s;
    *out_bound = kernel->kernel.bound();
    return MMDSCAN_OK;
}

mmdscan_status mmdscan_mmd2_unbiased(const mmdscan_kernel* kernel, const double* x,
                                     size_t x_len, const double* y, size_t y_len,
                                     int threads, double* out_value) {
    if (auto s = require(kernel && x && y && out_value, "null argument")) return s;
    return guarded([&] {
        std::vector<double> xs(x, x + x_len);
        std::vector<double> ys(y, y + y_len);
        *out_value = mmd2_unbiased(xs, ys, kernel->kernel,
                                   threads < 0 ? 1u : static_cast<unsigned>(threads));
    });
}

mmdscan_status mmdscan_mmd2_population_gaussian(double mean1, double var1, double mean2,
                                                double var2, double sigma,
                                                double* out_value) {
    if (auto s = require(out_value != nullptr, "out_value must not be null")) return s;
    return guarded([&] {
        *out_value = mmd2_population_gaussian(mean1, var1, mean2, var2, sigma);
    });
}

mmdscan_status mmdscan_threshold_known(double mmd2, double delta, double* out_value) {
    if (auto s = require(out_value != nullptr, "out_value must not be null")) return s;
    return guarded([&] { *out_value = threshold_known(mmd2, delta); });
}

mmdscan_status mmdscan_threshold_decaying(size_t n, double* out_value) {
    if (auto s = require(out_value != nullptr, "out_value must not be null")) return s;
    return guarded([&] { *out_value = threshold_decaying(n); });
}

mmdscan_status mmdscan_i_min_bound(double kernel_bound, double threshold, double eta,
                                   size_t n, size_t* out_length) {
    if (auto s = require(out_length != nullptr, "out_length must not be null")) return s;
    return guarded([&] { *out_length = i_min_bound(kernel_bound, threshold, eta, n); });
}

void mmdscan_scan_config_init(mmdscan_scan_config* config) {
    if (!config) return;
    config->algorithm = MMDSCAN_ALGORITHM_EXHAUSTIVE;
    config->i_min = 2;
    config->threshold_mode = MMDSCAN_THRESHOLD_FIXED;
    config->threshold = 0.0;
    config->known_mmd2 = 0.0;
    config->known_delta = 0.0;
    config->eta = 1.0;
    config->t_prime = 0.0;
    config->delta_alg = 0.0;
    config->levels = 0;
    config->summary_mode = MMDSCAN_MODE_AUTO;
    config->dense_limit = GramSummaries::default_dense_limit;
    config->threads = 0;
}

mmdscan_status mmdscan_scan(const double* reference, size_t reference_len,
                            const double* observed, size_t observed_len,
                            const mmdscan_kernel* kernel,
                            const mmdscan_scan_config* config,
                            mmdscan_scan_result** out_result) {
    if (auto s = require(reference && observed && kernel && config && out_result,
                         "null argument"))
        return s;
    return guarded([&] {
        SampleSeries series;
        series.reference.assign(reference, reference + reference_len);
        series.observed.assign(observed, observed + observed_len);

        TestConfig cfg;
        cfg.algorithm = config->algorithm == MMDSCAN_ALGORITHM_MULTISCALE
                            ? AlgorithmKind::multiscale
                            : AlgorithmKind::exhaustive;
        cfg.i_min = config->i_min;
        switch (config->threshold_mode) {
            case MMDSCAN_THRESHOLD_KNOWN_MMD:
                cfg.threshold_mode = ThresholdMode::known_mmd;
                break;
            case MMDSCAN_THRESHOLD_DECAYING:
                cfg.threshold_mode = ThresholdMode::decaying;
                break;
            default:
                cfg.threshold_mode = ThresholdMode::fixed;
                break;
        }
        cfg.threshold = config->threshold;
        cfg.known_mmd2 = config->known_mmd2;
        cfg.known_delta = config->known_delta;
        cfg.eta = config->eta;
        if (config->t_prime > 0.0) cfg.t_prime = config->t_prime;
        if (config->delta_alg > 0.0) cfg.delta_alg = config->delta_alg;
        if (config->levels > 0) cfg.levels = config->levels;
        if (config->summary_mode == MMDSCAN_MODE_DENSE) cfg.summary_mode = SummaryMode::dense;
        if (config->summary_mode == MMDSCAN_MODE_STREAMING) {
            cfg.summary_mode = SummaryMode::streaming;
        }
        cfg.dense_limit = config->dense_limit;
        cfg.threads = config->threads < 0 ? 1u : static_cast<unsigned>(config->threads);

        const ScanOutcome outcome = scan(series, kernel->kernel, cfg);
        *out_result = new mmdscan_scan_result{outcome};
    });
}

void mmdscan_scan_result_destroy(mmdscan_scan_result* result) { delete result; }

int mmdscan_scan_result_decision(const mmdscan_scan_result* result) {
    return result && result->outcome.decision == Decision::h1 ? 1 : 0;
}

int mmdscan_scan_result_has_best_interval(const mmdscan_scan_result* result) {
    return result && result->outcome.best_interval.has_value() ? 1 : 0;
}

size_t mmdscan_scan_result_best_start(const mmdscan_scan_result* result) {
    return result && result->outcome.best_interval ? result->outcome.best_interval->start : 0;
}

size_t mmdscan_scan_result_best_length(const mmdscan_scan_result* result) {
    return result && result->outcome.best_interval ? result->outcome.best_interval->length
                                                   : 0;
}

double mmdscan_scan_result_best_statistic(const mmdscan_scan_result* result) {
    return result ? result->outcome.best_statistic : 0.0;
}

uint64_t mmdscan_scan_result_evaluations(const mmdscan_scan_result* result) {
    return result ? result->outcome.evaluations : 0;
}

const char* mmdscan_scan_result_trigger(const mmdscan_scan_result* result) {
    return result ? trigger_name(result->outcome.trigger) : "none";
}

double mmdscan_scan_result_threshold(const mmdscan_scan_result* result) {
    return result ? result->outcome.threshold : 0.0;
}

mmdscan_status mmdscan_dyadic_grid_csv(size_t n, char** out_csv) {
    if (auto s = require(out_csv != nullptr, "out_csv must not be null")) return s;
    return guarded([&] {
        const DyadicGrid grid(n);
        std::string text = intervals_csv_header();
        for (std::size_t j = 0; j < grid.level_count(); ++j) {
            for (const Interval& block : grid.level(j)) {
                text += std::to_string(j) + "," + std::to_string(block.start) + "," +
                        std::to_string(block.length) + "\n";
            }
        }
        *out_csv = copy_string(text);
    });
}

mmdscan_status mmdscan_extensions_csv(size_t n, size_t start, size_t length, int level,
                                      char** out_csv) {
    if (auto s = require(out_csv != nullptr, "out_csv must not be null")) return s;
    return guarded([&] {
        const DyadicGrid grid(n);
        const ExtensionSet set = extensions(Interval{start, length}, level, grid);
        std::string text = intervals_csv_header();
        for (const Interval& member : set.members()) {
            text += std::to_string(level) + "," + std::to_string(member.start) + "," +
                    std::to_string(member.length) + "\n";
        }
        *out_csv = copy_string(text);
    });
}

mmdscan_status mmdscan_plan_parse(const char* json_text, mmdscan_plan** out_plan) {
    if (auto s = require(json_text && out_plan, "null argument")) return s;
    return guarded([&] { *out_plan = new mmdscan_plan{parse_plan_json(json_text)}; });
}

mmdscan_status mmdscan_plan_load(const char* path, mmdscan_plan** out_plan) {
    if (auto s = require(path && out_plan, "null argument")) return s;
    return guarded([&] { *out_plan = new mmdscan_plan{load_plan_file(path)}; });
}

void mmdscan_plan_destroy(mmdscan_plan* plan) { delete plan; }

mmdscan_status mmdscan_plan_set_seed(mmdscan_plan* plan, uint64_t seed) {
    if (auto s = require(plan != nullptr, "plan must not be null")) return s;
    plan->plan.seed = seed;
    return MMDSCAN_OK;
}

mmdscan_status mmdscan_plan_get_seed(const mmdscan_plan* plan, uint64_t* out_seed) {
    if (auto s = require(plan && out_seed, "null argument")) return s;
    *out_seed = plan->plan.seed;
    return MMDSCAN_OK;
}

mmdscan_status mmdscan_plan_run(const mmdscan_plan* plan, int threads,
                                mmdscan_results** out_results) {
    if (auto s = require(plan && out_results, "null argument")) return s;
    return guarded([&] {
        auto rows = run_plan(plan->plan, threads < 0 ? 1u : static_cast<unsigned>(threads));
        *out_results = new mmdscan_results{std::move(rows), plan->plan.seed};
    });
}

void mmdscan_results_destroy(mmdscan_results* results) { delete results; }

size_t mmdscan_results_rows(const mmdscan_results* results) {
    return results ? results->rows.size() : 0;
}

mmdscan_status mmdscan_results_csv(const mmdscan_results* results, char** out_text) {
    if (auto s = require(results && out_text, "null argument")) return s;
    return guarded([&] { *out_text = copy_string(results_to_csv(results->rows)); });
}

mmdscan_status mmdscan_results_json(const mmdscan_results* results, char** out_text) {
    if (auto s = require(results && out_text, "null argument")) return s;
    return guarded([&] {
        *out_text = copy_string(results_to_json(results->rows, results->seed));
    });
}

mmdscan_status mmdscan_read_series(const char* path, double** out_values,
                                   size_t* out_len) {
    if (auto s = require(path && out_values && out_len, "null argument")) return s;
    return guarded([&] {
        const std::vector<double> values = read_series_file(path);
        double* buffer = new double[values.size()];
        std::memcpy(buffer, values.data(), values.size() * sizeof(double));
        *out_values = buffer;
        *out_len = values.size();
    });
}

void mmdscan_buffer_free(double* values) { delete[] values; }

void mmdscan_string_free(char* text) { delete[] text; }

}  // extern "C"
