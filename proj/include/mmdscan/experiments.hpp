#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmdscan/detector.hpp"
#include "mmdscan/intervals.hpp"
#include "mmdscan/kernels.hpp"
#include "mmdscan/mmd.hpp"

namespace mmdscan {

struct MixtureComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 1.0;
};

// Sampling distribution: a single normal, a normal mixture, or a Laplace
// mixture parameterized by per-component variance (scale b = sqrt(v / 2)).
struct DistributionSpec {
    enum class Kind { gaussian, gaussian_mixture, laplace_mixture };

    Kind kind = Kind::gaussian;
    std::vector<MixtureComponent> components;

    static DistributionSpec gaussian(double mean, double variance);
    static DistributionSpec gaussian_mixture(std::vector<MixtureComponent> components);
    static DistributionSpec laplace_mixture(std::vector<MixtureComponent> components);

    void validate() const;
    double mean() const;
    double variance() const;
};

const char* distribution_kind_name(DistributionSpec::Kind kind);

// i.i.d. samples, deterministic for a given seed.
std::vector<double> sample(const DistributionSpec& dist, std::size_t count,
                           std::uint64_t seed);

// Reference sequence drawn from p; observed sequence drawn from p except the
// anomaly indices, which are drawn from q. No anomaly gives an exchangeable
// null instance.
SampleSeries plant_instance(const DistributionSpec& p, const DistributionSpec& q,
                            std::size_t n, const std::optional<Interval>& anomaly,
                            std::uint64_t seed);

// Per-configuration sweep rules.
struct IminRule {
    enum class Kind { values, log_ratio, power };
    Kind kind = Kind::values;
    std::vector<double> values;  // lengths, or ratios of the natural log of n
    double exponent = 0.9;       // power mode: ceil(n^exponent)

    std::vector<std::size_t> resolve(std::size_t n) const;
};

struct ThresholdRule {
    ThresholdMode mode = ThresholdMode::fixed;
    std::vector<double> values;  // fixed mode
    double mmd2 = 0.0;           // known_mmd mode
    double delta = 0.0;          // known_mmd mode

    std::vector<double> resolve(std::size_t n) const;
};

struct ExperimentPlan {
    DistributionSpec p;
    DistributionSpec q;
    KernelKind kernel_kind = KernelKind::gaussian;
    double sigma = 1.0;

    std::vector<std::size_t> n_values;
    IminRule i_min;
    ThresholdRule threshold;

    AlgorithmKind algorithm = AlgorithmKind::exhaustive;
    double eta = 1.0;
    std::optional<double> t_prime;
    std::optional<double> delta_alg;
    std::optional<int> levels;

    std::size_t trials = 200;
    std::uint64_t seed = 0;
    // Planted anomaly length; defaults to the configuration's minimum
    // candidate length (the hardest case the candidate set admits).
    std::optional<std::size_t> anomaly_length;

    std::size_t dense_limit = GramSummaries::default_dense_limit;

    void validate() const;
};

struct ErrorEstimate {
    std::size_t n = 0;
    std::size_t i_min = 0;
    double t = 0.0;
    double p_e = 0.0;
    double p_h0_error = 0.0;
    double p_h1_error = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

// Runs `trials` null and `trials` planted instances per configuration and
// tallies both error rates. Trials use per-trial derived seeds, so the table
// is identical for every worker count.
std::vector<ErrorEstimate> run_plan(const ExperimentPlan& plan, unsigned threads = 0);

ExperimentPlan parse_plan_json(const std::string& text);
ExperimentPlan load_plan_file(const std::string& path);

std::string results_to_csv(const std::vector<ErrorEstimate>& rows);
std::string results_to_json(const std::vector<ErrorEstimate>& rows, std::uint64_t seed);

// Derives an independent stream seed; used for per-trial seeding.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c);

}  // namespace mmdscan
