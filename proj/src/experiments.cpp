#include "mmdscan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mmdscan/errors.hpp"
#include "mmdscan/parallel.hpp"

namespace mmdscan {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
    // 53 random bits mapped to [0, 1).
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& rng, double mean, double stddev) {
    // Box-Muller; the +1 offset keeps u1 away from zero.
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * M_PI * u2);
}

double draw_laplace(std::mt19937_64& rng, double mean, double scale) {
    const double u = uniform01(rng) - 0.5;
    const double magnitude = -std::log(1.0 - 2.0 * std::abs(u));
    return mean + (u < 0.0 ? -scale : scale) * magnitude;
}

const MixtureComponent& pick_component(const DistributionSpec& dist, std::mt19937_64& rng) {
    if (dist.components.size() == 1) return dist.components.front();
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (const auto& c : dist.components) {
        cumulative += c.weight;
        if (u < cumulative) return c;
    }
    return dist.components.back();
}

double draw(const DistributionSpec& dist, std::mt19937_64& rng) {
    const MixtureComponent& c = pick_component(dist, rng);
    if (dist.kind == DistributionSpec::Kind::laplace_mixture) {
        return draw_laplace(rng, c.mean, std::sqrt(c.variance / 2.0));
    }
    return draw_normal(rng, c.mean, std::sqrt(c.variance));
}

}  // namespace

DistributionSpec DistributionSpec::gaussian(double mean, double variance) {
    DistributionSpec spec;
    spec.kind = Kind::gaussian;
    spec.components = {MixtureComponent{1.0, mean, variance}};
    spec.validate();
    return spec;
}

DistributionSpec DistributionSpec::gaussian_mixture(std::vector<MixtureComponent> components) {
    DistributionSpec spec;
    spec.kind = Kind::gaussian_mixture;
    spec.components = std::move(components);
    spec.validate();
    return spec;
}

DistributionSpec DistributionSpec::laplace_mixture(std::vector<MixtureComponent> components) {
    DistributionSpec spec;
    spec.kind = Kind::laplace_mixture;
    spec.components = std::move(components);
    spec.validate();
    return spec;
}

void DistributionSpec::validate() const {
    if (components.empty()) {
        raise(ErrorCode::invalid_argument, "distribution needs at least one component");
    }
    if (kind == Kind::gaussian && components.size() != 1) {
        raise(ErrorCode::invalid_argument, "plain gaussian takes exactly one component");
    }
    double weight_sum = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            raise(ErrorCode::invalid_argument, "component weights must be positive");
        }
        if (!(c.variance > 0.0) || !std::isfinite(c.variance) || !std::isfinite(c.mean)) {
            raise(ErrorCode::invalid_argument,
                  "components must have finite mean and positive variance");
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        raise(ErrorCode::invalid_argument, "component weights must sum to 1");
    }
}

double DistributionSpec::mean() const {
    double m = 0.0;
    for (const auto& c : components) m += c.weight * c.mean;
    return m;
}

double DistributionSpec::variance() const {
    const double m = mean();
    double second = 0.0;
    for (const auto& c : components) second += c.weight * (c.variance + c.mean * c.mean);
    return second - m * m;
}

const char* distribution_kind_name(DistributionSpec::Kind kind) {
    switch (kind) {
        case DistributionSpec::Kind::gaussian: return "gaussian";
        case DistributionSpec::Kind::gaussian_mixture: return "gaussian_mixture";
        case DistributionSpec::Kind::laplace_mixture: return "laplace_mixture";
    }
    return "unknown";
}

std::vector<double> sample(const DistributionSpec& dist, std::size_t count,
                           std::uint64_t seed) {
    dist.validate();
    if (count < 1) {
        raise(ErrorCode::invalid_argument, "sample count must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = draw(dist, rng);
    return out;
}

SampleSeries plant_instance(const DistributionSpec& p, const DistributionSpec& q,
                            std::size_t n, const std::optional<Interval>& anomaly,
                            std::uint64_t seed) {
    p.validate();
    q.validate();
    if (n < 2) {
        raise(ErrorCode::invalid_argument, "instance needs n >= 2 nodes");
    }
    if (anomaly && (anomaly->length == 0 || anomaly->end() > n)) {
        raise(ErrorCode::bounds, "anomaly interval must lie within the network");
    }
    std::mt19937_64 rng(seed);
    SampleSeries series;
    series.reference.resize(n);
    series.observed.resize(n);
    for (std::size_t i = 0; i < n; ++i) series.reference[i] = draw(p, rng);
    for (std::size_t i = 0; i < n; ++i) series.observed[i] = draw(p, rng);
    if (anomaly) {
        for (std::size_t i = anomaly->start; i < anomaly->end(); ++i) {
            series.observed[i] = draw(q, rng);
        }
    }
    return series;
}

std::vector<std::size_t> IminRule::resolve(std::size_t n) const {
    std::vector<std::size_t> out;
    switch (kind) {
        case Kind::values:
            for (double v : values) {
                out.push_back(static_cast<std::size_t>(std::llround(v)));
            }
            break;
        case Kind::log_ratio:
            // Ratios are relative to the natural log of n; the resolved
            // length is clamped into the valid candidate range [2, n].
            for (double r : values) {
                const double len = std::ceil(r * std::log(static_cast<double>(n)));
                out.push_back(std::min<std::size_t>(
                    n, std::max<std::size_t>(2, static_cast<std::size_t>(len))));
            }
            break;
        case Kind::power:
            out.push_back(static_cast<std::size_t>(
                std::ceil(std::pow(static_cast<double>(n), exponent))));
            break;
    }
    return out;
}

std::vector<double> ThresholdRule::resolve(std::size_t n) const {
    switch (mode) {
        case ThresholdMode::fixed:
            return values;
        case ThresholdMode::known_mmd:
            return {threshold_known(mmd2, delta)};
        case ThresholdMode::decaying:
            return {threshold_decaying(n)};
    }
    raise(ErrorCode::internal, "unhandled threshold mode");
}

void ExperimentPlan::validate() const {
    p.validate();
    q.validate();
    if (!(sigma > 0.0)) {
        raise(ErrorCode::invalid_argument, "kernel bandwidth must be positive");
    }
    if (n_values.empty()) {
        raise(ErrorCode::invalid_argument, "plan needs at least one network size");
    }
    if (trials < 1) {
        raise(ErrorCode::invalid_argument, "plan needs at least one trial");
    }
    if (threshold.mode == ThresholdMode::fixed && threshold.values.empty()) {
        raise(ErrorCode::invalid_argument, "fixed threshold rule needs values");
    }
    if (i_min.kind != IminRule::Kind::power && i_min.values.empty()) {
        raise(ErrorCode::invalid_argument, "minimum-length rule needs values");
    }
    for (std::size_t n : n_values) {
        if (n < 2) {
            raise(ErrorCode::invalid_argument, "network sizes must be >= 2");
        }
        for (std::size_t i_min_value : i_min.resolve(n)) {
            if (i_min_value < 2 || i_min_value > n) {
                raise(ErrorCode::invalid_argument,
                      "resolved minimum length " + std::to_string(i_min_value) +
                          " is out of range for n = " + std::to_string(n));
            }
        }
        if (anomaly_length && (*anomaly_length < 2 || *anomaly_length > n)) {
            raise(ErrorCode::invalid_argument,
                  "anomaly length is out of range for n = " + std::to_string(n));
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
    std::uint64_t state = seed;
    state ^= splitmix64(state) + a;
    state ^= splitmix64(state) + b;
    state ^= splitmix64(state) + c;
    return splitmix64(state);
}

namespace {

struct ConfigRow {
    std::size_t n;
    std::size_t i_min;
    double t;
};

}  // namespace

std::vector<ErrorEstimate> run_plan(const ExperimentPlan& plan, unsigned threads) {
    plan.validate();
    const Kernel kernel = Kernel::make(plan.kernel_kind, plan.sigma);

    std::vector<ConfigRow> rows;
    for (std::size_t n : plan.n_values) {
        for (std::size_t i_min_value : plan.i_min.resolve(n)) {
            for (double t : plan.threshold.resolve(n)) {
                rows.push_back(ConfigRow{n, i_min_value, t});
            }
        }
    }

    const std::size_t trials = plan.trials;
    const std::size_t tasks_per_row = 2 * trials;
    const std::size_t task_count = rows.size() * tasks_per_row;

    std::vector<std::uint8_t> errors(task_count, 0);
    std::vector<std::string> failures(task_count);

    parallel_for(task_count, threads, [&](std::size_t task) {
        const std::size_t row_index = task / tasks_per_row;
        const std::size_t within = task % tasks_per_row;
        const bool planted = within >= trials;
        const std::size_t trial = planted ? within - trials : within;
        const ConfigRow& row = rows[row_index];

        try {
            const std::uint64_t trial_seed =
                mix_seed(plan.seed, row_index, planted ? 1 : 0, trial);

            std::optional<Interval> anomaly;
            if (planted) {
                const std::size_t length = plan.anomaly_length.value_or(row.i_min);
                std::mt19937_64 placement(mix_seed(trial_seed, 0x706c6163, 0, 0));
                const std::size_t span = row.n - length;
                const std::size_t start =
                    span == 0 ? 0 : placement() % (span + 1);
                anomaly = Interval{start, length};
            }
            const SampleSeries series =
                plant_instance(plan.p, plan.q, row.n, anomaly, trial_seed);

            TestConfig config;
            config.i_min = row.i_min;
            config.threshold_mode = ThresholdMode::fixed;
            config.threshold = row.t;
            config.eta = plan.eta;
            config.algorithm = plan.algorithm;
            config.t_prime = plan.t_prime;
            config.delta_alg = plan.delta_alg;
            config.levels = plan.levels;
            config.dense_limit = plan.dense_limit;
            config.threads = 1;  // trials already run in parallel

            const ScanOutcome outcome = scan(series, kernel, config);
            const bool wrong =
                planted ? outcome.decision == Decision::h0 : outcome.decision == Decision::h1;
            errors[task] = wrong ? 1 : 0;
        } catch (const std::exception& e) {
            failures[task] = e.what();
        }
    });

    std::size_t failure_count = 0;
    std::string first_failure;
    for (const auto& f : failures) {
        if (!f.empty()) {
            if (failure_count == 0) first_failure = f;
            ++failure_count;
        }
    }
    if (failure_count > 0) {
        raise(ErrorCode::internal,
              std::to_string(failure_count) + " trial(s) failed; first: " + first_failure);
    }

    std::vector<ErrorEstimate> out;
    out.reserve(rows.size());
    const double dt = static_cast<double>(trials);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::size_t h0_wrong = 0;
        std::size_t h1_wrong = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            h0_wrong += errors[r * tasks_per_row + trial];
            h1_wrong += errors[r * tasks_per_row + trials + trial];
        }
        ErrorEstimate row;
        row.n = rows[r].n;
        row.i_min = rows[r].i_min;
        row.t = rows[r].t;
        row.p_h0_error = static_cast<double>(h0_wrong) / dt;
        row.p_h1_error = static_cast<double>(h1_wrong) / dt;
        row.p_e = 0.5 * (row.p_h0_error + row.p_h1_error);
        row.std_error = 0.5 * std::sqrt(row.p_h0_error * (1.0 - row.p_h0_error) / dt +
                                        row.p_h1_error * (1.0 - row.p_h1_error) / dt);
        row.trials = trials;
        out.push_back(row);
    }
    return out;
}

namespace {

using nlohmann::json;

MixtureComponent parse_component(const json& j) {
    MixtureComponent c;
    c.weight = j.value("weight", 1.0);
    c.mean = j.at("mean").get<double>();
    c.variance = j.at("variance").get<double>();
    return c;
}

DistributionSpec parse_distribution(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        return DistributionSpec::gaussian(j.at("mean").get<double>(),
                                          j.at("variance").get<double>());
    }
    std::vector<MixtureComponent> components;
    for (const auto& cj : j.at("components")) components.push_back(parse_component(cj));
    if (kind == "gaussian_mixture") {
        return DistributionSpec::gaussian_mixture(std::move(components));
    }
    if (kind == "laplace_mixture") {
        return DistributionSpec::laplace_mixture(std::move(components));
    }
    raise(ErrorCode::parse, "unknown distribution kind '" + kind + "'");
}

IminRule parse_i_min(const json& j) {
    IminRule rule;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "values") {
        rule.kind = IminRule::Kind::values;
        rule.values = j.at("values").get<std::vector<double>>();
    } else if (mode == "log_ratio") {
        rule.kind = IminRule::Kind::log_ratio;
        rule.values = j.at("values").get<std::vector<double>>();
    } else if (mode == "power") {
        rule.kind = IminRule::Kind::power;
        rule.exponent = j.at("exponent").get<double>();
    } else {
        raise(ErrorCode::parse, "unknown i_min mode '" + mode + "'");
    }
    return rule;
}

ThresholdRule parse_threshold(const json& j) {
    ThresholdRule rule;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "fixed") {
        rule.mode = ThresholdMode::fixed;
        rule.values = j.at("values").get<std::vector<double>>();
    } else if (mode == "known_mmd") {
        rule.mode = ThresholdMode::known_mmd;
        rule.mmd2 = j.at("mmd2").get<double>();
        rule.delta = j.at("delta").get<double>();
    } else if (mode == "decaying") {
        rule.mode = ThresholdMode::decaying;
    } else {
        raise(ErrorCode::parse, "unknown threshold mode '" + mode + "'");
    }
    return rule;
}

}  // namespace

ExperimentPlan parse_plan_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        raise(ErrorCode::parse, std::string("plan is not valid JSON: ") + e.what());
    }
    try {
        ExperimentPlan plan;
        plan.p = parse_distribution(j.at("p"));
        plan.q = parse_distribution(j.at("q"));
        const auto& kj = j.at("kernel");
        plan.kernel_kind = kernel_kind_from_name(kj.at("kind").get<std::string>());
        plan.sigma = kj.at("sigma").get<double>();
        plan.n_values = j.at("n").get<std::vector<std::size_t>>();
        plan.i_min = parse_i_min(j.at("i_min"));
        plan.threshold = parse_threshold(j.at("threshold"));
        if (j.contains("algorithm")) {
            plan.algorithm = algorithm_kind_from_name(j.at("algorithm").get<std::string>());
        }
        plan.eta = j.value("eta", 1.0);
        if (j.contains("t_prime")) plan.t_prime = j.at("t_prime").get<double>();
        if (j.contains("delta_alg")) plan.delta_alg = j.at("delta_alg").get<double>();
        if (j.contains("levels")) plan.levels = j.at("levels").get<int>();
        plan.trials = j.value("trials", std::size_t{200});
        plan.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("anomaly_length")) {
            plan.anomaly_length = j.at("anomaly_length").get<std::size_t>();
        }
        plan.validate();
        return plan;
    } catch (const json::exception& e) {
        raise(ErrorCode::parse, std::string("plan schema error: ") + e.what());
    }
}

ExperimentPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::io, "cannot open plan file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_plan_json(buffer.str());
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string results_to_csv(const std::vector<ErrorEstimate>& rows) {
    std::string out = "n,i_min,t,p_e,p_h0_err,p_h1_err,std_err,trials\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n) + "," + std::to_string(row.i_min) + "," +
               format_double(row.t) + "," + format_double(row.p_e) + "," +
               format_double(row.p_h0_error) + "," + format_double(row.p_h1_error) + "," +
               format_double(row.std_error) + "," + std::to_string(row.trials) + "\n";
    }
    return out;
}

std::string results_to_json(const std::vector<ErrorEstimate>& rows, std::uint64_t seed) {
    json j;
    j["seed"] = seed;
    j["rows"] = json::array();
    for (const auto& row : rows) {
        j["rows"].push_back({{"n", row.n},
                             {"i_min", row.i_min},
                             {"t", row.t},
                             {"p_e", row.p_e},
                             {"p_h0_err", row.p_h0_error},
                             {"p_h1_err", row.p_h1_error},
                             {"std_err", row.std_error},
                             {"trials", row.trials}});
    }
    return j.dump(2) + "\n";
}

}  // namespace mmdscan
