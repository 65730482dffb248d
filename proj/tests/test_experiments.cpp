#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mmdscan/errors.hpp"
#include "mmdscan/experiments.hpp"
#include "test_util.hpp"

using mmdscan::DistributionSpec;
using mmdscan::ErrorCode;
using mmdscan::ExperimentPlan;
using mmdscan::Interval;

namespace {

double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    const double mean = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size() - 1);
}

const char* tiny_plan_json = R"({
  "p": {"kind": "gaussian", "mean": 0.0, "variance": 0.5},
  "q": {"kind": "gaussian_mixture",
        "components": [{"weight": 0.5, "mean": -2.0, "variance": 0.5},
                       {"weight": 0.5, "mean": 2.0, "variance": 0.5}]},
  "kernel": {"kind": "gaussian", "sigma": 1.0},
  "n": [64],
  "i_min": {"mode": "values", "values": [8, 16]},
  "threshold": {"mode": "fixed", "values": [0.25]},
  "algorithm": "exhaustive",
  "trials": 40,
  "seed": 4242
})";

}  // namespace

TEST_CASE("distribution moments") {
    const auto g = DistributionSpec::gaussian(0.0, 0.5);
    CHECK(g.mean() == doctest::Approx(0.0));
    CHECK(g.variance() == doctest::Approx(0.5));

    const auto mix = DistributionSpec::gaussian_mixture(
        {{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}});
    CHECK(mix.mean() == doctest::Approx(0.0));
    CHECK(mix.variance() == doctest::Approx(4.5));

    const auto lap = DistributionSpec::laplace_mixture(
        {{0.5, -3.0, 0.5}, {0.5, 3.0, 0.5}});
    CHECK(lap.variance() == doctest::Approx(9.5));

    CHECK(testutil::error_code_of([] {
              DistributionSpec::gaussian_mixture({{0.7, 0.0, 1.0}});
          }) == static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([] { DistributionSpec::gaussian(0.0, 0.0); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("sampling matches the spec moments") {
    const std::size_t count = 100000;

    const auto g = mmdscan::sample(DistributionSpec::gaussian(0.0, 0.5), count, 11);
    CHECK(std::abs(sample_mean(g)) <= 0.01);
    CHECK(std::abs(sample_variance(g) - 0.5) <= 0.02);

    const auto mix = mmdscan::sample(
        DistributionSpec::gaussian_mixture({{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}}), count, 13);
    CHECK(std::abs(sample_mean(mix)) <= 0.03);
    CHECK(std::abs(sample_variance(mix) - 4.5) <= 0.1);

    const auto lap = mmdscan::sample(
        DistributionSpec::laplace_mixture({{0.5, -3.0, 0.5}, {0.5, 3.0, 0.5}}), count, 17);
    CHECK(std::abs(sample_variance(lap) - 9.5) <= 0.1);
}

TEST_CASE("sampling is deterministic per seed") {
    const auto spec = DistributionSpec::gaussian(1.0, 2.0);
    CHECK(mmdscan::sample(spec, 100, 5) == mmdscan::sample(spec, 100, 5));
    CHECK(mmdscan::sample(spec, 100, 5) != mmdscan::sample(spec, 100, 6));
    CHECK(testutil::error_code_of([&] { mmdscan::sample(spec, 0, 5); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("planted instances modify exactly the anomaly block") {
    const auto p = DistributionSpec::gaussian(0.0, 0.5);
    const auto q = DistributionSpec::gaussian(5.0, 0.5);
    const std::size_t n = 200;
    const Interval anomaly{100, 50};

    const auto null_instance = mmdscan::plant_instance(p, q, n, std::nullopt, 31);
    const auto planted = mmdscan::plant_instance(p, q, n, anomaly, 31);

    CHECK(null_instance.reference == planted.reference);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= anomaly.start && i < anomaly.end()) {
            CHECK(null_instance.observed[i] != planted.observed[i]);
        } else {
            CHECK(null_instance.observed[i] == planted.observed[i]);
        }
    }

    // Whole-network anomaly: every observed node is anomalous.
    const auto all = mmdscan::plant_instance(p, q, 50, Interval{0, 50}, 32);
    CHECK(sample_mean(all.observed) > 3.0);

    CHECK(testutil::error_code_of([&] {
              mmdscan::plant_instance(p, q, 50, Interval{40, 20}, 33);
          }) == static_cast<int>(ErrorCode::bounds));
}

TEST_CASE("null instances look exchangeable") {
    const auto p = DistributionSpec::gaussian(0.0, 0.5);
    const auto instance = mmdscan::plant_instance(p, p, 2000, std::nullopt, 37);
    const double v = mmdscan::mmd2_unbiased(instance.reference, instance.observed,
                                            mmdscan::Kernel::gaussian(1.0));
    CHECK(std::abs(v) <= 0.02);
}

TEST_CASE("plan parsing and validation") {
    const ExperimentPlan plan = mmdscan::parse_plan_json(tiny_plan_json);
    CHECK(plan.n_values == std::vector<std::size_t>{64});
    CHECK(plan.trials == 40);
    CHECK(plan.seed == 4242);
    CHECK(plan.i_min.resolve(64) == std::vector<std::size_t>{8, 16});
    CHECK(plan.threshold.resolve(64) == std::vector<double>{0.25});

    CHECK(testutil::error_code_of([] { mmdscan::parse_plan_json("{not json"); }) ==
          static_cast<int>(ErrorCode::parse));
    CHECK(testutil::error_code_of([] { mmdscan::parse_plan_json("{}"); }) ==
          static_cast<int>(ErrorCode::parse));
}

TEST_CASE("i_min sweep rules") {
    mmdscan::IminRule rule;
    rule.kind = mmdscan::IminRule::Kind::log_ratio;
    rule.values = {1.0, 4.0};
    const auto resolved = rule.resolve(100);
    CHECK(resolved.size() == 2);
    CHECK(resolved[0] == static_cast<std::size_t>(std::ceil(std::log(100.0))));
    CHECK(resolved[1] == static_cast<std::size_t>(std::ceil(4.0 * std::log(100.0))));

    mmdscan::IminRule power;
    power.kind = mmdscan::IminRule::Kind::power;
    power.exponent = 0.9;
    CHECK(power.resolve(100) == std::vector<std::size_t>{64});  // ceil(100^0.9)
}

TEST_CASE("run_plan is reproducible and thread-count independent") {
    const ExperimentPlan plan = mmdscan::parse_plan_json(tiny_plan_json);
    const auto a = mmdscan::run_plan(plan, 1);
    const auto b = mmdscan::run_plan(plan, 4);
    REQUIRE(a.size() == 2);  // one n, two i_min values, one threshold
    REQUIRE(b.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].p_e == b[i].p_e);
        CHECK(a[i].p_h0_error == b[i].p_h0_error);
        CHECK(a[i].p_h1_error == b[i].p_h1_error);
        CHECK(a[i].n == 64);
        CHECK(a[i].trials == 40);
        CHECK(a[i].p_e ==
              doctest::Approx(0.5 * (a[i].p_h0_error + a[i].p_h1_error)).epsilon(1e-12));
    }
}

TEST_CASE("degenerate plans with q = p hover at even odds") {
    ExperimentPlan plan = mmdscan::parse_plan_json(tiny_plan_json);
    plan.q = plan.p;
    plan.trials = 60;
    plan.i_min.values = {16};
    const auto rows = mmdscan::run_plan(plan, 0);
    REQUIRE(rows.size() == 1);
    // The anomaly is undetectable, so nearly every planted trial errs, and the
    // null side almost never fires at this threshold.
    CHECK(rows[0].p_h1_error >= 0.9);
    CHECK(rows[0].p_h0_error <= 0.1);
    CHECK(rows[0].p_e >= 0.4);
    CHECK(rows[0].p_e <= 0.6);
}

TEST_CASE("results render to CSV and JSON") {
    ExperimentPlan plan = mmdscan::parse_plan_json(tiny_plan_json);
    plan.trials = 5;
    plan.i_min.values = {8};
    const auto rows = mmdscan::run_plan(plan, 0);
    const std::string csv = mmdscan::results_to_csv(rows);
    CHECK(csv.rfind("n,i_min,t,p_e,p_h0_err,p_h1_err,std_err,trials\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

    const std::string json_text = mmdscan::results_to_json(rows, plan.seed);
    CHECK(json_text.find("\"seed\": 4242") != std::string::npos);
    CHECK(json_text.find("\"rows\"") != std::string::npos);
}
