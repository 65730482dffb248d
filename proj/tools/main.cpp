// Command-line front end. Links the C library interface only.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmdscan/mmdscan.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAlarm = 3;

[[noreturn]] void fail(mmdscan_status status) {
    std::cerr << "error (" << mmdscan_status_name(status) << "): " << mmdscan_last_error()
              << "\n";
    std::exit(kExitRuntime);
}

void check(mmdscan_status status) {
    if (status != MMDSCAN_OK) fail(status);
}

struct SeriesBuffer {
    double* data = nullptr;
    size_t len = 0;
    ~SeriesBuffer() { mmdscan_buffer_free(data); }
};

struct KernelHandle {
    mmdscan_kernel* handle = nullptr;
    ~KernelHandle() { mmdscan_kernel_destroy(handle); }
};

void read_series(const std::string& path, SeriesBuffer& out) {
    check(mmdscan_read_series(path.c_str(), &out.data, &out.len));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        std::cerr << "error (io): cannot write '" << path << "'\n";
        std::exit(kExitRuntime);
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

struct ScanArgs {
    std::string reference_path;
    std::string observed_path;
    std::string kernel = "gaussian";
    double sigma = 1.0;
    std::size_t i_min = 2;
    double threshold = 0.0;
    double known_mmd = 0.0;
    double delta = 0.0;
    bool decaying = false;
    double eta = 1.0;
    std::string algorithm = "exhaustive";
    double t_prime = 0.0;
    double delta_alg = 0.0;
    int levels = 0;
    int threads = 0;
    std::string format = "json";
    std::string out_path;
};

int run_scan(const ScanArgs& args, bool threshold_fixed, bool threshold_known) {
    SeriesBuffer reference;
    SeriesBuffer observed;
    read_series(args.reference_path, reference);
    read_series(args.observed_path, observed);

    KernelHandle kernel;
    check(mmdscan_kernel_create(args.kernel.c_str(), args.sigma, &kernel.handle));

    mmdscan_scan_config config;
    mmdscan_scan_config_init(&config);
    config.algorithm = args.algorithm == "multiscale" ? MMDSCAN_ALGORITHM_MULTISCALE
                                                      : MMDSCAN_ALGORITHM_EXHAUSTIVE;
    config.i_min = args.i_min;
    if (threshold_fixed) {
        config.threshold_mode = MMDSCAN_THRESHOLD_FIXED;
        config.threshold = args.threshold;
    } else if (threshold_known) {
        config.threshold_mode = MMDSCAN_THRESHOLD_KNOWN_MMD;
        config.known_mmd2 = args.known_mmd;
        config.known_delta = args.delta;
    } else {
        config.threshold_mode = MMDSCAN_THRESHOLD_DECAYING;
    }
    config.eta = args.eta;
    config.t_prime = args.t_prime;
    config.delta_alg = args.delta_alg;
    config.levels = args.levels;
    config.threads = args.threads;

    mmdscan_scan_result* result = nullptr;
    check(mmdscan_scan(reference.data, reference.len, observed.data, observed.len,
                       kernel.handle, &config, &result));
    std::unique_ptr<mmdscan_scan_result, decltype(&mmdscan_scan_result_destroy)> guard(
        result, &mmdscan_scan_result_destroy);

    const bool alarm = mmdscan_scan_result_decision(result) == 1;
    const std::string trigger = mmdscan_scan_result_trigger(result);

    if (args.format == "csv") {
        std::string text = "decision,start,length,statistic,evaluations,trigger,threshold\n";
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%zu,%zu,%.17g,%llu,%s,%.17g\n",
                      alarm ? "H1" : "H0", mmdscan_scan_result_best_start(result),
                      mmdscan_scan_result_best_length(result),
                      mmdscan_scan_result_best_statistic(result),
                      static_cast<unsigned long long>(mmdscan_scan_result_evaluations(result)),
                      trigger.c_str(), mmdscan_scan_result_threshold(result));
        emit(text + row, args.out_path);
    } else {
        json j;
        j["decision"] = alarm ? "H1" : "H0";
        if (mmdscan_scan_result_has_best_interval(result)) {
            j["best_interval"] = {{"start", mmdscan_scan_result_best_start(result)},
                                  {"length", mmdscan_scan_result_best_length(result)}};
        } else {
            j["best_interval"] = nullptr;
        }
        j["best_statistic"] = mmdscan_scan_result_best_statistic(result);
        j["evaluations"] = mmdscan_scan_result_evaluations(result);
        j["trigger"] = trigger;
        j["threshold"] = mmdscan_scan_result_threshold(result);
        j["n"] = reference.len;
        j["kernel"] = args.kernel;
        j["sigma"] = args.sigma;
        j["i_min"] = args.i_min;
        j["algorithm"] = args.algorithm;
        emit(j.dump(2) + "\n", args.out_path);
    }
    return alarm ? kExitAlarm : kExitOk;
}

struct MmdArgs {
    std::string x_path;
    std::string y_path;
    std::string kernel = "gaussian";
    double sigma = 1.0;
    int threads = 0;
    std::string format = "json";
    std::string out_path;
};

int run_mmd(const MmdArgs& args) {
    SeriesBuffer x;
    SeriesBuffer y;
    read_series(args.x_path, x);
    read_series(args.y_path, y);

    KernelHandle kernel;
    check(mmdscan_kernel_create(args.kernel.c_str(), args.sigma, &kernel.handle));

    double value = 0.0;
    check(mmdscan_mmd2_unbiased(kernel.handle, x.data, x.len, y.data, y.len, args.threads,
                                &value));

    if (args.format == "csv") {
        char row[128];
        std::snprintf(row, sizeof(row), "mmd2\n%.17g\n", value);
        emit(row, args.out_path);
    } else {
        json j;
        j["mmd2"] = value;
        j["n_x"] = x.len;
        j["n_y"] = y.len;
        j["kernel"] = args.kernel;
        j["sigma"] = args.sigma;
        emit(j.dump(2) + "\n", args.out_path);
    }
    return kExitOk;
}

struct ExperimentArgs {
    std::string plan_path;
    std::string out_path;
    std::string json_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
};

int run_experiment(const ExperimentArgs& args) {
    mmdscan_plan* plan = nullptr;
    check(mmdscan_plan_load(args.plan_path.c_str(), &plan));
    std::unique_ptr<mmdscan_plan, decltype(&mmdscan_plan_destroy)> plan_guard(
        plan, &mmdscan_plan_destroy);

    // Seed priority: the --seed flag, then the plan file, then entropy. The
    // effective seed is always echoed so a run can be replayed.
    bool plan_has_seed = false;
    {
        std::ifstream in(args.plan_path);
        json j = json::parse(in, nullptr, false);
        plan_has_seed = !j.is_discarded() && j.contains("seed");
    }
    std::uint64_t seed = 0;
    if (args.seed_given) {
        seed = args.seed;
        check(mmdscan_plan_set_seed(plan, seed));
    } else if (plan_has_seed) {
        check(mmdscan_plan_get_seed(plan, &seed));
    } else {
        std::random_device entropy;
        seed = (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
        check(mmdscan_plan_set_seed(plan, seed));
    }

    mmdscan_results* results = nullptr;
    check(mmdscan_plan_run(plan, args.threads, &results));
    std::unique_ptr<mmdscan_results, decltype(&mmdscan_results_destroy)> results_guard(
        results, &mmdscan_results_destroy);

    char* csv = nullptr;
    check(mmdscan_results_csv(results, &csv));
    std::unique_ptr<char[], decltype(&mmdscan_string_free)> csv_guard(csv,
                                                                      &mmdscan_string_free);
    write_text_file(args.out_path, csv);

    if (!args.json_path.empty()) {
        char* text = nullptr;
        check(mmdscan_results_json(results, &text));
        std::unique_ptr<char[], decltype(&mmdscan_string_free)> guard(text,
                                                                      &mmdscan_string_free);
        write_text_file(args.json_path, text);
    }

    json summary;
    summary["seed"] = seed;
    summary["rows"] = mmdscan_results_rows(results);
    summary["out"] = args.out_path;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

struct IntervalsArgs {
    std::size_t dyadic_n = 0;
    std::size_t ext_n = 0;
    std::size_t start = 0;
    std::size_t length = 0;
    int level = 1;
    std::string out_path;
};

int run_intervals(const IntervalsArgs& args, bool dump_dyadic) {
    char* csv = nullptr;
    if (dump_dyadic) {
        check(mmdscan_dyadic_grid_csv(args.dyadic_n, &csv));
    } else {
        check(mmdscan_extensions_csv(args.ext_n, args.start, args.length, args.level, &csv));
    }
    std::unique_ptr<char[], decltype(&mmdscan_string_free)> guard(csv, &mmdscan_string_free);
    emit(csv, args.out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-based scan for an anomalous interval over a line of nodes"};
    app.set_version_flag("--version", std::string("mmdscan ") + mmdscan_version());
    app.require_subcommand(1);

    ScanArgs scan_args;
    auto* scan_cmd = app.add_subcommand(
        "scan", "Scan an observed series against a reference series (exit 3 on alarm)");
    scan_cmd->add_option("--reference", scan_args.reference_path, "Reference series file")
        ->required();
    scan_cmd->add_option("--observed", scan_args.observed_path, "Observed series file")
        ->required();
    scan_cmd->add_option("--kernel", scan_args.kernel, "Kernel kind (gaussian|laplace)")
        ->check(CLI::IsMember({"gaussian", "laplace"}));
    scan_cmd->add_option("--sigma", scan_args.sigma, "Kernel bandwidth")->required();
    scan_cmd->add_option("--imin", scan_args.i_min, "Minimum candidate interval length")
        ->required();
    auto* fixed_opt =
        scan_cmd->add_option("--threshold", scan_args.threshold, "Fixed test threshold");
    auto* known_opt = scan_cmd->add_option("--known-mmd", scan_args.known_mmd,
                                           "Known squared discrepancy");
    auto* delta_opt =
        scan_cmd->add_option("--delta", scan_args.delta, "Back-off for --known-mmd");
    auto* decaying_opt = scan_cmd->add_flag("--decaying", scan_args.decaying,
                                            "Size-decaying threshold schedule");
    fixed_opt->excludes(known_opt)->excludes(decaying_opt);
    known_opt->excludes(decaying_opt)->needs(delta_opt);
    delta_opt->needs(known_opt);
    scan_cmd->add_option("--eta", scan_args.eta, "Slack constant");
    scan_cmd->add_option("--algorithm", scan_args.algorithm, "exhaustive|multiscale")
        ->check(CLI::IsMember({"exhaustive", "multiscale"}));
    scan_cmd->add_option("--tprime", scan_args.t_prime, "Multiscale pre-scan threshold");
    scan_cmd->add_option("--delta-alg", scan_args.delta_alg, "Multiscale cardinality slack");
    scan_cmd->add_option("--levels", scan_args.levels, "Extension level");
    scan_cmd->add_option("--threads", scan_args.threads, "Worker threads (0 = auto)");
    scan_cmd->add_option("--format", scan_args.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    scan_cmd->add_option("--out", scan_args.out_path, "Write output to file");

    MmdArgs mmd_args;
    auto* mmd_cmd = app.add_subcommand("mmd", "Unbiased squared discrepancy of two files");
    mmd_cmd->add_option("--x", mmd_args.x_path, "First sample file")->required();
    mmd_cmd->add_option("--y", mmd_args.y_path, "Second sample file")->required();
    mmd_cmd->add_option("--kernel", mmd_args.kernel, "Kernel kind (gaussian|laplace)")
        ->check(CLI::IsMember({"gaussian", "laplace"}));
    mmd_cmd->add_option("--sigma", mmd_args.sigma, "Kernel bandwidth")->required();
    mmd_cmd->add_option("--threads", mmd_args.threads, "Worker threads (0 = auto)");
    mmd_cmd->add_option("--format", mmd_args.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    mmd_cmd->add_option("--out", mmd_args.out_path, "Write output to file");

    ExperimentArgs experiment_args;
    auto* experiment_cmd =
        app.add_subcommand("experiment", "Run a Monte Carlo error-rate sweep from a plan");
    experiment_cmd->add_option("--plan", experiment_args.plan_path, "Plan file (JSON)")
        ->required();
    experiment_cmd->add_option("--out", experiment_args.out_path, "Results CSV path")
        ->required();
    experiment_cmd->add_option("--json", experiment_args.json_path,
                               "Also write results as JSON");
    auto* seed_opt = experiment_cmd->add_option("--seed", experiment_args.seed,
                                                "Override the plan seed");
    experiment_cmd->add_option("--threads", experiment_args.threads,
                               "Worker threads (0 = auto)");

    IntervalsArgs intervals_args;
    auto* intervals_cmd =
        app.add_subcommand("intervals", "Dump interval structures as CSV");
    auto* dyadic_opt = intervals_cmd->add_option("--dyadic", intervals_args.dyadic_n,
                                                 "Dump the dyadic grid for n nodes");
    auto* ext_opt = intervals_cmd->add_option(
        "--extensions", intervals_args.ext_n, "Dump an extension family over n nodes");
    auto* start_opt =
        intervals_cmd->add_option("--start", intervals_args.start, "Base block start");
    auto* length_opt =
        intervals_cmd->add_option("--length", intervals_args.length, "Base block length");
    intervals_cmd->add_option("--level", intervals_args.level, "Extension level");
    intervals_cmd->add_option("--out", intervals_args.out_path, "Write output to file");
    dyadic_opt->excludes(ext_opt);
    ext_opt->needs(start_opt)->needs(length_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (scan_cmd->parsed()) {
            const bool fixed = fixed_opt->count() > 0;
            const bool known = known_opt->count() > 0;
            const bool decaying = decaying_opt->count() > 0;
            if (static_cast<int>(fixed) + static_cast<int>(known) +
                    static_cast<int>(decaying) !=
                1) {
                std::cerr << "scan needs exactly one of --threshold, --known-mmd "
                             "(+ --delta), --decaying\n";
                return kExitUsage;
            }
            return run_scan(scan_args, fixed, known);
        }
        if (mmd_cmd->parsed()) return run_mmd(mmd_args);
        if (experiment_cmd->parsed()) {
            experiment_args.seed_given = seed_opt->count() > 0;
            return run_experiment(experiment_args);
        }
        if (intervals_cmd->parsed()) {
            const bool dyadic = dyadic_opt->count() > 0;
            if (dyadic == (ext_opt->count() > 0)) {
                std::cerr << "intervals needs exactly one of --dyadic or --extensions\n";
                return kExitUsage;
            }
            return run_intervals(intervals_args, dyadic);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
