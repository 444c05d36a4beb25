// abwlab: available-bandwidth estimation laboratory.
//
// Simulates FIFO-multiplexed paths with bursty cross-traffic, probes them
// with packet trains, and compares an epsilon-greedy bandit estimator with
// a Kalman-filter direct-probing baseline.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abwlab/fluid.hpp"
#include "abwlab/harness.hpp"
#include "abwlab/kalman.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitRuntimeFailure = 3;

struct CommonOptions {
    std::string scenario;
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<int> steps;
    std::optional<int> kalman_streams;
    std::string out_dir = ".";
    std::string format = "csv";
    bool full = false;
};

void add_scenario_options(CLI::App* cmd, CommonOptions& opt, bool with_run_knobs) {
    cmd->add_option("--scenario", opt.scenario, "Preset scenario name (see `catalog`)");
    cmd->add_option("--config", opt.config_file, "Scenario config JSON file");
    if (with_run_knobs) {
        cmd->add_option("--seed", opt.seed, "Master seed (ABWLAB_SEED overrides)");
        cmd->add_option("--reps", opt.reps, "Number of repeated experiments (K_r)");
        cmd->add_option("--steps", opt.steps, "Bandit steps per episode");
        cmd->add_option("--kalman-streams", opt.kalman_streams,
                        "Kalman multi-rate streams per episode");
        cmd->add_flag("--full", opt.full, "Full-scale run: 1000 repetitions");
        cmd->add_option("--format", opt.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_option("--out", opt.out_dir, "Output directory")
        ->capture_default_str();
}

abw::harness::ScenarioConfig resolve_scenario(const CommonOptions& opt) {
    if (opt.scenario.empty() == opt.config_file.empty())
        throw abw::ConfigError("exactly one of --scenario or --config is required");
    abw::harness::ScenarioConfig config =
        opt.scenario.empty() ? abw::harness::load_scenario_file(opt.config_file)
                             : abw::harness::find_scenario(opt.scenario);

    if (opt.reps) config.repetitions = *opt.reps;
    else if (opt.full) config.repetitions = 1000;
    if (opt.steps) config.steps = *opt.steps;
    if (opt.kalman_streams) config.kalman_streams = *opt.kalman_streams;
    if (opt.seed) config.master_seed.value = *opt.seed;
    if (const char* env = std::getenv("ABWLAB_SEED")) {
        try {
            config.master_seed.value = std::stoull(env);
        } catch (const std::exception&) {
            throw abw::ConfigError("ABWLAB_SEED is not an unsigned integer: " +
                                   std::string(env));
        }
    }
    config.validate();
    return config;
}

abw::harness::OutputFormat parse_format(const std::string& format) {
    return format == "json" ? abw::harness::OutputFormat::kJson
                            : abw::harness::OutputFormat::kCsv;
}

void print_method_line(const char* label, const abw::harness::MethodSeries& series,
                       double true_a) {
    const auto& last = series.per_step.back();
    std::printf("  %-7s final mean = %7.3f Mbps  error = %+7.3f  SD = %6.3f  (step %d)\n",
                label, last.mean_estimate_mbps, last.mean_estimate_mbps - true_a,
                last.sd_mbps, last.step);
}

int cmd_catalog() {
    std::printf("%-20s %5s %10s %8s %7s %6s %6s\n", "name", "hops", "traffic",
                "lambda", "true_A", "gamma", "eps");
    for (const auto& c : abw::harness::scenario_catalog()) {
        const auto& first = c.path.front().cross_traffic();
        const char* kind = first.kind() == abw::netsim::CrossKind::kCbr ? "CBR"
                           : first.kind() == abw::netsim::CrossKind::kExponential
                               ? "EXP"
                               : "PARETO";
        std::printf("%-20s %5zu %10s %8.1f %7.1f %6.2f %6.2f\n", c.name.c_str(),
                    c.path.size(), kind, first.mean_rate().mbps(),
                    c.true_available_mbps(), c.gamma, c.epsilon);
    }
    return kExitOk;
}

int cmd_fluid_curve(const CommonOptions& opt, int points) {
    const auto config = resolve_scenario(opt);
    std::vector<abw::fluid::FluidLink> links;
    for (const auto& link : config.path)
        links.emplace_back(link.capacity(), link.cross_traffic().mean_rate());

    const double top = config.grid().top_rate().mbps();
    std::ostringstream csv;
    csv << "r_in_mbps,r_out_mbps,strain\n";
    char buf[128];
    for (int i = 1; i <= points; ++i) {
        const abw::RateMbps r_in(top * static_cast<double>(i) / points);
        const abw::RateMbps r_out = abw::fluid::path_rate_response(links, r_in);
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", r_in.mbps(),
                      r_out.mbps(), r_in.mbps() / r_out.mbps() - 1.0);
        csv << buf;
    }
    const auto file = std::filesystem::path(opt.out_dir) /
                      (config.name.empty() ? "fluid_curve.csv"
                                           : config.name + "_fluid_curve.csv");
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw abw::IoError("cannot write " + file.string());
    out << csv.str();
    std::printf("wrote %s\n", file.string().c_str());
    return kExitOk;
}

int cmd_run(const CommonOptions& opt, bool print_comparison) {
    const auto config = resolve_scenario(opt);
    std::printf("scenario %s: %d reps, %d bandit steps, %d kalman streams, seed %llu\n",
                config.name.c_str(), config.repetitions, config.steps,
                config.kalman_streams,
                static_cast<unsigned long long>(config.master_seed.value));
    const auto result = abw::harness::run_scenario(config);
    const auto files =
        abw::harness::emit_results(result, parse_format(opt.format), opt.out_dir);

    if (print_comparison) {
        std::printf("true available bandwidth: %.3f Mbps\n", result.true_available_mbps);
        if (result.bandit)
            print_method_line("bandit", *result.bandit, result.true_available_mbps);
        if (result.kalman)
            print_method_line("kalman", *result.kalman, result.true_available_mbps);
    }
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"abwlab: packet-train available-bandwidth estimation lab"};
    app.require_subcommand(1);

    CommonOptions run_opt, cmp_opt, curve_opt;
    int curve_points = 400;

    CLI::App* catalog_cmd = app.add_subcommand("catalog", "List preset scenarios");
    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and emit results");
    add_scenario_options(run_cmd, run_opt, true);
    CLI::App* cmp_cmd = app.add_subcommand(
        "compare", "Run both estimators on one scenario and summarize");
    add_scenario_options(cmp_cmd, cmp_opt, true);
    CLI::App* curve_cmd = app.add_subcommand(
        "fluid-curve", "Emit the fluid rate-response and strain curves for a path");
    add_scenario_options(curve_cmd, curve_opt, false);
    curve_cmd->add_option("--points", curve_points, "Samples along the rate axis")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        if (catalog_cmd->parsed()) return cmd_catalog();
        if (run_cmd->parsed()) return cmd_run(run_opt, false);
        if (cmp_cmd->parsed()) return cmd_run(cmp_opt, true);
        if (curve_cmd->parsed()) return cmd_fluid_curve(curve_opt, curve_points);
    } catch (const abw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitOk;
}
