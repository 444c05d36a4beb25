#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abwlab/bandit.hpp"
#include "abwlab/kalman.hpp"
#include "abwlab/netsim.hpp"

namespace abw::harness {

enum class Method { kBandit, kKalman };

std::string_view method_name(Method m);  // "BANDIT" / "KALMAN"

/// Full experiment description. Round-trips through JSON with these field
/// names; unknown keys are rejected.
struct ScenarioConfig {
    std::string name;
    std::vector<netsim::SimLink> path;

    std::int64_t probe_packet_size_bits = kDefaultPacketBits;
    int probe_packet_count = 100;  // n

    double grid_increment_mbps = 5.0;  // delta_r
    int grid_count = 20;               // k

    double epsilon = 0.1;
    double gamma = 0.3;
    double kalman_lambda = 1e-2;  // process-noise scale

    int steps = 1000;         // bandit steps (one train each)
    int kalman_streams = 200;  // filter iterations (k trains each)
    int repetitions = 50;     // K_r
    Seed master_seed{1};
    double timestamp_jitter_sd = 0.0;

    ActionGrid grid() const;
    netsim::PathModel path_model() const;
    bandit::BanditConfig bandit_config() const;
    double true_available_mbps() const;
    ProbeTrainSpec probe_spec(RateMbps rate) const;

    void validate() const;  // throws ConfigError
};

/// Per-step record of one episode, unified across methods. A Kalman step
/// stands for a whole multi-rate stream, so its probe cost is k trains.
struct RunRecord {
    int step;
    Method method;
    RateMbps chosen_rate;          // bandit: the chosen action; kalman: top gated rate
    RateMbps output_rate;          // bandit only; 0 for kalman streams
    double reward_or_strain;       // bandit: reward; kalman: mean gated strain
    RateMbps estimate;
    std::int64_t probe_bits_sent;  // this step's probe load
};

struct StepAggregate {
    int step;
    double mean_estimate_mbps;
    double sd_mbps;  // deviation around the true available bandwidth
    double mean_reward;
    std::int64_t probe_bits_cum;
};

struct MethodSeries {
    std::vector<StepAggregate> per_step;
    std::vector<double> final_estimates_mbps;  // one per episode
};

struct ScenarioResult {
    ScenarioConfig config;
    double true_available_mbps = 0.0;
    std::optional<MethodSeries> bandit;
    std::optional<MethodSeries> kalman;
};

/// Precision metric: root mean square deviation of the estimates around the
/// true value, with K_r - 1 in the denominator.
double sd_metric(std::span<const double> estimates_mbps, double true_value_mbps);

/// One full episode with the scenario's derived seeds. Cross-traffic
/// streams depend on (seed, episode, train, link) only, never on the method.
std::vector<RunRecord> run_method_episode(const ScenarioConfig& config,
                                          Method method, int episode_index);

/// All repetitions of both (or one) method, aggregated per step index.
/// max_workers 0 means use all hardware threads.
ScenarioResult run_scenario(const ScenarioConfig& config, bool run_bandit = true,
                            bool run_kalman = true, int max_workers = 0);

std::vector<ScenarioConfig> scenario_catalog();
ScenarioConfig find_scenario(std::string_view name);  // ConfigError if unknown

enum class OutputFormat { kCsv, kJson };

/// Writes the per-step table, a summary JSON, and (CSV mode) a plot-ready
/// curve file into out_dir. Returns the paths written.
std::vector<std::filesystem::path> emit_results(const ScenarioResult& result,
                                                OutputFormat format,
                                                const std::filesystem::path& out_dir);

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);
ScenarioConfig load_scenario_file(const std::filesystem::path& file);

}  // namespace abw::harness
