#include "abwlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "abwlab/probe_source.hpp"

namespace abw::harness {

std::string_view method_name(Method m) {
    return m == Method::kBandit ? "BANDIT" : "KALMAN";
}

ActionGrid ScenarioConfig::grid() const {
    return ActionGrid(RateMbps(grid_increment_mbps), grid_count);
}

netsim::PathModel ScenarioConfig::path_model() const {
    return netsim::PathModel(path);
}

bandit::BanditConfig ScenarioConfig::bandit_config() const {
    return bandit::BanditConfig(grid(), epsilon, gamma);
}

double ScenarioConfig::true_available_mbps() const {
    return path_model().available_bandwidth().mbps();
}

ProbeTrainSpec ScenarioConfig::probe_spec(RateMbps rate) const {
    return ProbeTrainSpec(rate, probe_packet_size_bits, probe_packet_count);
}

void ScenarioConfig::validate() const {
    try {
        grid();
        path_model();
        bandit_config();
        if (probe_packet_count < 2)
            throw InvalidArgument("probe packet_count must be >= 2");
        if (probe_packet_size_bits <= 0)
            throw InvalidArgument("probe packet_size_bits must be positive");
        if (steps < grid_count)
            throw InvalidArgument("steps must be >= grid count (initialization pass)");
        if (kalman_streams < 1) throw InvalidArgument("kalman_streams must be >= 1");
        if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
        if (kalman_lambda < 0.0) throw InvalidArgument("kalman lambda must be >= 0");
        if (timestamp_jitter_sd < 0.0)
            throw InvalidArgument("timestamp_jitter_sd must be >= 0");
    } catch (const Error& e) {
        throw ConfigError("scenario '" + name + "': " + e.what());
    }
}

double sd_metric(std::span<const double> estimates_mbps, double true_value_mbps) {
    if (estimates_mbps.size() < 2)
        throw InsufficientData("sd_metric: need at least 2 estimates");
    double ss = 0.0;
    for (double e : estimates_mbps) {
        const double d = e - true_value_mbps;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(estimates_mbps.size() - 1));
}

namespace {

/// Seed fan-out. The network stream depends on (seed, episode) only, so
/// both methods read identically-seeded cross-traffic; the bandit's
/// exploration draws come from a separate component stream.
RngStream network_stream(const ScenarioConfig& config, int episode_index) {
    return RngStream(config.master_seed)
        .child("net")
        .child(static_cast<std::uint64_t>(episode_index));
}

RngStream exploration_stream(const ScenarioConfig& config, int episode_index) {
    return RngStream(config.master_seed)
        .child("explore")
        .child(static_cast<std::uint64_t>(episode_index));
}

SimulatedPathSource make_source(const ScenarioConfig& config, int episode_index) {
    netsim::SimOptions options;
    options.timestamp_jitter_sd = config.timestamp_jitter_sd;
    return SimulatedPathSource(config.path_model(), network_stream(config, episode_index),
                               config.probe_packet_size_bits, config.probe_packet_count,
                               options);
}

std::vector<RunRecord> run_bandit_episode(const ScenarioConfig& config,
                                          int episode_index) {
    SimulatedPathSource source = make_source(config, episode_index);
    const auto records = bandit::run_episode(source, config.bandit_config(),
                                             config.steps,
                                             exploration_stream(config, episode_index));
    const std::int64_t bits_per_step =
        static_cast<std::int64_t>(config.probe_packet_count) *
        config.probe_packet_size_bits;
    std::vector<RunRecord> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back({r.step, Method::kBandit, r.chosen_rate, r.output_rate, r.reward,
                       r.estimate, bits_per_step});
    return out;
}

std::vector<RunRecord> run_kalman_episode(const ScenarioConfig& config,
                                          int episode_index) {
    SimulatedPathSource source = make_source(config, episode_index);
    const ActionGrid grid = config.grid();
    kalman::DirectProbingEstimator estimator(grid, config.kalman_lambda);
    const std::int64_t bits_per_stream =
        static_cast<std::int64_t>(grid.count()) *
        static_cast<std::int64_t>(config.probe_packet_count) *
        config.probe_packet_size_bits;

    std::vector<RunRecord> out;
    out.reserve(static_cast<std::size_t>(config.kalman_streams));
    std::vector<TrainMeasurement> trains;
    for (int s = 1; s <= config.kalman_streams; ++s) {
        trains.clear();
        trains.reserve(static_cast<std::size_t>(grid.count()));
        for (int a = 0; a < grid.count(); ++a)
            trains.push_back(source.probe(grid.rate(a)));
        const kalman::StreamRecord rec = estimator.consume_stream(trains);
        out.push_back({s, Method::kKalman, grid.top_rate(), RateMbps(0.0),
                       rec.mean_strain, rec.estimate, bits_per_stream});
    }
    return out;
}

MethodSeries aggregate(const std::vector<std::vector<RunRecord>>& episodes,
                       double true_available) {
    MethodSeries series;
    if (episodes.empty()) return series;
    const std::size_t n_steps = episodes.front().size();
    series.per_step.reserve(n_steps);

    std::vector<double> estimates(episodes.size());
    std::int64_t bits_cum = 0;
    for (std::size_t s = 0; s < n_steps; ++s) {
        double est_sum = 0.0;
        double reward_sum = 0.0;
        for (std::size_t e = 0; e < episodes.size(); ++e) {
            const RunRecord& r = episodes[e][s];
            estimates[e] = r.estimate.mbps();
            est_sum += r.estimate.mbps();
            reward_sum += r.reward_or_strain;
        }
        bits_cum += episodes.front()[s].probe_bits_sent;
        const double n = static_cast<double>(episodes.size());
        const double sd = episodes.size() >= 2 ? sd_metric(estimates, true_available) : 0.0;
        series.per_step.push_back({episodes.front()[s].step, est_sum / n, sd,
                                   reward_sum / n, bits_cum});
    }
    series.final_estimates_mbps = estimates;
    return series;
}

/// Run fn(0..count-1) on a small worker pool; results land in index order.
template <typename Fn>
void parallel_for(int count, int max_workers, Fn&& fn) {
    int workers = max_workers > 0 ? max_workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<RunRecord> run_method_episode(const ScenarioConfig& config, Method method,
                                          int episode_index) {
    config.validate();
    try {
        return method == Method::kBandit ? run_bandit_episode(config, episode_index)
                                         : run_kalman_episode(config, episode_index);
    } catch (const Error& e) {
        throw Error("scenario '" + config.name + "', " +
                    std::string(method_name(method)) + " episode " +
                    std::to_string(episode_index) + ": " + e.what());
    }
}

ScenarioResult run_scenario(const ScenarioConfig& config, bool run_bandit,
                            bool run_kalman, int max_workers) {
    config.validate();
    ScenarioResult result;
    result.config = config;
    result.true_available_mbps = config.true_available_mbps();

    struct Job {
        Method method;
        int episode;
    };
    std::vector<Job> jobs;
    for (int e = 0; e < config.repetitions; ++e) {
        if (run_bandit) jobs.push_back({Method::kBandit, e});
        if (run_kalman) jobs.push_back({Method::kKalman, e});
    }

    std::vector<std::vector<RunRecord>> bandit_eps(
        run_bandit ? static_cast<std::size_t>(config.repetitions) : 0);
    std::vector<std::vector<RunRecord>> kalman_eps(
        run_kalman ? static_cast<std::size_t>(config.repetitions) : 0);

    parallel_for(static_cast<int>(jobs.size()), max_workers, [&](int j) {
        const Job& job = jobs[static_cast<std::size_t>(j)];
        auto records = run_method_episode(config, job.method, job.episode);
        auto& slot = job.method == Method::kBandit
                         ? bandit_eps[static_cast<std::size_t>(job.episode)]
                         : kalman_eps[static_cast<std::size_t>(job.episode)];
        slot = std::move(records);
    });

    if (run_bandit) result.bandit = aggregate(bandit_eps, result.true_available_mbps);
    if (run_kalman) result.kalman = aggregate(kalman_eps, result.true_available_mbps);
    return result;
}

std::vector<ScenarioConfig> scenario_catalog() {
    using netsim::CrossTrafficModel;
    using netsim::SimLink;

    std::vector<ScenarioConfig> catalog;
    auto base = [] {
        ScenarioConfig c;
        c.steps = 1000;
        c.kalman_streams = 200;
        c.repetitions = 50;
        return c;
    };

    {
        ScenarioConfig c = base();
        c.name = "burstiness-cbr";
        c.path = {SimLink(RateMbps(100.0), CrossTrafficModel::cbr(RateMbps(50.0)))};
        catalog.push_back(c);
    }
    {
        ScenarioConfig c = base();
        c.name = "burstiness-exp";
        c.path = {SimLink(RateMbps(100.0), CrossTrafficModel::exponential(RateMbps(50.0)))};
        catalog.push_back(c);
    }
    {
        ScenarioConfig c = base();
        c.name = "burstiness-pareto";
        c.path = {SimLink(RateMbps(100.0), CrossTrafficModel::pareto(RateMbps(50.0), 1.5))};
        catalog.push_back(c);
    }
    for (double lambda : {25.0, 50.0, 75.0}) {
        ScenarioConfig c = base();
        c.name = "intensity-" + std::to_string(static_cast<int>(lambda));
        c.path = {SimLink(RateMbps(100.0), CrossTrafficModel::exponential(RateMbps(lambda)))};
        // gamma must stay below 1 - lambda/C; 0.3 is too large at lambda = 75
        if (lambda >= 75.0) c.gamma = 0.2;
        catalog.push_back(c);
    }
    for (int hops = 1; hops <= 4; ++hops) {
        ScenarioConfig c = base();
        c.name = "multihop-" + std::to_string(hops);
        c.path.assign(static_cast<std::size_t>(hops),
                      SimLink(RateMbps(100.0), CrossTrafficModel::exponential(RateMbps(50.0))));
        catalog.push_back(c);
    }
    {
        const SimLink bottleneck(RateMbps(50.0), CrossTrafficModel::cbr(RateMbps(12.5)));
        const SimLink tight(RateMbps(100.0), CrossTrafficModel::cbr(RateMbps(75.0)));
        ScenarioConfig c = base();
        c.name = "tightbottleneck-I";  // bottleneck ahead of the tight link
        c.path = {bottleneck, tight};
        c.gamma = 0.2;  // end-to-end bound is 1 - 75/100 = 0.25
        catalog.push_back(c);
        c.name = "tightbottleneck-II";
        c.path = {tight, bottleneck};
        catalog.push_back(c);
    }
    return catalog;
}

ScenarioConfig find_scenario(std::string_view name) {
    for (ScenarioConfig& c : scenario_catalog())
        if (c.name == name) return c;
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "'; run the catalog command for the list");
}

}  // namespace abw::harness
