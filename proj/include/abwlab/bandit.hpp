#pragma once

#include <vector>

#include "abwlab/core.hpp"
#include "abwlab/probe_source.hpp"
#include "abwlab/rng.hpp"

namespace abw::bandit {

struct BanditConfig {
    BanditConfig(ActionGrid grid, double epsilon = 0.1, double gamma = 0.3);

    ActionGrid grid;
    double epsilon;  // exploration rate, in [0, 1]
    double gamma;    // convergence parameter, in (0, 1)
};

/// Sample-average action values over the probe-rate grid, plus the
/// exploration stream. One state belongs to one episode.
class BanditState {
public:
    BanditState(int action_count, RngStream explore_rng);

    int action_count() const { return static_cast<int>(count_.size()); }
    int step() const { return step_; }
    int count(int action) const;
    double reward_sum(int action) const;

    /// Q(a) = reward_sum / count; requires the action sampled at least once.
    double q_value(int action) const;

    bool initialized() const;  // every action sampled >= 1 time

    /// Argmax of Q over sampled actions, ties toward the lower rate.
    int greedy_action() const;

    void record(int action, double reward_value);

    RngStream& explore_rng() { return rng_; }

private:
    std::vector<double> reward_sum_;
    std::vector<int> count_;
    int step_ = 0;
    RngStream rng_;
};

/// Probe reward r_out * r_in^(gamma-1), rates in Mbps.
double reward(const TrainMeasurement& measurement, double gamma);

/// Greedy action with probability 1-epsilon, otherwise a uniform draw over
/// the other k-1 actions. Requires a fully initialized state.
int select_action(BanditState& state, const BanditConfig& config);

/// Record one observed reward; Q updates lazily as sum/count.
void update(BanditState& state, int action, double reward_value);

/// Estimator readout: the rate whose Q is maximal. NotReady until every
/// action has been sampled.
RateMbps current_estimate(const BanditState& state, const ActionGrid& grid);

struct StepRecord {
    int step;  // 1-based
    RateMbps chosen_rate;
    RateMbps output_rate;
    double reward;
    RateMbps estimate;
};

/// One bandit episode: steps 1..k prime every action once in ascending rate
/// order, then epsilon-greedy takes over. One probe train per step.
std::vector<StepRecord> run_episode(MeasurementSource& source,
                                    const BanditConfig& config, int steps,
                                    RngStream explore_rng);

}  // namespace abw::bandit
