#include "abwlab/bandit.hpp"

#include <cmath>

namespace abw::bandit {

BanditConfig::BanditConfig(ActionGrid grid_in, double epsilon_in, double gamma_in)
    : grid(grid_in), epsilon(epsilon_in), gamma(gamma_in) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw InvalidArgument("BanditConfig: epsilon must lie in [0, 1]");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidArgument("BanditConfig: gamma must lie in (0, 1)");
}

BanditState::BanditState(int action_count, RngStream explore_rng)
    : reward_sum_(static_cast<std::size_t>(action_count), 0.0),
      count_(static_cast<std::size_t>(action_count), 0),
      rng_(explore_rng) {
    if (action_count < 2)
        throw InvalidArgument("BanditState: need at least 2 actions");
}

int BanditState::count(int action) const {
    if (action < 0 || action >= action_count())
        throw InvalidArgument("BanditState: action index out of range");
    return count_[static_cast<std::size_t>(action)];
}

double BanditState::reward_sum(int action) const {
    if (action < 0 || action >= action_count())
        throw InvalidArgument("BanditState: action index out of range");
    return reward_sum_[static_cast<std::size_t>(action)];
}

double BanditState::q_value(int action) const {
    if (count(action) == 0)
        throw NotReady("BanditState: Q undefined for an unsampled action");
    return reward_sum_[static_cast<std::size_t>(action)] /
           static_cast<double>(count_[static_cast<std::size_t>(action)]);
}

bool BanditState::initialized() const {
    for (int c : count_)
        if (c == 0) return false;
    return true;
}

int BanditState::greedy_action() const {
    int best = -1;
    double best_q = 0.0;
    for (int a = 0; a < action_count(); ++a) {
        if (count_[static_cast<std::size_t>(a)] == 0) continue;
        const double q = q_value(a);
        if (best < 0 || q > best_q) {  // strict: ties keep the lower rate
            best = a;
            best_q = q;
        }
    }
    if (best < 0) throw NotReady("BanditState: no action sampled yet");
    return best;
}

void BanditState::record(int action, double reward_value) {
    if (action < 0 || action >= action_count())
        throw InvalidArgument("BanditState: action index out of range");
    reward_sum_[static_cast<std::size_t>(action)] += reward_value;
    count_[static_cast<std::size_t>(action)] += 1;
    step_ += 1;
}

double reward(const TrainMeasurement& measurement, double gamma) {
    return measurement.output_rate().mbps() *
           std::pow(measurement.input_rate().mbps(), gamma - 1.0);
}

int select_action(BanditState& state, const BanditConfig& config) {
    if (!state.initialized())
        throw NotReady("select_action: initialization pass incomplete");
    const int greedy = state.greedy_action();
    if (config.epsilon > 0.0 && state.explore_rng().next_unit() < config.epsilon) {
        // uniform over the k-1 non-greedy actions
        const auto k = static_cast<std::uint64_t>(state.action_count());
        const auto draw = static_cast<int>(state.explore_rng().next_below(k - 1));
        return draw < greedy ? draw : draw + 1;
    }
    return greedy;
}

void update(BanditState& state, int action, double reward_value) {
    state.record(action, reward_value);
}

RateMbps current_estimate(const BanditState& state, const ActionGrid& grid) {
    if (!state.initialized())
        throw NotReady("current_estimate: initialization pass incomplete");
    return grid.rate(state.greedy_action());
}

std::vector<StepRecord> run_episode(MeasurementSource& source,
                                    const BanditConfig& config, int steps,
                                    RngStream explore_rng) {
    const int k = config.grid.count();
    if (steps < k)
        throw InvalidArgument("run_episode: steps must cover the initialization pass");

    BanditState state(k, explore_rng);
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(steps));

    for (int step = 1; step <= steps; ++step) {
        const int action = step <= k ? step - 1 : select_action(state, config);
        const TrainMeasurement measurement = source.probe(config.grid.rate(action));
        const double rho = reward(measurement, config.gamma);
        update(state, action, rho);
        records.push_back({step, config.grid.rate(action), measurement.output_rate(),
                           rho, config.grid.rate(state.greedy_action())});
    }
    return records;
}

}  // namespace abw::bandit
