#include "abwlab/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abw::kalman {

namespace {
constexpr double kNoiseFloor = 1e-12;
constexpr double kRegularizer = 1e-12;
}  // namespace

KalmanState KalmanState::initial(RateMbps top_rate, double lambda_tuning) {
    if (!(top_rate.mbps() > 0.0))
        throw InvalidArgument("KalmanState: top rate must be positive");
    if (lambda_tuning < 0.0)
        throw InvalidArgument("KalmanState: process-noise scale must be >= 0");
    KalmanState s;
    s.x << 1.0 / top_rate.mbps(), -0.5;
    s.P = Eigen::Matrix2d::Identity() * 10.0;
    s.lambda_tuning = lambda_tuning;
    return s;
}

double KalmanState::capacity_mbps() const {
    if (!(alpha() > 0.0))
        throw NotIdentified("KalmanState: capacity undefined while alpha <= 0");
    return 1.0 / alpha();
}

double KalmanState::cross_rate_mbps() const {
    if (!(alpha() > 0.0))
        throw NotIdentified("KalmanState: cross rate undefined while alpha <= 0");
    return (beta() + 1.0) / alpha();
}

StrainObservation::StrainObservation(std::vector<double> rates_in,
                                     std::vector<double> strains_in,
                                     std::vector<double> noise_in)
    : rates_mbps(std::move(rates_in)),
      strains(std::move(strains_in)),
      noise_variances(std::move(noise_in)) {
    if (rates_mbps.empty())
        throw InvalidArgument("StrainObservation: need at least one row");
    if (strains.size() != rates_mbps.size() || noise_variances.size() != rates_mbps.size())
        throw InvalidArgument("StrainObservation: row count mismatch");
    for (std::size_t i = 0; i < rates_mbps.size(); ++i) {
        if (!std::isfinite(strains[i]))
            throw InvalidArgument("StrainObservation: strain must be finite");
        if (!(noise_variances[i] > 0.0))
            throw InvalidArgument("StrainObservation: noise variance must be > 0");
    }
}

double strain(const TrainMeasurement& measurement) {
    const double r_out = measurement.output_rate().mbps();
    if (!(r_out > 0.0))
        throw InvalidMeasurement("strain: output rate must be positive");
    return measurement.input_rate().mbps() / r_out - 1.0;
}

double per_train_noise_variance(const TrainMeasurement& measurement) {
    const int n = measurement.spec().packet_count();
    if (n < 3)
        throw InsufficientData("per_train_noise_variance: need n >= 3 packets");
    const double gap_in = measurement.spec().input_gap_seconds();
    const auto& gaps = measurement.output_gaps();

    double mean = 0.0;
    for (double g : gaps) mean += g / gap_in - 1.0;
    mean /= static_cast<double>(gaps.size());

    double ss = 0.0;
    for (double g : gaps) {
        const double d = g / gap_in - 1.0 - mean;
        ss += d * d;
    }
    const double sample_var = ss / static_cast<double>(gaps.size() - 1);
    return std::max(sample_var / static_cast<double>(n - 1), kNoiseFloor);
}

void kalman_step(KalmanState& state, const StrainObservation& observation) {
    // predict: A = I, Q = lambda * I
    state.P += state.lambda_tuning * Eigen::Matrix2d::Identity();

    for (std::size_t i = 0; i < observation.size(); ++i) {
        const Eigen::Vector2d h(observation.rates_mbps[i], 1.0);
        double innovation_var = h.dot(state.P * h) + observation.noise_variances[i];
        if (!(innovation_var > 0.0) || !std::isfinite(innovation_var)) {
            innovation_var += kRegularizer;
            if (!(innovation_var > 0.0) || !std::isfinite(innovation_var))
                throw NumericalDegeneracy(
                    "kalman_step: innovation covariance singular after regularization");
        }
        const Eigen::Vector2d gain = state.P * h / innovation_var;
        state.x += gain * (observation.strains[i] - h.dot(state.x));
        // Joseph form keeps P symmetric PSD under roundoff
        const Eigen::Matrix2d ikh =
            Eigen::Matrix2d::Identity() - gain * h.transpose();
        state.P = ikh * state.P * ikh.transpose() +
                  gain * gain.transpose() * observation.noise_variances[i];
        state.P = 0.5 * (state.P + state.P.transpose()).eval();
    }
}

StrainObservation gate_observations(std::span<const TrainMeasurement> trains,
                                    RateMbps current_estimate) {
    if (trains.size() < 2)
        throw InsufficientData("gate_observations: need at least 2 trains");

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < trains.size(); ++i)
        if (trains[i].input_rate().mbps() > current_estimate.mbps()) kept.push_back(i);

    if (kept.size() < 2) {
        // two unknowns need two distinct rates: take the two fastest trains
        std::vector<std::size_t> order(trains.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return trains[a].input_rate().mbps() > trains[b].input_rate().mbps();
        });
        kept.assign(order.begin(), order.begin() + 2);
        std::sort(kept.begin(), kept.end());
    }

    std::vector<double> rates, strains, noise;
    rates.reserve(kept.size());
    strains.reserve(kept.size());
    noise.reserve(kept.size());
    for (std::size_t i : kept) {
        rates.push_back(trains[i].input_rate().mbps());
        strains.push_back(strain(trains[i]));
        noise.push_back(per_train_noise_variance(trains[i]));
    }
    return StrainObservation(std::move(rates), std::move(strains), std::move(noise));
}

RateMbps available_bandwidth(const KalmanState& state, RateMbps top_rate) {
    if (!(state.alpha() > 0.0))
        throw NotIdentified("available_bandwidth: alpha <= 0, state not identified");
    const double raw = -state.beta() / state.alpha();
    return RateMbps(std::clamp(raw, 0.0, top_rate.mbps()));
}

DirectProbingEstimator::DirectProbingEstimator(const ActionGrid& grid,
                                               double lambda_tuning)
    : state_(KalmanState::initial(grid.top_rate(), lambda_tuning)),
      top_rate_(grid.top_rate()),
      estimate_(available_bandwidth(state_, top_rate_)) {}

StreamRecord DirectProbingEstimator::consume_stream(
    std::span<const TrainMeasurement> trains) {
    const StrainObservation obs = gate_observations(trains, estimate_);
    kalman_step(state_, obs);
    try {
        estimate_ = available_bandwidth(state_, top_rate_);
    } catch (const NotIdentified&) {
        // transient; keep the previous estimate and let P shrink
    }
    const double mean_strain =
        std::accumulate(obs.strains.begin(), obs.strains.end(), 0.0) /
        static_cast<double>(obs.size());
    return StreamRecord{++streams_consumed_, mean_strain, estimate_};
}

}  // namespace abw::kalman
