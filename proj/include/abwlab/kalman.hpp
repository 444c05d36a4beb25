#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "abwlab/core.hpp"

namespace abw::kalman {

/// Two-state filter over [alpha, beta] = [1/C, (lambda-C)/C]. The state
/// transition is the identity; process noise is Q = lambda_tuning * I.
struct KalmanState {
    Eigen::Vector2d x;        // [alpha (1/Mbps), beta]
    Eigen::Matrix2d P;        // covariance, kept symmetric PSD
    double lambda_tuning;     // process-noise scale

    /// Prior: capacity guess = top probe rate, cross-traffic guess = half of it.
    static KalmanState initial(RateMbps top_rate, double lambda_tuning = 1e-2);

    double alpha() const { return x(0); }
    double beta() const { return x(1); }
    double capacity_mbps() const;    // 1/alpha, requires alpha > 0
    double cross_rate_mbps() const;  // (beta+1)/alpha, requires alpha > 0
};

/// Gated multi-rate strain measurement: one row per train.
struct StrainObservation {
    StrainObservation(std::vector<double> rates_mbps, std::vector<double> strains,
                      std::vector<double> noise_variances);

    std::size_t size() const { return rates_mbps.size(); }

    std::vector<double> rates_mbps;       // rows of H
    std::vector<double> strains;          // z
    std::vector<double> noise_variances;  // diagonal of R
};

/// Inter-packet strain xi = r_in / r_out - 1.
double strain(const TrainMeasurement& measurement);

/// Variance of the train-mean strain, estimated from the per-gap strains of
/// one train: sample variance of {g_out_j / g_in - 1} over the n-1 gaps,
/// divided by n-1. Floored at 1e-12. Needs n >= 3.
double per_train_noise_variance(const TrainMeasurement& measurement);

/// One predict/update cycle. The diagonal R lets rows be conditioned one at
/// a time, which equals the batch gain P*H'*(H*P*H'+R)^-1 without forming
/// the m-by-m innovation matrix. A non-positive innovation variance is
/// regularized once by +1e-12 and then reported as NumericalDegeneracy.
void kalman_step(KalmanState& state, const StrainObservation& observation);

/// Keep trains probing above the current estimate; if fewer than two
/// survive, fall back to the two highest rates (two unknowns need two rates).
StrainObservation gate_observations(std::span<const TrainMeasurement> trains,
                                    RateMbps current_estimate);

/// A = -beta/alpha, clamped to [0, top_rate]. NotIdentified while alpha <= 0.
RateMbps available_bandwidth(const KalmanState& state, RateMbps top_rate);

struct StreamRecord {
    int step;            // 1-based stream index
    double mean_strain;  // mean over the gated rows
    RateMbps estimate;
};

/// Driver for the direct-probing baseline: each call consumes one multi-rate
/// stream (one train per grid rate), gates it, updates the filter, and
/// refreshes the estimate. A transient alpha <= 0 keeps the previous value.
class DirectProbingEstimator {
public:
    explicit DirectProbingEstimator(const ActionGrid& grid, double lambda_tuning = 1e-2);

    StreamRecord consume_stream(std::span<const TrainMeasurement> trains);

    RateMbps estimate() const { return estimate_; }
    const KalmanState& state() const { return state_; }

private:
    KalmanState state_;
    RateMbps top_rate_;
    RateMbps estimate_;
    int streams_consumed_ = 0;
};

}  // namespace abw::kalman
