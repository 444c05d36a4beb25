#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "abwlab/kalman.hpp"
#include "abwlab/probe_source.hpp"

using namespace abw;
using namespace abw::kalman;

namespace {

const ActionGrid kGrid(RateMbps(5.0), 20);

TrainMeasurement fluid_train(double r_in, double c = 100.0, double lambda = 50.0,
                             int n = 100) {
    FluidPathSource source({fluid::FluidLink(RateMbps(c), RateMbps(lambda))},
                           kDefaultPacketBits, n);
    return source.probe(RateMbps(r_in));
}

std::vector<TrainMeasurement> fluid_sweep(double lo, double hi, double step) {
    std::vector<TrainMeasurement> trains;
    for (double r = lo; r <= hi + 1e-9; r += step) trains.push_back(fluid_train(r));
    return trains;
}

/// Unweighted least-squares line through (rate, strain) points.
std::pair<double, double> least_squares(const std::vector<double>& rates,
                                        const std::vector<double>& strains) {
    const auto m = static_cast<double>(rates.size());
    double sr = 0.0, srr = 0.0, sz = 0.0, srz = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        sr += rates[i];
        srr += rates[i] * rates[i];
        sz += strains[i];
        srz += rates[i] * strains[i];
    }
    const double alpha = (m * srz - sr * sz) / (m * srr - sr * sr);
    const double beta = (sz - alpha * sr) / m;
    return {alpha, beta};
}

TrainMeasurement train_from_gaps(double r_in, const std::vector<double>& gaps) {
    std::vector<double> times{0.0};
    for (double g : gaps) times.push_back(times.back() + g);
    const ProbeTrainSpec spec(RateMbps(r_in), kDefaultPacketBits,
                              static_cast<int>(times.size()));
    return TrainMeasurement::from_departures(spec, std::move(times));
}

}  // namespace

TEST_SUITE_BEGIN("kalman");

TEST_CASE("strain matches the affine fluid form") {
    const auto m = fluid_train(75.0);
    CHECK(strain(m) == doctest::Approx(0.25).epsilon(1e-9));
    // alpha*r + beta with alpha = 1/C, beta = (lambda - C)/C
    CHECK(strain(m) == doctest::Approx(0.01 * 75.0 - 0.5).epsilon(1e-9));
    CHECK(strain(fluid_train(30.0)) == doctest::Approx(0.0));
    CHECK(strain(fluid_train(50.0)) == doctest::Approx(0.0));
}

TEST_CASE("fluid strain is affine above A") {
    std::vector<double> rates, strains;
    for (double r = 55.0; r <= 100.0; r += 5.0) {
        rates.push_back(r);
        strains.push_back(strain(fluid_train(r)));
    }
    const auto [alpha, beta] = least_squares(rates, strains);
    CHECK(alpha == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(beta == doctest::Approx(-0.5).epsilon(1e-9));
    for (std::size_t i = 0; i < rates.size(); ++i)
        CHECK(std::abs(strains[i] - (alpha * rates[i] + beta)) < 1e-9);
}

TEST_CASE("per_train_noise_variance floors at 1e-12 for clean trains") {
    CHECK(per_train_noise_variance(fluid_train(75.0)) == 1e-12);
}

TEST_CASE("per_train_noise_variance needs at least 3 packets") {
    CHECK_THROWS_AS(per_train_noise_variance(fluid_train(75.0, 100.0, 50.0, 2)),
                    InsufficientData);
}

TEST_CASE("per_train_noise_variance tracks known gap noise") {
    RngStream rng(Seed{51});
    const double g_in = gap_from_rate(kDefaultPacketBits, RateMbps(75.0));
    const double sigma = 0.05 * g_in;
    const int n = 100;
    double mean_estimate = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> gaps(n - 1);
        for (double& g : gaps) g = g_in + rng.next_gaussian(0.0, sigma);
        mean_estimate += per_train_noise_variance(train_from_gaps(75.0, gaps));
    }
    mean_estimate /= seeds;
    const double expected = sigma * sigma / (g_in * g_in * (n - 1));
    CHECK(mean_estimate == doctest::Approx(expected).epsilon(0.20));
}

TEST_CASE("doubling the train length roughly halves the noise variance") {
    RngStream rng(Seed{52});
    const double g_in = gap_from_rate(kDefaultPacketBits, RateMbps(75.0));
    auto mean_noise = [&](int n) {
        double acc = 0.0;
        for (int s = 0; s < 100; ++s) {
            std::vector<double> gaps(static_cast<std::size_t>(n - 1));
            for (double& g : gaps) g = g_in * (0.8 + 0.4 * rng.next_unit());
            acc += per_train_noise_variance(train_from_gaps(75.0, gaps)) / 100.0;
        }
        return acc;
    };
    const double ratio = mean_noise(50) / mean_noise(100);
    CHECK(ratio > 1.0);
    CHECK(ratio < 4.0);
}

TEST_CASE("kalman_step converges to the least-squares line on fluid data") {
    const auto trains = fluid_sweep(60.0, 100.0, 5.0);
    KalmanState state = KalmanState::initial(RateMbps(100.0));
    std::vector<double> rates, strains;
    for (const auto& t : trains) {
        rates.push_back(t.input_rate().mbps());
        strains.push_back(strain(t));
    }
    const auto [ls_alpha, ls_beta] = least_squares(rates, strains);

    for (int it = 0; it < 10; ++it)
        kalman_step(state, gate_observations(trains, RateMbps(50.0)));

    CHECK(std::abs(state.alpha() - 0.01) < 1e-3);
    CHECK(std::abs(state.beta() + 0.5) < 1e-3);
    CHECK(state.capacity_mbps() == doctest::Approx(100.0).epsilon(1e-3));
    CHECK(state.cross_rate_mbps() == doctest::Approx(50.0).epsilon(1e-3));
    CHECK(std::abs(state.alpha() - ls_alpha) < 1e-6);
    CHECK(std::abs(state.beta() - ls_beta) < 1e-6);
}

TEST_CASE("a zero-information observation leaves x alone and grows P by Q") {
    KalmanState state = KalmanState::initial(RateMbps(100.0), 1e-2);
    const Eigen::Vector2d x_before = state.x;
    const Eigen::Matrix2d p_before = state.P;
    const StrainObservation obs({60.0}, {0.1}, {1e12});  // R -> infinity
    kalman_step(state, obs);
    CHECK((state.x - x_before).norm() < 1e-9);
    CHECK((state.P - (p_before + 1e-2 * Eigen::Matrix2d::Identity())).norm() < 1e-6);
}

TEST_CASE("P stays symmetric PSD over many random updates") {
    RngStream rng(Seed{53});
    KalmanState state = KalmanState::initial(RateMbps(100.0));
    for (int i = 0; i < 10000; ++i) {
        const double rate = 5.0 + rng.next_unit() * 95.0;
        const StrainObservation obs({rate}, {rng.next_gaussian(0.0, 1.0)},
                                    {1e-6 + rng.next_unit()});
        kalman_step(state, obs);
        CHECK((state.P - state.P.transpose()).norm() < 1e-12);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(state.P);
        CHECK(eig.eigenvalues()(0) >= -1e-12);
    }
}

TEST_CASE("an update never grows the covariance trace") {
    RngStream rng(Seed{54});
    for (int trial = 0; trial < 200; ++trial) {
        KalmanState state = KalmanState::initial(RateMbps(100.0), 0.0);  // no Q
        // random PSD start
        Eigen::Matrix2d m;
        m << rng.next_gaussian(0.0, 1.0), rng.next_gaussian(0.0, 1.0),
            rng.next_gaussian(0.0, 1.0), rng.next_gaussian(0.0, 1.0);
        state.P = m * m.transpose();
        const double trace_before = state.P.trace();
        const StrainObservation obs({5.0 + rng.next_unit() * 95.0, 100.0},
                                    {0.1, 0.5}, {1e-4, 1e-2});
        kalman_step(state, obs);
        CHECK(state.P.trace() <= trace_before + 1e-12);
    }
}

TEST_CASE("kalman_step reports unrecoverable degeneracy") {
    KalmanState state = KalmanState::initial(RateMbps(100.0), 0.0);
    state.P = -Eigen::Matrix2d::Identity();  // corrupted covariance
    const StrainObservation obs({80.0}, {0.3}, {1e-13});
    CHECK_THROWS_AS(kalman_step(state, obs), NumericalDegeneracy);
}

TEST_CASE("kalman_step survives a marginally negative innovation variance") {
    KalmanState state = KalmanState::initial(RateMbps(100.0), 0.0);
    state.P = Eigen::Matrix2d::Zero();
    state.P(1, 1) = -2e-13;  // rounding-scale corruption
    const StrainObservation obs({1.0}, {0.3}, {1e-13});
    CHECK_NOTHROW(kalman_step(state, obs));  // +1e-12 regularization rescues it
}

TEST_CASE("gate_observations keeps rates above the estimate") {
    const auto trains = fluid_sweep(5.0, 100.0, 5.0);
    const auto obs = gate_observations(trains, RateMbps(50.0));
    REQUIRE(obs.size() == 10);
    CHECK(obs.rates_mbps.front() == 55.0);
    CHECK(obs.rates_mbps.back() == 100.0);
}

TEST_CASE("gate_observations falls back to the two fastest trains") {
    const auto trains = fluid_sweep(5.0, 100.0, 5.0);
    const auto obs = gate_observations(trains, RateMbps(100.0));
    REQUIRE(obs.size() == 2);
    CHECK(obs.rates_mbps[0] == 95.0);
    CHECK(obs.rates_mbps[1] == 100.0);
}

TEST_CASE("gate_observations passes everything when the estimate is zero") {
    const auto trains = fluid_sweep(5.0, 100.0, 5.0);
    CHECK(gate_observations(trains, RateMbps(0.0)).size() == trains.size());
}

TEST_CASE("available_bandwidth reads -beta/alpha with clamping") {
    KalmanState state = KalmanState::initial(RateMbps(100.0));
    state.x << 0.01, -0.5;
    CHECK(available_bandwidth(state, RateMbps(100.0)).mbps() == doctest::Approx(50.0));
    state.x << 0.01, 0.0;
    CHECK(available_bandwidth(state, RateMbps(100.0)).mbps() == 0.0);
    state.x << 0.01, 0.2;  // would be negative
    CHECK(available_bandwidth(state, RateMbps(100.0)).mbps() == 0.0);
    state.x << 0.001, -0.5;  // would exceed the top rate
    CHECK(available_bandwidth(state, RateMbps(100.0)).mbps() == 100.0);
    state.x << -0.01, -0.5;
    CHECK_THROWS_AS(available_bandwidth(state, RateMbps(100.0)), NotIdentified);
}

TEST_CASE("DirectProbingEstimator recovers the fluid link in a few streams") {
    DirectProbingEstimator estimator(kGrid);
    CHECK(estimator.estimate().mbps() == doctest::Approx(50.0));  // prior readout
    const auto trains = fluid_sweep(5.0, 100.0, 5.0);
    RateMbps estimate = estimator.estimate();
    for (int s = 0; s < 10; ++s) estimate = estimator.consume_stream(trains).estimate;
    CHECK(estimate.mbps() == doctest::Approx(50.0).epsilon(1e-3));
}

TEST_CASE("StrainObservation validates its rows") {
    CHECK_THROWS_AS(StrainObservation({}, {}, {}), InvalidArgument);
    CHECK_THROWS_AS(StrainObservation({60.0}, {0.1, 0.2}, {1e-6}), InvalidArgument);
    CHECK_THROWS_AS(StrainObservation({60.0}, {0.1}, {0.0}), InvalidArgument);
    CHECK_THROWS_AS(StrainObservation({60.0}, {std::nan("")}, {1e-6}), InvalidArgument);
}

TEST_SUITE_END();
