#pragma once

#include <vector>

#include "abwlab/core.hpp"
#include "abwlab/fluid.hpp"
#include "abwlab/netsim.hpp"
#include "abwlab/rng.hpp"

namespace abw {

/// Anything that can answer a probe train at a requested input rate.
/// Estimators only see this surface; they never see link parameters.
class MeasurementSource {
public:
    virtual ~MeasurementSource() = default;
    virtual TrainMeasurement probe(RateMbps rate) = 0;
};

/// Noiseless fluid path: every train comes back with the exact fluid-model
/// output gap. Deterministic; the oracle side of estimator tests.
class FluidPathSource : public MeasurementSource {
public:
    FluidPathSource(std::vector<fluid::FluidLink> links,
                    std::int64_t packet_size_bits = kDefaultPacketBits,
                    int packet_count = 100);

    TrainMeasurement probe(RateMbps rate) override;

private:
    std::vector<fluid::FluidLink> links_;
    std::int64_t packet_size_bits_;
    int packet_count_;
};

/// Packet-level simulated path. Each probe call runs one train against
/// fresh cross-traffic drawn from a per-train child stream.
class SimulatedPathSource : public MeasurementSource {
public:
    SimulatedPathSource(netsim::PathModel path, RngStream rng,
                        std::int64_t packet_size_bits = kDefaultPacketBits,
                        int packet_count = 100,
                        netsim::SimOptions options = {});

    TrainMeasurement probe(RateMbps rate) override;

private:
    netsim::PathModel path_;
    RngStream rng_;
    std::int64_t packet_size_bits_;
    int packet_count_;
    netsim::SimOptions options_;
    std::uint64_t train_counter_ = 0;
};

}  // namespace abw
