#include "abwlab/probe_source.hpp"

#include <utility>

namespace abw {

FluidPathSource::FluidPathSource(std::vector<fluid::FluidLink> links,
                                 std::int64_t packet_size_bits, int packet_count)
    : links_(std::move(links)),
      packet_size_bits_(packet_size_bits),
      packet_count_(packet_count) {
    if (links_.empty())
        throw InvalidArgument("FluidPathSource: path must have >= 1 link");
}

TrainMeasurement FluidPathSource::probe(RateMbps rate) {
    const ProbeTrainSpec spec(rate, packet_size_bits_, packet_count_);
    const RateMbps r_out = fluid::path_rate_response(links_, rate, packet_size_bits_);
    const double gap_out = gap_from_rate(packet_size_bits_, r_out);
    std::vector<double> times(static_cast<std::size_t>(packet_count_));
    for (std::size_t j = 0; j < times.size(); ++j)
        times[j] = static_cast<double>(j) * gap_out;
    return TrainMeasurement::from_departures(spec, std::move(times));
}

SimulatedPathSource::SimulatedPathSource(netsim::PathModel path, RngStream rng,
                                         std::int64_t packet_size_bits,
                                         int packet_count, netsim::SimOptions options)
    : path_(std::move(path)),
      rng_(rng),
      packet_size_bits_(packet_size_bits),
      packet_count_(packet_count),
      options_(options) {}

TrainMeasurement SimulatedPathSource::probe(RateMbps rate) {
    const ProbeTrainSpec spec(rate, packet_size_bits_, packet_count_);
    RngStream train_rng = rng_.child(train_counter_++);
    return netsim::run_train(path_, spec, train_rng, options_);
}

}  // namespace abw
