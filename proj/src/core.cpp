#include "abwlab/core.hpp"

#include <cmath>
#include <utility>

namespace abw {

RateMbps::RateMbps(double mbps) : mbps_(mbps) {
    if (!std::isfinite(mbps) || mbps < 0.0)
        throw InvalidArgument("RateMbps: value must be finite and >= 0, got " +
                              std::to_string(mbps));
}

RateMbps rate_from_gap(std::int64_t packet_size_bits, double gap_seconds) {
    if (packet_size_bits <= 0)
        throw InvalidArgument("rate_from_gap: packet size must be positive");
    if (!(gap_seconds > 0.0) || !std::isfinite(gap_seconds))
        throw InvalidArgument("rate_from_gap: gap must be positive, got " +
                              std::to_string(gap_seconds));
    return RateMbps(static_cast<double>(packet_size_bits) / gap_seconds / 1e6);
}

double gap_from_rate(std::int64_t packet_size_bits, RateMbps rate) {
    if (packet_size_bits <= 0)
        throw InvalidArgument("gap_from_rate: packet size must be positive");
    if (!(rate.mbps() > 0.0))
        throw InvalidArgument("gap_from_rate: rate must be positive");
    return static_cast<double>(packet_size_bits) / rate.bits_per_second();
}

RateMbps train_output_rate(const std::vector<double>& departure_times,
                           std::int64_t packet_size_bits) {
    if (departure_times.size() < 2)
        throw InvalidMeasurement("train_output_rate: need at least 2 timestamps");
    for (std::size_t j = 1; j < departure_times.size(); ++j) {
        if (!(departure_times[j] > departure_times[j - 1]))
            throw InvalidMeasurement(
                "train_output_rate: timestamps must be strictly increasing");
    }
    const double span = departure_times.back() - departure_times.front();
    const double n_minus_1 = static_cast<double>(departure_times.size() - 1);
    return RateMbps(n_minus_1 * static_cast<double>(packet_size_bits) / span / 1e6);
}

ActionGrid::ActionGrid(RateMbps increment, int count)
    : increment_(increment), count_(count) {
    if (!(increment.mbps() > 0.0))
        throw InvalidArgument("ActionGrid: increment must be positive");
    if (count < 2) throw InvalidArgument("ActionGrid: need at least 2 actions");
}

RateMbps ActionGrid::rate(int index) const {
    if (index < 0 || index >= count_)
        throw InvalidArgument("ActionGrid: action index out of range");
    return RateMbps(static_cast<double>(index + 1) * increment_.mbps());
}

ProbeTrainSpec::ProbeTrainSpec(RateMbps rate, std::int64_t packet_size_bits,
                               int packet_count)
    : rate_(rate), packet_size_bits_(packet_size_bits), packet_count_(packet_count) {
    if (!(rate.mbps() > 0.0))
        throw InvalidArgument("ProbeTrainSpec: rate must be positive");
    if (packet_size_bits <= 0)
        throw InvalidArgument("ProbeTrainSpec: packet size must be positive");
    if (packet_count < 2)
        throw InvalidArgument("ProbeTrainSpec: a train needs at least 2 packets");
}

double ProbeTrainSpec::input_gap_seconds() const {
    return gap_from_rate(packet_size_bits_, rate_);
}

TrainMeasurement TrainMeasurement::from_departures(const ProbeTrainSpec& spec,
                                                   std::vector<double> departure_times) {
    if (departure_times.size() != static_cast<std::size_t>(spec.packet_count()))
        throw InvalidMeasurement("TrainMeasurement: timestamp count != packet count");
    const RateMbps rate = train_output_rate(departure_times, spec.packet_size_bits());
    std::vector<double> gaps(departure_times.size() - 1);
    for (std::size_t j = 0; j + 1 < departure_times.size(); ++j)
        gaps[j] = departure_times[j + 1] - departure_times[j];
    return TrainMeasurement(spec, std::move(departure_times), std::move(gaps), rate);
}

}  // namespace abw
