#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace abw {

// Probe and cross-traffic packets default to 1514 bytes on the wire.
inline constexpr std::int64_t kDefaultPacketBits = 12112;

class Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
    using Error::Error;
};

class InvalidMeasurement : public Error {
    using Error::Error;
};

// Parameter outside its admissible interval; carries the interval.
class ConstraintViolation : public Error {
public:
    ConstraintViolation(const std::string& what, double lo, double hi)
        : Error(what), lo_(lo), hi_(hi) {}
    double lower() const { return lo_; }
    double upper() const { return hi_; }

private:
    double lo_;
    double hi_;
};

class NotReady : public Error {
    using Error::Error;
};

class InsufficientData : public Error {
    using Error::Error;
};

class NumericalDegeneracy : public Error {
    using Error::Error;
};

class NotIdentified : public Error {
    using Error::Error;
};

class ConfigError : public Error {
    using Error::Error;
};

class IoError : public Error {
    using Error::Error;
};

/// A rate in megabits per second. Nonnegative and finite by construction.
class RateMbps {
public:
    constexpr RateMbps() = default;
    explicit RateMbps(double mbps);

    double mbps() const { return mbps_; }
    double bits_per_second() const { return mbps_ * 1e6; }

    bool operator==(const RateMbps&) const = default;
    auto operator<=>(const RateMbps&) const = default;

private:
    double mbps_ = 0.0;
};

struct Seed {
    std::uint64_t value = 0;
};

/// r = l / g, reported in Mbps.
RateMbps rate_from_gap(std::int64_t packet_size_bits, double gap_seconds);

/// g = l / r, in seconds.
double gap_from_rate(std::int64_t packet_size_bits, RateMbps rate);

/// Rate of a train from its receiver timestamps: (n-1)*l / (t_n - t_1).
RateMbps train_output_rate(const std::vector<double>& departure_times,
                           std::int64_t packet_size_bits);

/// Equally spaced probe rates r_i = i * increment, i = 1..count.
class ActionGrid {
public:
    ActionGrid(RateMbps increment, int count);

    int count() const { return count_; }
    RateMbps increment() const { return increment_; }
    RateMbps rate(int index) const;  // 0-based; rate(0) == increment
    RateMbps top_rate() const { return rate(count_ - 1); }

private:
    RateMbps increment_;
    int count_;
};

/// One probe train: n packets of l bits sent at rate r (input gap l/r).
class ProbeTrainSpec {
public:
    ProbeTrainSpec(RateMbps rate, std::int64_t packet_size_bits, int packet_count);

    RateMbps rate() const { return rate_; }
    std::int64_t packet_size_bits() const { return packet_size_bits_; }
    int packet_count() const { return packet_count_; }
    double input_gap_seconds() const;

private:
    RateMbps rate_;
    std::int64_t packet_size_bits_;
    int packet_count_;
};

/// Receiver-side record of one probe train. Timestamps are absolute
/// simulation time at the measurement point, strictly increasing.
class TrainMeasurement {
public:
    static TrainMeasurement from_departures(const ProbeTrainSpec& spec,
                                            std::vector<double> departure_times);

    const ProbeTrainSpec& spec() const { return spec_; }
    RateMbps input_rate() const { return spec_.rate(); }
    const std::vector<double>& departure_times() const { return departure_times_; }
    const std::vector<double>& output_gaps() const { return output_gaps_; }
    RateMbps output_rate() const { return output_rate_; }

private:
    TrainMeasurement(const ProbeTrainSpec& spec, std::vector<double> times,
                     std::vector<double> gaps, RateMbps rate)
        : spec_(spec),
          departure_times_(std::move(times)),
          output_gaps_(std::move(gaps)),
          output_rate_(rate) {}

    ProbeTrainSpec spec_;
    std::vector<double> departure_times_;
    std::vector<double> output_gaps_;
    RateMbps output_rate_;
};

}  // namespace abw
