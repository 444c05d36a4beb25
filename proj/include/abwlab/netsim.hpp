#pragma once

#include <span>
#include <vector>

#include "abwlab/core.hpp"
#include "abwlab/rng.hpp"

namespace abw::netsim {

enum class CrossKind { kCbr, kExponential, kPareto };

/// Renewal-process cross-traffic at one link. Packets have fixed size; the
/// inter-arrival law sets the burstiness (constant, exponential, or Pareto
/// with tail index alpha, scale chosen so the mean rate comes out right).
class CrossTrafficModel {
public:
    static CrossTrafficModel cbr(RateMbps mean_rate,
                                 std::int64_t packet_size_bits = kDefaultPacketBits);
    static CrossTrafficModel exponential(RateMbps mean_rate,
                                         std::int64_t packet_size_bits = kDefaultPacketBits);
    static CrossTrafficModel pareto(RateMbps mean_rate, double shape = 1.5,
                                    std::int64_t packet_size_bits = kDefaultPacketBits);

    CrossKind kind() const { return kind_; }
    RateMbps mean_rate() const { return mean_rate_; }
    std::int64_t packet_size_bits() const { return packet_size_bits_; }
    double pareto_shape() const { return pareto_shape_; }

    /// Delta = l / lambda. Requires a nonzero mean rate.
    double mean_interarrival_seconds() const;

private:
    CrossTrafficModel(CrossKind kind, RateMbps mean_rate,
                      std::int64_t packet_size_bits, double pareto_shape);

    CrossKind kind_;
    RateMbps mean_rate_;
    std::int64_t packet_size_bits_;
    double pareto_shape_;
};

/// One emulated link: fixed-capacity lossless FIFO multiplexer with its own
/// single-hop-persistent cross-traffic.
class SimLink {
public:
    SimLink(RateMbps capacity, CrossTrafficModel cross_traffic,
            double propagation_delay_seconds = 0.0);

    RateMbps capacity() const { return capacity_; }
    const CrossTrafficModel& cross_traffic() const { return cross_traffic_; }
    double propagation_delay_seconds() const { return propagation_delay_; }
    RateMbps available() const;

private:
    RateMbps capacity_;
    CrossTrafficModel cross_traffic_;
    double propagation_delay_;
};

class PathModel {
public:
    explicit PathModel(std::vector<SimLink> links);

    const std::vector<SimLink>& links() const { return links_; }

    /// End-to-end available bandwidth: the tight link's C - lambda.
    RateMbps available_bandwidth() const;

private:
    std::vector<SimLink> links_;
};

/// Cross-traffic arrival times in [t_start, t_end), sorted. The first
/// arrival falls one inter-arrival after t_start, as if a packet had just
/// arrived at the window edge.
std::vector<double> generate_cross_arrivals(const CrossTrafficModel& model,
                                            double t_start, double t_end,
                                            RngStream& rng);

/// Work-conserving FIFO: d_i = max(a_i, d_{i-1}) + l_i / C, queue empty at
/// the first arrival.
std::vector<double> fifo_departures(std::span<const double> arrivals,
                                    std::span<const std::int64_t> packet_sizes_bits,
                                    RateMbps capacity);

struct SimOptions {
    /// Cross-traffic lead time before the train reaches each link.
    double warmup_seconds = 1.0;
    /// Std dev of Gaussian receiver time-stamping noise; 0 disables it.
    double timestamp_jitter_sd = 0.0;
};

/// Push one probe train through the path. Probe packets enter link 1 with
/// exact spacing l/r_in at t = 0; each link merges them with fresh
/// cross-traffic, serves FIFO, and hands the probe departures (plus
/// propagation delay) to the next link. The measurement is taken at the
/// last hop's output.
TrainMeasurement run_train(const PathModel& path, const ProbeTrainSpec& spec,
                           RngStream& rng, const SimOptions& options = {});

}  // namespace abw::netsim
