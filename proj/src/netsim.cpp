#include "abwlab/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace abw::netsim {

CrossTrafficModel::CrossTrafficModel(CrossKind kind, RateMbps mean_rate,
                                     std::int64_t packet_size_bits,
                                     double pareto_shape)
    : kind_(kind),
      mean_rate_(mean_rate),
      packet_size_bits_(packet_size_bits),
      pareto_shape_(pareto_shape) {
    if (packet_size_bits <= 0)
        throw InvalidArgument("CrossTrafficModel: packet size must be positive");
    if (kind == CrossKind::kPareto && !(pareto_shape > 1.0))
        throw InvalidArgument(
            "CrossTrafficModel: Pareto shape must exceed 1 so the mean exists");
}

CrossTrafficModel CrossTrafficModel::cbr(RateMbps mean_rate,
                                         std::int64_t packet_size_bits) {
    return CrossTrafficModel(CrossKind::kCbr, mean_rate, packet_size_bits, 0.0);
}

CrossTrafficModel CrossTrafficModel::exponential(RateMbps mean_rate,
                                                 std::int64_t packet_size_bits) {
    return CrossTrafficModel(CrossKind::kExponential, mean_rate, packet_size_bits, 0.0);
}

CrossTrafficModel CrossTrafficModel::pareto(RateMbps mean_rate, double shape,
                                            std::int64_t packet_size_bits) {
    return CrossTrafficModel(CrossKind::kPareto, mean_rate, packet_size_bits, shape);
}

double CrossTrafficModel::mean_interarrival_seconds() const {
    if (!(mean_rate_.mbps() > 0.0))
        throw InvalidArgument("CrossTrafficModel: mean inter-arrival undefined at rate 0");
    return static_cast<double>(packet_size_bits_) / mean_rate_.bits_per_second();
}

SimLink::SimLink(RateMbps capacity, CrossTrafficModel cross_traffic,
                 double propagation_delay_seconds)
    : capacity_(capacity),
      cross_traffic_(std::move(cross_traffic)),
      propagation_delay_(propagation_delay_seconds) {
    if (!(capacity.mbps() > 0.0))
        throw InvalidArgument("SimLink: capacity must be positive");
    if (cross_traffic_.mean_rate().mbps() > capacity.mbps())
        throw InvalidArgument("SimLink: cross-traffic rate exceeds capacity");
    if (propagation_delay_seconds < 0.0)
        throw InvalidArgument("SimLink: propagation delay must be >= 0");
}

RateMbps SimLink::available() const {
    return RateMbps(capacity_.mbps() - cross_traffic_.mean_rate().mbps());
}

PathModel::PathModel(std::vector<SimLink> links) : links_(std::move(links)) {
    if (links_.empty()) throw InvalidArgument("PathModel: path must have >= 1 link");
}

RateMbps PathModel::available_bandwidth() const {
    double a = std::numeric_limits<double>::infinity();
    for (const SimLink& link : links_) a = std::min(a, link.available().mbps());
    return RateMbps(a);
}

std::vector<double> generate_cross_arrivals(const CrossTrafficModel& model,
                                            double t_start, double t_end,
                                            RngStream& rng) {
    if (t_start > t_end)
        throw InvalidArgument("generate_cross_arrivals: window end before start");
    std::vector<double> arrivals;
    if (t_start == t_end || model.mean_rate().mbps() == 0.0) return arrivals;

    const double delta = model.mean_interarrival_seconds();
    arrivals.reserve(static_cast<std::size_t>((t_end - t_start) / delta * 1.1) + 4);

    // Pareto scale x_m = delta*(alpha-1)/alpha keeps the mean at delta.
    const double pareto_scale =
        delta * (model.pareto_shape() - 1.0) / model.pareto_shape();

    double t = t_start;
    for (;;) {
        switch (model.kind()) {
            case CrossKind::kCbr:
                t += delta;
                break;
            case CrossKind::kExponential:
                t += rng.next_exponential(delta);
                break;
            case CrossKind::kPareto:
                t += rng.next_pareto(pareto_scale, model.pareto_shape());
                break;
        }
        if (t >= t_end) break;
        arrivals.push_back(t);
    }
    return arrivals;
}

std::vector<double> fifo_departures(std::span<const double> arrivals,
                                    std::span<const std::int64_t> packet_sizes_bits,
                                    RateMbps capacity) {
    if (arrivals.size() != packet_sizes_bits.size())
        throw InvalidArgument("fifo_departures: one size per arrival required");
    if (!(capacity.mbps() > 0.0))
        throw InvalidArgument("fifo_departures: capacity must be positive");
    std::vector<double> departures(arrivals.size());
    const double capacity_bps = capacity.bits_per_second();
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        if (i > 0 && arrivals[i] < arrivals[i - 1])
            throw InvalidArgument("fifo_departures: arrivals must be sorted");
        prev = std::max(arrivals[i], prev) +
               static_cast<double>(packet_sizes_bits[i]) / capacity_bps;
        departures[i] = prev;
    }
    return departures;
}

namespace {

/// Serve probe + cross traffic at one link, returning the probe departures.
std::vector<double> serve_link(const SimLink& link,
                               const std::vector<double>& probe_arrivals,
                               std::int64_t probe_bits, double warmup,
                               RngStream& cross_rng) {
    const double window_start = probe_arrivals.front() - warmup;
    const double window_end = probe_arrivals.back();
    const std::vector<double> cross = generate_cross_arrivals(
        link.cross_traffic(), window_start, window_end, cross_rng);
    const std::int64_t cross_bits = link.cross_traffic().packet_size_bits();

    const double capacity_bps = link.capacity().bits_per_second();
    const double probe_service = static_cast<double>(probe_bits) / capacity_bps;
    const double cross_service = static_cast<double>(cross_bits) / capacity_bps;

    // Merge-and-serve without materializing the merged list. Cross packets
    // go first on timestamp ties.
    std::vector<double> probe_departures;
    probe_departures.reserve(probe_arrivals.size());
    double busy_until = -std::numeric_limits<double>::infinity();
    std::size_t ci = 0;
    for (double pa : probe_arrivals) {
        while (ci < cross.size() && cross[ci] <= pa) {
            busy_until = std::max(cross[ci], busy_until) + cross_service;
            ++ci;
        }
        busy_until = std::max(pa, busy_until) + probe_service;
        probe_departures.push_back(busy_until);
    }
    return probe_departures;
}

/// Receiver time-stamping noise. Gaps that would close or invert are
/// re-timed by clamping so ordering survives.
void apply_timestamp_jitter(std::vector<double>& times, double sd, RngStream& rng) {
    constexpr double kMinGap = 1e-9;
    for (double& t : times) t += rng.next_gaussian(0.0, sd);
    for (std::size_t i = 1; i < times.size(); ++i)
        times[i] = std::max(times[i], times[i - 1] + kMinGap);
}

}  // namespace

TrainMeasurement run_train(const PathModel& path, const ProbeTrainSpec& spec,
                           RngStream& rng, const SimOptions& options) {
    if (options.warmup_seconds < 0.0)
        throw InvalidArgument("run_train: warmup must be >= 0");

    const double gap_in = spec.input_gap_seconds();
    std::vector<double> probe_times(static_cast<std::size_t>(spec.packet_count()));
    for (std::size_t i = 0; i < probe_times.size(); ++i)
        probe_times[i] = static_cast<double>(i) * gap_in;

    for (std::size_t hop = 0; hop < path.links().size(); ++hop) {
        const SimLink& link = path.links()[hop];
        RngStream cross_rng = rng.child(hop);
        probe_times = serve_link(link, probe_times, spec.packet_size_bits(),
                                 options.warmup_seconds, cross_rng);
        if (link.propagation_delay_seconds() > 0.0)
            for (double& t : probe_times) t += link.propagation_delay_seconds();
    }

    if (options.timestamp_jitter_sd > 0.0) {
        RngStream jitter_rng = rng.child("jitter");
        apply_timestamp_jitter(probe_times, options.timestamp_jitter_sd, jitter_rng);
    }

    return TrainMeasurement::from_departures(spec, std::move(probe_times));
}

}  // namespace abw::netsim
