#include "abwlab/fluid.hpp"

#include <algorithm>
#include <cmath>

namespace abw::fluid {

FluidLink::FluidLink(RateMbps capacity, RateMbps cross_rate)
    : capacity_(capacity), cross_rate_(cross_rate) {
    if (!(capacity.mbps() > 0.0))
        throw InvalidArgument("FluidLink: capacity must be positive");
    if (cross_rate.mbps() > capacity.mbps())
        throw InvalidArgument("FluidLink: cross rate exceeds capacity");
}

RateMbps FluidLink::available() const {
    return RateMbps(capacity_.mbps() - cross_rate_.mbps());
}

double gap_response(const FluidLink& link, double gap_in_seconds,
                    std::int64_t packet_size_bits) {
    if (!(gap_in_seconds > 0.0))
        throw InvalidArgument("gap_response: input gap must be positive");
    if (packet_size_bits <= 0)
        throw InvalidArgument("gap_response: packet size must be positive");
    const double congested =
        (gap_in_seconds * link.cross_rate().bits_per_second() +
         static_cast<double>(packet_size_bits)) /
        link.capacity().bits_per_second();
    return std::max(gap_in_seconds, congested);
}

RateMbps rate_response(const FluidLink& link, RateMbps r_in,
                       std::int64_t /*packet_size_bits*/) {
    if (!(r_in.mbps() > 0.0))
        throw InvalidArgument("rate_response: input rate must be positive");
    if (r_in.mbps() <= link.available().mbps()) return r_in;
    return RateMbps(r_in.mbps() * link.capacity().mbps() /
                    (r_in.mbps() + link.cross_rate().mbps()));
}

RateMbps path_rate_response(std::span<const FluidLink> links, RateMbps r_in,
                            std::int64_t packet_size_bits) {
    if (links.empty())
        throw InvalidArgument("path_rate_response: path must have at least one link");
    RateMbps r = r_in;
    for (const FluidLink& link : links) r = rate_response(link, r, packet_size_bits);
    return r;
}

namespace {
double reward_of(double r_out_mbps, double r_in_mbps, double gamma) {
    return r_out_mbps * std::pow(r_in_mbps, gamma - 1.0);
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw InvalidArgument("reward: gamma must lie in (0, 1)");
}
}  // namespace

double reward(const FluidLink& link, RateMbps r_in, double gamma) {
    check_gamma(gamma);
    return reward_of(rate_response(link, r_in).mbps(), r_in.mbps(), gamma);
}

double reward(std::span<const FluidLink> links, RateMbps r_in, double gamma) {
    check_gamma(gamma);
    return reward_of(path_rate_response(links, r_in).mbps(), r_in.mbps(), gamma);
}

double gamma_upper_bound(const FluidLink& link) {
    return 1.0 - link.cross_rate().mbps() / link.capacity().mbps();
}

RateMbps argmax_reward(const FluidLink& link, const ActionGrid& grid, double gamma) {
    const double bound = gamma_upper_bound(link);
    if (!(gamma > 0.0) || !(gamma < bound))
        throw ConstraintViolation(
            "argmax_reward: gamma " + std::to_string(gamma) +
                " outside valid interval (0, " + std::to_string(bound) + ")",
            0.0, bound);
    int best = 0;
    double best_reward = reward(link, grid.rate(0), gamma);
    for (int i = 1; i < grid.count(); ++i) {
        const double rho = reward(link, grid.rate(i), gamma);
        if (rho > best_reward) {  // strict: ties keep the lower rate
            best_reward = rho;
            best = i;
        }
    }
    return grid.rate(best);
}

}  // namespace abw::fluid
