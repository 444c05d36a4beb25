#pragma once

#include <span>

#include "abwlab/core.hpp"

namespace abw::fluid {

/// Constant-rate fluid model of one FIFO link: capacity C and cross-traffic
/// rate lambda in [0, C]. Available bandwidth is C - lambda.
class FluidLink {
public:
    FluidLink(RateMbps capacity, RateMbps cross_rate);

    RateMbps capacity() const { return capacity_; }
    RateMbps cross_rate() const { return cross_rate_; }
    RateMbps available() const;

private:
    RateMbps capacity_;
    RateMbps cross_rate_;
};

/// Output gap of a probe pair: max{g_in, (g_in*lambda + l) / C}.
double gap_response(const FluidLink& link, double gap_in_seconds,
                    std::int64_t packet_size_bits);

/// Rate response: r_in below available bandwidth passes through, above it
/// the probe gets its FIFO share r_in*C / (r_in + lambda). Packet size
/// cancels and is accepted for interface symmetry only.
RateMbps rate_response(const FluidLink& link, RateMbps r_in,
                       std::int64_t packet_size_bits = kDefaultPacketBits);

/// Hop-by-hop fold of the single-link rate response. An idealization used
/// for oracles; real downstream gaps are not fluid.
RateMbps path_rate_response(std::span<const FluidLink> links, RateMbps r_in,
                            std::int64_t packet_size_bits = kDefaultPacketBits);

/// Probe reward r_out * r_in^(gamma-1) evaluated on the fluid response.
double reward(const FluidLink& link, RateMbps r_in, double gamma);
double reward(std::span<const FluidLink> links, RateMbps r_in, double gamma);

/// Largest admissible convergence parameter for a link: 1 - lambda/C.
double gamma_upper_bound(const FluidLink& link);

/// Grid rate maximizing the fluid reward; ties break toward the lower rate.
/// Requires 0 < gamma < 1 - lambda/C, else ConstraintViolation with the
/// valid interval.
RateMbps argmax_reward(const FluidLink& link, const ActionGrid& grid, double gamma);

}  // namespace abw::fluid
