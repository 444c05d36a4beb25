#pragma once

#include <cstdint>
#include <string_view>

#include "abwlab/core.hpp"

namespace abw {

/// Counter-based deterministic random stream. A stream is identified by a
/// 64-bit key; draws hash (key, counter) so the sequence depends only on the
/// key, and child streams derived by index or name are independent of how
/// much the parent has been consumed. Pure integer mixing, so sequences are
/// identical across platforms.
class RngStream {
public:
    explicit RngStream(Seed seed) : key_(mix(seed.value ^ kStreamInit)) {}

    /// Independent stream for a numbered subcomponent.
    RngStream child(std::uint64_t tag) const;

    /// Independent stream for a named subcomponent.
    RngStream child(std::string_view name) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double next_unit();

    /// Uniform integer on [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n);

    double next_exponential(double mean);

    /// Pareto with minimum `scale` and tail index `shape` (> 0).
    double next_pareto(double scale, double shape);

    double next_gaussian(double mean, double sd);

private:
    struct RawKey {};
    RngStream(std::uint64_t key, RawKey) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z);

    static constexpr std::uint64_t kStreamInit = 0x243F6A8885A308D3ull;  // pi digits

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace abw
