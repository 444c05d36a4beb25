#include "abwlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace abw {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}
}  // namespace

std::uint64_t RngStream::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

RngStream RngStream::child(std::uint64_t tag) const {
    return RngStream(mix(key_ ^ mix(tag + kGolden)), RawKey{});
}

RngStream RngStream::child(std::string_view name) const {
    return child(fnv1a(name));
}

std::uint64_t RngStream::next_u64() {
    return mix(key_ + (++counter_) * kGolden);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("next_below: n must be >= 1");
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngStream::next_exponential(double mean) {
    if (!(mean > 0.0)) throw InvalidArgument("next_exponential: mean must be > 0");
    // inverse CDF; log1p(-u) is finite for u in [0, 1)
    return -mean * std::log1p(-next_unit());
}

double RngStream::next_pareto(double scale, double shape) {
    if (!(scale > 0.0) || !(shape > 0.0))
        throw InvalidArgument("next_pareto: scale and shape must be > 0");
    return scale * std::pow(1.0 - next_unit(), -1.0 / shape);
}

double RngStream::next_gaussian(double mean, double sd) {
    // Box-Muller; u1 in (0, 1] avoids log(0)
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace abw
