#include "piergen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace piergen {

std::int64_t CounterRng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return lo + static_cast<std::int64_t>(x % span);
}

double CounterRng::normal(double mean, double sigma) noexcept {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sigma * z;
}

std::int64_t CounterRng::rounded_normal(double mean, double sigma, std::int64_t lo, std::int64_t hi) noexcept {
    auto v = static_cast<std::int64_t>(std::llround(normal(mean, sigma)));
    return std::clamp(v, lo, hi);
}

}  // namespace piergen
