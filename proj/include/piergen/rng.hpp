#pragma once

#include <cstdint>
#include <string_view>

namespace piergen {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a, used to fold string keys into stream identifiers.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based random stream.
///
/// The n-th draw is a pure function of (key, n); the key is derived from the
/// run seed and the work item. Distributions do not use <random>.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) noexcept
        : CounterRng(seed, mix64(stream) ^ (substream * 0xd1342543de82ef95ULL + 1)) {}

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Standard normal via Box-Muller (one value per call, two uniforms consumed).
    double normal(double mean, double sigma) noexcept;

    /// Round-half-away-from-zero normal sample clamped to [lo, hi].
    std::int64_t rounded_normal(double mean, double sigma, std::int64_t lo, std::int64_t hi) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace piergen
