#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace qtti {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/**
 * Counter-based stream: draw c is mix64(key + (c + 1) * golden gamma), where
 * key hashes the seed together with a list of tags. Tags name the stream,
 * e.g. {purpose, scale, component, core}, so any consumer can replay the
 * exact draws of any other.
 */
class Stream {
public:
    Stream(std::uint64_t seed, std::span<const std::uint64_t> tags);
    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
        : Stream(seed, std::span<const std::uint64_t>(tags.begin(), tags.size())) {}

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box-Muller; both variates of a pair are used.
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream tags used by the generators; fixed so files stay reproducible.
namespace stream_tag {
inline constexpr std::uint64_t random_qtt = 0x51;
inline constexpr std::uint64_t midpoint = 0x4d50;
inline constexpr std::uint64_t value_noise = 0x564e;
inline constexpr std::uint64_t perlin = 0x504e;
inline constexpr std::uint64_t cascade = 0x5443;
inline constexpr std::uint64_t sampling = 0x5341;
} // namespace stream_tag

} // namespace qtti
