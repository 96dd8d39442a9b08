#include "qtti/rng.hpp"

#include <cmath>
#include <numbers>

namespace qtti {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::span<const std::uint64_t> tags) {
    std::uint64_t k = mix64(seed + kGamma);
    for (std::uint64_t t : tags) k = mix64(k ^ (t + kGamma + (k << 6) + (k >> 2)));
    key_ = k;
}

std::uint64_t Stream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

} // namespace qtti
