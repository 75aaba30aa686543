#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace monoidx {

// One splitmix64 step evaluated at state x: golden-ratio offset plus the
// Stafford finalizer. Bijective on 64-bit words, so it doubles as a counter
// hash with full avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream key from a parent seed, a purpose label, and a counter.
// Every consumer of randomness (noise, fold shuffles, resampling, ...) gets
// its own label so streams never collide across modules.
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t label,
                                          std::uint64_t counter = 0) noexcept {
    return mix64(mix64(mix64(seed) ^ label) ^ counter);
}

// Stream labels used with derive_key throughout the library.
namespace stream {
inline constexpr std::uint64_t noise = 0x01;
inline constexpr std::uint64_t folds = 0x02;
inline constexpr std::uint64_t cv_series = 0x03;
inline constexpr std::uint64_t cv_folds = 0x04;
inline constexpr std::uint64_t resample = 0x05;
inline constexpr std::uint64_t resample_retry = 0x06;
inline constexpr std::uint64_t table = 0x07;
inline constexpr std::uint64_t table_boot = 0x08;
}  // namespace stream

// Top 53 bits mapped to (0,1]; never returns 0, so it is safe under log().
inline double uniform_open_closed(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

// Top 53 bits mapped to [0,1).
inline double uniform_closed_open(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1p-53;
}

// Standard normal draw, pure in (key, index): Box-Muller cosine branch on two
// counter-hashed uniforms. Evaluation order and thread count cannot change
// the stream.
inline double standard_normal(std::uint64_t key, std::uint64_t index) noexcept {
    const std::uint64_t b1 = mix64(key ^ mix64(2 * index));
    const std::uint64_t b2 = mix64(key ^ mix64(2 * index + 1));
    const double u1 = uniform_open_closed(b1);
    const double u2 = uniform_closed_open(b2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential splitmix64 generator for the places where a stateful stream is
// more natural than counter hashing (shuffles, with-replacement draws).
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t out = mix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return out;
    }

    // Uniform integer in [0, bound) without modulo bias; bound must be >= 1.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t zone = (UINT64_MAX / bound) * bound;
        std::uint64_t v = next();
        while (v >= zone) v = next();
        return v % bound;
    }

private:
    std::uint64_t state_;
};

// Fisher-Yates shuffle driven by `rng`; consumes size()-1 bounded draws.
template <class T>
void shuffle(std::vector<T>& xs, SplitMix64& rng) {
    for (std::size_t i = xs.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(xs[i - 1], xs[j]);
    }
}

}  // namespace monoidx
