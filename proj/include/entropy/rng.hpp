#pragma once

#include <cstdint>

namespace entropy {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, counter), so a trial's
/// numbers never depend on which worker ran it or in which order:
///
///     key      = mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15))
///     draw(i)  = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
///
/// `mix64` is the SplitMix64 finaliser (Steele, Lea, Flood 2014):
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// Doubles take the top 53 bits: (draw >> 11) * 2^-53, which lies in [0, 1).
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ mix64(stream + kGolden))) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGolden); }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound); bound > 0. Lemire's multiply-shift, with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        for (;;) {
            const std::uint64_t x = next_u64();
            const u128 m = static_cast<u128>(x) * bound;
            const auto low = static_cast<std::uint64_t>(m);
            if (low >= bound || low >= (0 - bound) % bound) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    __extension__ using u128 = unsigned __int128;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace entropy
