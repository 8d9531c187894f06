#pragma once

#include <cstdint>

namespace fblnet {

// SplitMix64 (Vigna's reference algorithm). Full 2^64 period, passes BigCrush
// when used as a 64-bit generator, and trivially reproducible across
// platforms: state update and output mix are pure integer arithmetic.
// The first outputs for seed 0 are pinned in the test suite.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace fblnet
