#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace driftwidth {

/**
 * Deterministic stream RNG: SplitMix64 for the integer stream, Box-Muller
 * for standard normals.
 *
 * Reference: Steele, Lea, Flood (2014), "Fast splittable pseudorandom
 * number generators".
 *
 * The integer stream is reproducible bit-for-bit for a given seed. Normals
 * go through libm transcendentals, so they are reproducible within one
 * build but compared statistically across toolchains.
 */
struct RngState {
    std::uint64_t state = 0;
    std::optional<double> cached_gaussian;

    explicit RngState(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe as the log argument in Box-Muller.
    double next_open_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal variate. Box-Muller produces a pair; the sine
    /// component is cached and returned by the following call.
    double next_gaussian() noexcept {
        if (cached_gaussian) {
            const double v = *cached_gaussian;
            cached_gaussian.reset();
            return v;
        }
        const double u1 = next_open_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_gaussian = r * std::sin(theta);
        return r * std::cos(theta);
    }

    friend bool operator==(const RngState& a, const RngState& b) noexcept {
        return a.state == b.state && a.cached_gaussian == b.cached_gaussian;
    }
};

}  // namespace driftwidth
