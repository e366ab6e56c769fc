#pragma once

#include <cstdint>

namespace appwatch {

/// xorshift64* generator (Marsaglia shifts 12/25/27, Vigna's multiplier
/// 0x2545F4914F6CDD1D). The seed is expanded through one SplitMix64 step so
/// that nearby seeds give unrelated streams and seed 0 is usable.
///
/// Only integer arithmetic is used, so a given seed yields the same stream on
/// every platform. Do not change the constants: simulated traces (and the
/// golden files derived from them) depend on them.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform integer in [0, bound) by 128-bit multiply-high. bound > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Number of one-second steps until the first success of a 1/mean
    /// Bernoulli trial: a geometric stand-in for an exponential gap with the
    /// given mean, always >= 1.
    std::int64_t geometric_gap(std::int64_t mean);

private:
    std::uint64_t state_;
};

}  // namespace appwatch
