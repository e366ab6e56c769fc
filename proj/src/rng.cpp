#include "appwatch/rng.hpp"

namespace appwatch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Xorshift64Star::next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
}

std::uint64_t Xorshift64Star::below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    const u128 wide = static_cast<u128>(next()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

std::int64_t Xorshift64Star::geometric_gap(std::int64_t mean) {
    if (mean <= 1) return 1;
    std::int64_t gap = 1;
    while (below(static_cast<std::uint64_t>(mean)) != 0) ++gap;
    return gap;
}

}  // namespace appwatch
