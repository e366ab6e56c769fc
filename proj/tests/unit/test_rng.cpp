#include "doctest.h"

#include <array>
#include <cmath>

#include "appwatch/rng.hpp"

using appwatch::Xorshift64Star;

TEST_CASE("same seed, same stream") {
    Xorshift64Star a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    Xorshift64Star zero(0);
    CHECK(zero.next() != 0);
}

TEST_CASE("below stays in range and covers it") {
    Xorshift64Star g(7);
    std::array<int, 6> hits{};
    for (int i = 0; i < 6000; ++i) {
        const auto v = g.below(6);
        REQUIRE(v < 6);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK(g.below(1) == 0);
}

TEST_CASE("geometric gaps are positive with the requested mean") {
    Xorshift64Star g(9);
    double sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto gap = g.geometric_gap(30);
        REQUIRE(gap >= 1);
        sum += static_cast<double>(gap);
    }
    CHECK(std::abs(sum / n - 30.0) < 1.0);
    CHECK(g.geometric_gap(1) == 1);
}
