#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "cetk/parallel.hpp"
#include "cetk/rng.hpp"

namespace {

using cetk::Rng;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(cetk::philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(cetk::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  {0xffffffffu, 0xffffffffu}),
              (std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(cetk::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  {0xa4093822u, 0x299f31d0u}),
              (std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, SameSeedSameStream) {
    Rng a(42, 7);
    Rng b(42, 7);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a(), b());
    }
}

TEST(Rng, StreamsAndSeedsDiffer) {
    Rng a(42, 0);
    Rng b(42, 1);
    Rng c(43, 0);
    int same_ab = 0;
    int same_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        same_ab += x == b();
        same_ac += x == c();
    }
    EXPECT_EQ(same_ab, 0);
    EXPECT_EQ(same_ac, 0);
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
    const Rng root(5);
    EXPECT_EQ(root.split(3).stream(), root.split(3).stream());
    EXPECT_NE(root.split(3).stream(), root.split(4).stream());
}

TEST(Rng, UniformIsOpenInterval) {
    Rng r(1);
    double lo = 1.0;
    double hi = 0.0;
    double sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, BelowIsUnbiasedOnSmallRange) {
    Rng r(9);
    std::vector<int> counts(7, 0);
    constexpr int n = 70000;
    for (int i = 0; i < n; ++i) {
        ++counts[r.below(7)];
    }
    for (const int c : counts) {
        EXPECT_NEAR(c, n / 7, 400);
    }
}

TEST(Rng, NormalMoments) {
    Rng r(3);
    double s1 = 0.0;
    double s2 = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, GammaAndBetaMeans) {
    Rng r(4);
    constexpr int n = 100000;
    double g = 0.0;
    double gs = 0.0;
    double b = 0.0;
    for (int i = 0; i < n; ++i) {
        g += r.gamma(2.5);
        gs += r.gamma(0.4);
        b += r.beta(2.0, 6.0);
    }
    EXPECT_NEAR(g / n, 2.5, 0.03);
    EXPECT_NEAR(gs / n, 0.4, 0.01);
    EXPECT_NEAR(b / n, 0.25, 0.005);
}

TEST(Shuffle, IsAPermutation) {
    Rng r(11);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    cetk::shuffle(v.begin(), v.end(), r);
    std::set<int> s(v.begin(), v.end());
    EXPECT_EQ(s.size(), 50u);
    EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(ParallelFor, CoversEveryIndexOnce) {
    cetk::set_threads(4);
    std::vector<int> hits(1000, 0);
    cetk::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    cetk::set_threads(1);
    for (const int h : hits) {
        EXPECT_EQ(h, 1);
    }
}

TEST(ParallelFor, PropagatesExceptions) {
    cetk::set_threads(3);
    EXPECT_THROW(cetk::parallel_for(500,
                                    [](std::size_t i) {
                                        if (i == 377) {
                                            throw std::runtime_error("boom");
                                        }
                                    }),
                 std::runtime_error);
    cetk::set_threads(1);
}

}  // namespace
