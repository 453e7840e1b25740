#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "cetk/knn.hpp"
#include "cetk/parallel.hpp"
#include "cetk/rng.hpp"
#include "cetk/special.hpp"

namespace {

using namespace cetk;

Matrix uniform_points(Eigen::Index t, Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = rng.uniform();
        }
    }
    return m;
}

Matrix normal_points(Eigen::Index t, Eigen::Index d, std::uint64_t seed, double sd = 1.0) {
    Rng rng(seed);
    Matrix m(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = sd * rng.normal();
        }
    }
    return m;
}

const double kGaussianEntropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

TEST(Digamma, KnownValuesAndRecurrence) {
    EXPECT_NEAR(digamma(1.0), -0.57721566490153286, 1e-10);
    EXPECT_NEAR(digamma(0.5), -0.57721566490153286 - 2.0 * std::numbers::ln2, 1e-10);
    for (double x : {0.1, 0.7, 1.0, 2.5, 5.9, 6.0, 17.3, 1000.0}) {
        EXPECT_NEAR(digamma(x + 1.0), digamma(x) + 1.0 / x, 1e-10) << "x = " << x;
        EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-10) << "x = " << x;
    }
    EXPECT_THROW(digamma(0.0), DomainError);
}

TEST(KnnRadii, LineExample) {
    Matrix pts(3, 1);
    pts << 0, 1, 3;
    const auto r = knn_radii(pts, 1, Norm::chebyshev);
    EXPECT_EQ(r.radii, (std::vector<double>{1, 1, 2}));
    EXPECT_FALSE(r.has_zero);
}

TEST(KnnRadii, PlaneExampleChebyshev) {
    Matrix pts(3, 2);
    pts << 0, 0, 0, 1, 1, 0;
    const auto r = knn_radii(pts, 1, Norm::chebyshev);
    EXPECT_EQ(r.radii, (std::vector<double>{1, 1, 1}));
    const auto e = knn_radii(pts, 2, Norm::euclidean);
    EXPECT_DOUBLE_EQ(e.radii[1], std::sqrt(2.0));
}

TEST(KnnRadii, DuplicatePointFlagged) {
    Matrix pts(3, 1);
    pts << 0.5, 0.5, 2.0;
    const auto r = knn_radii(pts, 1, Norm::chebyshev);
    EXPECT_TRUE(r.has_zero);
    EXPECT_EQ(r.radii[0], 0.0);
    EXPECT_THROW(ksg_entropy(pts, EntropyConfig{1}), EstimatorError);
}

TEST(KnnRadii, TreeMatchesBruteForceExactly) {
    for (const auto norm : {Norm::chebyshev, Norm::euclidean}) {
        for (const Eigen::Index d : {1, 2, 3, 5}) {
            for (const int k : {1, 3, 7}) {
                Matrix pts = uniform_points(700, d, 100 + static_cast<std::uint64_t>(d));
                // coarse lattice so that many distances tie exactly
                pts = (pts * 20.0).array().round() / 20.0;
                const auto brute = knn_radii(pts, k, norm, NeighborSearch::brute);
                const auto tree = knn_radii(pts, k, norm, NeighborSearch::tree);
                EXPECT_EQ(brute.radii, tree.radii)
                    << to_string(norm) << " d=" << d << " k=" << k;
            }
        }
    }
}

TEST(KnnRadii, DeterministicAcrossThreadCounts) {
    const Matrix pts = normal_points(3000, 3, 5);
    set_threads(1);
    const auto one = ksg_entropy(pts);
    set_threads(4);
    const auto four = ksg_entropy(pts);
    set_threads(1);
    EXPECT_EQ(one.value, four.value);
}

TEST(KsgEntropy, UniformUnitInterval) {
    const auto e = ksg_entropy(uniform_points(10000, 1, 1));
    EXPECT_NEAR(e.value, 0.0, 0.05);
    EXPECT_EQ(e.k, 3);
    EXPECT_EQ(e.sample_size, 10000);
    EXPECT_EQ(e.dims, 1);
}

TEST(KsgEntropy, StandardNormal) {
    EXPECT_NEAR(ksg_entropy(normal_points(10000, 1, 2)).value, kGaussianEntropy, 0.05);
}

TEST(KsgEntropy, ScaledNormal) {
    EXPECT_NEAR(ksg_entropy(normal_points(10000, 1, 3, 2.0)).value,
                kGaussianEntropy + std::numbers::ln2, 0.05);
}

TEST(KsgEntropy, EuclideanNormBivariateNormal) {
    const auto e = ksg_entropy(normal_points(5000, 2, 4), EntropyConfig{3, Norm::euclidean});
    EXPECT_NEAR(e.value, 2.0 * kGaussianEntropy, 0.06);
}

TEST(KsgEntropy, TranslationInvarianceIsExact) {
    const Matrix pts = normal_points(500, 2, 6);
    const Matrix shifted = pts.array() + 0.3;
    // on a 2^-20 grid adding 4 loses no bits, so every difference is unchanged
    const Matrix grid = (pts.array() * 1048576.0).round() / 1048576.0;
    EXPECT_EQ(ksg_entropy(grid).value, ksg_entropy(Matrix(grid.array() + 4.0)).value);
    EXPECT_NEAR(ksg_entropy(pts).value, ksg_entropy(shifted).value, 1e-12);
}

TEST(KsgEntropy, ScalingLaw) {
    const Matrix pts = normal_points(800, 3, 7);
    const double base = ksg_entropy(pts).value;
    for (const double a : {0.01, 3.7, -2.5}) {
        const Matrix scaled = pts * a;
        EXPECT_NEAR(ksg_entropy(scaled).value, base + 3.0 * std::log(std::abs(a)), 1e-9) << a;
    }
}

TEST(KsgEntropy, BiasShrinksWithSampleSize) {
    double previous = 1e9;
    for (const Eigen::Index t : {250, 1000, 4000}) {
        double bias = 0.0;
        constexpr int reps = 200;
        for (int r = 0; r < reps; ++r) {
            bias += ksg_entropy(normal_points(t, 2, 1000 + static_cast<std::uint64_t>(t + r))).value -
                    2.0 * kGaussianEntropy;
        }
        bias = std::abs(bias / reps);
        EXPECT_LT(bias, previous) << "T = " << t;
        previous = bias;
    }
}

TEST(KsgEntropy, ConfigErrors) {
    const Matrix pts = uniform_points(5, 1, 8);
    EXPECT_THROW(ksg_entropy(pts, EntropyConfig{0}), ConfigError);
    EXPECT_THROW(ksg_entropy(pts, EntropyConfig{5}), ConfigError);
    EXPECT_NO_THROW(ksg_entropy(pts, EntropyConfig{4}));
    EXPECT_THROW(parse_norm("manhattan"), ConfigError);
}

}  // namespace
