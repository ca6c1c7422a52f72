#include <gtest/gtest.h>

#include <cmath>

#include "equilog/linalg.hpp"
#include "equilog/rng.hpp"

using namespace equilog;

TEST(RngStream, SamePairReproducesSequence) {
    RngStream a(123, 7), b(123, 7);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctStreamsDiffer) {
    RngStream a(123, 0), b(123, 1), c(124, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        equal_ab += x == b.next_u64();
        equal_ac += x == c.next_u64();
    }
    EXPECT_EQ(equal_ab, 0);
    EXPECT_EQ(equal_ac, 0);
}

TEST(RngStream, UniformStrictlyInsideUnitInterval) {
    RngStream rng(9, 9);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RngStream, NormalMoments) {
    RngStream rng(5, 1);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sum2 / n, 1.0, 0.02);
}

TEST(RngStream, BoundedDrawCoversRange) {
    RngStream rng(11, 3);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 10000; ++i) ++counts[rng.below(5)];
    for (int c : counts) EXPECT_NEAR(c, 2000, 300);
}

TEST(SampleMvnormal, IdentityCovariance) {
    RngStream rng(2024, 0);
    const std::size_t n = 100000;
    const Matrix draws = sample_mvnormal({0.0, 0.0}, SpdMatrix(Matrix::identity(2)), n, rng);
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m0 += draws(i, 0);
        m1 += draws(i, 1);
    }
    m0 /= n;
    m1 /= n;
    double c00 = 0, c01 = 0, c11 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        c00 += (draws(i, 0) - m0) * (draws(i, 0) - m0);
        c01 += (draws(i, 0) - m0) * (draws(i, 1) - m1);
        c11 += (draws(i, 1) - m1) * (draws(i, 1) - m1);
    }
    EXPECT_NEAR(c00 / (n - 1), 1.0, 0.02);
    EXPECT_NEAR(c01 / (n - 1), 0.0, 0.02);
    EXPECT_NEAR(c11 / (n - 1), 1.0, 0.02);
}

TEST(SampleMvnormal, CorrelatedCovarianceRecovered) {
    RngStream rng(77, 4);
    Matrix sigma(2, 2);
    sigma(0, 0) = 2.0;
    sigma(0, 1) = sigma(1, 0) = 0.8;
    sigma(1, 1) = 1.5;
    const Vector mu{1.0, -2.0};
    const std::size_t n = 100000;
    const Matrix draws = sample_mvnormal(mu, SpdMatrix(sigma), n, rng);
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m0 += draws(i, 0);
        m1 += draws(i, 1);
    }
    m0 /= n;
    m1 /= n;
    EXPECT_NEAR(m0, 1.0, 0.02);
    EXPECT_NEAR(m1, -2.0, 0.02);
    double c01 = 0;
    for (std::size_t i = 0; i < n; ++i) c01 += (draws(i, 0) - m0) * (draws(i, 1) - m1);
    EXPECT_NEAR(c01 / (n - 1), 0.8, 0.03);
}

TEST(SampleMvnormal, RejectsBadArguments) {
    RngStream rng(1, 1);
    EXPECT_THROW(sample_mvnormal({0.0}, SpdMatrix(Matrix::identity(2)), 10, rng),
                 DimensionError);
    EXPECT_THROW(sample_mvnormal({0.0, 0.0}, SpdMatrix(Matrix::identity(2)), 0, rng),
                 ValidationError);
}
