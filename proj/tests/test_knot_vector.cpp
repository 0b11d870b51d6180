#include <gtest/gtest.h>

#include <numeric>

#include "hyiga/knot_vector.hpp"
#include "test_util.hpp"

using namespace hyiga;

TEST(FindSpan, SingleSpanVector) {
    const KnotVector kv(1, {0, 0, 1, 1});
    EXPECT_EQ(find_span(kv, 0.5), 1);
}

TEST(FindSpan, TwoSpanLinear) {
    const KnotVector kv(1, {0, 0, 0.5, 1, 1});
    const int s = find_span(kv, 0.25);
    EXPECT_EQ(kv[s], 0.0);
    EXPECT_EQ(kv[s + 1], 0.5);
}

TEST(FindSpan, RightEndpointMapsToLastNonzeroSpan) {
    const KnotVector kv(2, {0, 0, 0, 1, 1, 1});
    EXPECT_EQ(find_span(kv, 1.0), 2);
    const KnotVector kv2(2, {0, 0, 0, 0.5, 1, 1, 1});
    EXPECT_EQ(find_span(kv2, 1.0), 3);
    EXPECT_EQ(find_span(kv2, 0.5), 3);
}

TEST(FindSpan, OutsideRangeIsDomainError) {
    const KnotVector kv(1, {0, 0, 1, 1});
    EXPECT_THROW(find_span(kv, -1e-9), DomainError);
    EXPECT_THROW(find_span(kv, 1.0 + 1e-9), DomainError);
    EXPECT_THROW(bspline_basis(kv, 2.0), DomainError);
}

TEST(KnotVectorTest, RejectsMalformedInput) {
    EXPECT_THROW(KnotVector(1, {0, 1, 0.5, 1}), ConfigError);
    EXPECT_THROW(KnotVector(1, {0, 0, 0.5, 0.5, 1, 1}), ConfigError);  // interior multiplicity 2 > p
    EXPECT_THROW(KnotVector(2, {0, 0, 1, 1}), ConfigError);
    EXPECT_THROW(KnotVector(1, {0, 0, 0, 0}), ConfigError);
}

TEST(BsplineBasis, QuadraticBernsteinAtHalf) {
    const BasisValues b = bspline_basis(KnotVector(2, {0, 0, 0, 1, 1, 1}), 0.5);
    ASSERT_EQ(b.values.size(), 3u);
    EXPECT_DOUBLE_EQ(b.values[0], 0.25);
    EXPECT_DOUBLE_EQ(b.values[1], 0.5);
    EXPECT_DOUBLE_EQ(b.values[2], 0.25);
    // d/dxi of (1-xi)^2, 2xi(1-xi), xi^2
    EXPECT_DOUBLE_EQ(b.derivatives[0], -1.0);
    EXPECT_DOUBLE_EQ(b.derivatives[1], 0.0);
    EXPECT_DOUBLE_EQ(b.derivatives[2], 1.0);
}

TEST(BsplineBasis, LinearSecondSpan) {
    const BasisValues b = bspline_basis(KnotVector(1, {0, 0, 0.5, 1, 1}), 0.75);
    EXPECT_EQ(b.span, 2);
    EXPECT_DOUBLE_EQ(b.values[0], -2.0 * (0.75 - 1.0));
    EXPECT_DOUBLE_EQ(b.values[1], 2.0 * 0.75 - 1.0);
    EXPECT_DOUBLE_EQ(b.derivatives[0], -2.0);
    EXPECT_DOUBLE_EQ(b.derivatives[1], 2.0);
}

// Reference values published with an independent B-spline implementation.
TEST(BsplineBasis, RepeatedInteriorKnots) {
    const KnotVector kv(2, {0, 0, 0, 0.5, 0.5, 2, 2, 3, 3, 3});
    const BasisValues b = bspline_basis(kv, 0.3);
    EXPECT_NEAR(b.values[0], 0.16, 1e-14);
    EXPECT_NEAR(b.values[1], 0.48, 1e-14);
    EXPECT_NEAR(b.values[2], 0.36, 1e-14);

    const BasisValues right = bspline_basis(kv, 3.0);
    EXPECT_NEAR(right.values[2], 1.0, 1e-14);

    const KnotVector cubic(3, {0, 0, 0, 0, 0.5, 1, 1, 2, 2, 2, 2});
    const BasisValues c = bspline_basis(cubic, 1.45);
    EXPECT_NEAR(c.values[0], 0.1109166666666667, 1e-14);
    EXPECT_NEAR(c.values[1], 0.4638333333333333, 1e-14);
    EXPECT_NEAR(c.values[2], 0.334125, 1e-14);
    EXPECT_NEAR(c.values[3], 0.091125, 1e-14);
    EXPECT_NEAR(c.derivatives[0], -0.605, 1e-13);
    EXPECT_NEAR(c.derivatives[1], -0.88, 1e-13);
    EXPECT_NEAR(c.derivatives[2], 0.8775, 1e-13);
    EXPECT_NEAR(c.derivatives[3], 0.6075, 1e-13);
}

TEST(BsplineBasis, PartitionOfUnityAndNonNegativity) {
    for (int p = 0; p <= 4; ++p) {
        for (int trial = 0; trial < 20; ++trial) {
            const KnotVector kv = testutil::random_open_knots(p, 1 + trial % 6);
            for (int s = 0; s < 50; ++s) {
                const double xi = s == 0 ? 0.0 : (s == 1 ? 1.0 : testutil::uniform(0.0, 1.0));
                const BasisValues b = bspline_basis(kv, xi);
                const double sum = std::accumulate(b.values.begin(), b.values.end(), 0.0);
                const double dsum = std::accumulate(b.derivatives.begin(), b.derivatives.end(), 0.0);
                EXPECT_NEAR(sum, 1.0, 1e-12);
                double scale = 1.0;
                for (double d : b.derivatives) {
                    scale = std::max(scale, std::abs(d));
                }
                EXPECT_NEAR(dsum, 0.0, 1e-12 * scale);
                for (double v : b.values) {
                    EXPECT_GE(v, 0.0);
                }
            }
        }
    }
}

TEST(BsplineBasis, DerivativesMatchCentralDifferences) {
    const double h = 1e-6;
    for (int p = 1; p <= 4; ++p) {
        const KnotVector kv = testutil::random_open_knots(p, 4);
        const auto breaks = kv.unique_knots();
        for (int s = 0; s < 100; ++s) {
            const double xi = testutil::uniform(0.0, 1.0);
            bool near_knot = false;
            for (double k : breaks) {
                near_knot |= std::abs(xi - k) < 1e-4;
            }
            if (near_knot) {
                continue;
            }
            const BasisValues b = bspline_basis(kv, xi);
            const BasisValues bp = bspline_basis(kv, xi + h);
            const BasisValues bm = bspline_basis(kv, xi - h);
            ASSERT_EQ(bp.span, b.span);
            ASSERT_EQ(bm.span, b.span);
            for (int k = 0; k <= p; ++k) {
                const double fd = (bp.values[k] - bm.values[k]) / (2.0 * h);
                EXPECT_NEAR(b.derivatives[k], fd, 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}
