#include <gtest/gtest.h>

#include "ahop/rng.hpp"
#include "ahop/similarity.hpp"

using namespace ahop;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(xs.size());
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

MemoryMatrix columns(std::initializer_list<std::initializer_list<double>> cols) {
    const int d = static_cast<int>(cols.begin()->size());
    Matrix m(d, cols.size());
    int k = 0;
    for (const auto& c : cols) m.col(k++) = vec(c);
    return MemoryMatrix(std::move(m));
}

}  // namespace

TEST(Dimwise, DisIdenticalInputsGiveZero) {
    const Vector x = vec({0.3, -1.2, 5.0});
    EXPECT_EQ(dimwise(BaseKind::Dis, x, x), Vector::Zero(3));
}

TEST(Dimwise, HandEvaluatedExamples) {
    EXPECT_EQ(dimwise(BaseKind::Dis, vec({1, 2, 3}), vec({1, 0, 3})), vec({0, -4, 0}));
    EXPECT_EQ(dimwise(BaseKind::Dot, vec({1, -1}), vec({2, 3})), vec({2, -3}));
}

TEST(Dimwise, LengthMismatchThrows) {
    EXPECT_THROW(dimwise(BaseKind::Dis, vec({1, 2}), vec({1, 2, 3})), DimensionError);
}

TEST(Footprint, ZeroVector) {
    EXPECT_EQ(footprint(Vector::Zero(4), true), Vector::Zero(4));
}

TEST(Footprint, HandSortAndCumsum) {
    EXPECT_EQ(footprint(vec({-4, 0, -1}), true), vec({0, -1, -5}));
    EXPECT_EQ(footprint(vec({-4, 0, -1}), false), vec({-4, -4, -5}));
}

TEST(Footprint, PermutationInvariantWhenSorted) {
    RngState rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + rng.uniform_int(12);
        Vector q(d);
        for (int i = 0; i < d; ++i) q[i] = rng.normal();
        const Vector base = footprint(q, true);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            for (int i = d - 1; i > 0; --i) std::swap(q[i], q[rng.uniform_int(i + 1)]);
            EXPECT_EQ(footprint(q, true), base);
        }
    }
}

TEST(Footprint, SortedDifferencesNonIncreasing) {
    RngState rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Vector q(8);
        for (int i = 0; i < 8; ++i) q[i] = rng.normal();
        const Vector f = footprint(q, true);
        for (int i = 2; i < 8; ++i)
            EXPECT_LE(f[i] - f[i - 1], f[i - 1] - f[i - 2] + 1e-12);
    }
}

TEST(KOptimal, HandExamples) {
    EXPECT_DOUBLE_EQ(k_optimal_bruteforce(BaseKind::Dis, vec({1, 2, 3}), vec({1, 0, 3}), 1), 0.0);
    EXPECT_DOUBLE_EQ(k_optimal_bruteforce(BaseKind::Dis, vec({1, 2, 3}), vec({1, 0, 3}), 3), -4.0);
    EXPECT_DOUBLE_EQ(k_optimal_bruteforce(BaseKind::Dot, vec({1, -1}), vec({2, 3}), 2), -1.0);
}

TEST(KOptimal, GuardsLargeDimension) {
    const Vector big = Vector::Zero(21);
    EXPECT_THROW(k_optimal_bruteforce(BaseKind::Dis, big, big, 1), ConfigError);
}

// Sorted footprint entry k-1 equals the exhaustive k-optimal similarity,
// both bases, all k.
TEST(KOptimal, FootprintMatchesBruteForce) {
    RngState rng(13);
    for (int d = 2; d <= 12; ++d) {
        for (int trial = 0; trial < 40; ++trial) {
            Vector xi(d), x(d);
            for (int i = 0; i < d; ++i) {
                xi[i] = rng.uniform(-2, 2);
                x[i] = rng.uniform(-2, 2);
            }
            for (BaseKind base : {BaseKind::Dis, BaseKind::Dot}) {
                const Vector f = footprint(dimwise(base, xi, x), true);
                for (int k = 1; k <= d; ++k)
                    EXPECT_NEAR(f[k - 1], k_optimal_bruteforce(base, xi, x, k), 1e-9);
            }
        }
    }
}

TEST(AdaptiveScores, DegeneratesToBaseSimilarity) {
    RngState rng(14);
    const int d = 7, N = 5;
    Matrix m(d, N);
    for (int i = 0; i < d * N; ++i) m(i % d, i / d) = rng.normal();
    const MemoryMatrix memory(m);
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.normal();

    for (BaseKind base : {BaseKind::Dis, BaseKind::Dot}) {
        WeightSet ws = WeightSet::base_dis(d);
        ws.bases[0].base = base;
        const Vector s = adaptive_scores(memory, x, ws);
        for (int k = 0; k < N; ++k) {
            const double expected = base == BaseKind::Dis ? -(m.col(k) - x).squaredNorm()
                                                          : m.col(k).dot(x);
            EXPECT_NEAR(s[k], expected, 1e-12 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST(AdaptiveScores, HandExample) {
    // w = (1,0,0) on the unsorted cumulative footprint reads off q_1
    const MemoryMatrix memory = columns({{1, 2, 3}, {0, 0, 0}});
    WeightSet ws = WeightSet::base_dis(3);
    ws.bases[0].w = vec({1, 0, 0});
    ws.bases[0].sorted = false;
    const Vector s = adaptive_scores(memory, vec({1, 0, 3}), ws);
    EXPECT_DOUBLE_EQ(s[0], 0.0);
    EXPECT_DOUBLE_EQ(s[1], -1.0);
}

TEST(AdaptiveScores, ExactMatchColumnScoresZeroAndMaximal) {
    const MemoryMatrix memory = columns({{1, 2}, {3, -4}});
    const Vector x = vec({3, -4});
    const WeightSet ws = WeightSet::base_dis(2);
    const Vector s = adaptive_scores(memory, x, ws);
    EXPECT_DOUBLE_EQ(s[1], 0.0);
    EXPECT_GT(s[1], s[0]);
}

TEST(AdaptiveScores, LinearInEachWAndBeta) {
    RngState rng(15);
    const int d = 6, N = 4;
    Matrix m(d, N);
    for (int i = 0; i < d * N; ++i) m(i % d, i / d) = rng.normal();
    const MemoryMatrix memory(m);
    Vector x(d), w1(d), w2(d);
    for (int i = 0; i < d; ++i) {
        x[i] = rng.normal();
        w1[i] = rng.normal();
        w2[i] = rng.normal();
    }

    // hold the dot base fixed, vary the dis base's w: scores are affine in w
    // with the dot contribution as offset
    auto with_w = [&](const Vector& w) {
        WeightSet ws = WeightSet::base_dis_dot(d);
        ws.bases[0].w = w;
        return adaptive_scores(memory, x, ws);
    };
    const Vector offset = with_w(Vector::Zero(d));
    const Vector lhs = with_w(2.0 * w1 + 3.0 * w2) - offset;
    const Vector rhs = 2.0 * (with_w(w1) - offset) + 3.0 * (with_w(w2) - offset);
    EXPECT_TRUE(lhs.isApprox(rhs, 1e-9));

    auto with_beta = [&](double beta) {
        WeightSet ws = WeightSet::base_dis_dot(d);
        ws.bases[0].w = w1;
        ws.bases[0].beta = beta;
        return adaptive_scores(memory, x, ws);
    };
    const Vector base0 = with_beta(0.0);
    EXPECT_TRUE((with_beta(5.0) - base0).isApprox(5.0 * (with_beta(1.0) - base0), 1e-9));
}

TEST(AdaptiveScores, ExplicitTriangularMatrixMatchesFixedMode) {
    RngState rng(16);
    const int d = 5, N = 6;
    Matrix m(d, N);
    for (int i = 0; i < d * N; ++i) m(i % d, i / d) = rng.normal();
    const MemoryMatrix memory(m);
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.normal();

    Matrix tri = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) tri(i, j) = 1.0;

    WeightSet fixed = WeightSet::base_dis_dot(d);
    for (auto& base : fixed.bases)
        for (int i = 0; i < d; ++i) base.w[i] = rng.normal();
    WeightSet explicit_u = fixed;
    for (auto& base : explicit_u.bases) base.u_mode = UMode::explicit_matrix(tri, false);

    EXPECT_TRUE(adaptive_scores(memory, x, fixed)
                    .isApprox(adaptive_scores(memory, x, explicit_u), 1e-12));
}

TEST(MatchCount, Examples) {
    const MemoryMatrix memory = columns({{1, 2, 3}, {1, 0, 3}, {5, 6, 7}});
    Vector s = match_count_scores(memory, vec({1, 0, 3}), 0.0);
    EXPECT_EQ(s, vec({2, 3, 0}));
    s = match_count_scores(memory, vec({1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(s[0], 3.0);
}

TEST(MatchCount, NegativeToleranceThrows) {
    const MemoryMatrix memory = columns({{1, 2}});
    EXPECT_THROW(match_count_scores(memory, vec({1, 2}), -1.0), ConfigError);
}
