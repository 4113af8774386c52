#include <gtest/gtest.h>

#include "specsub/krylov/eigs.hpp"
#include "specsub/linalg/sketch.hpp"
#include "test_support.hpp"

using namespace specsub;

TEST(SubsampledProduct, SingleColumnIsExact) {
  RngStream rng(1);
  DenseMatrix a = DenseMatrix::Zero(5, 4);
  a.col(2) = fixtures::gaussian(5, 1, rng);
  const DenseMatrix b = fixtures::gaussian(4, 3, rng);
  for (Index s : {1, 3, 10}) {
    const auto cr = subsampled_product(a, b, s, rng);
    EXPECT_LE((cr.product() - a * b).norm(), 1e-12 * (a * b).norm());
  }
}

TEST(SubsampledProduct, FactorsMatchIndicesAndScales) {
  RngStream rng(2);
  const DenseMatrix a = fixtures::gaussian(6, 8, rng), b = fixtures::gaussian(8, 5, rng);
  const auto cr = subsampled_product(a, b, 7, rng);
  const auto q = product_probs(a, b);
  for (Index i = 0; i < 7; ++i) {
    const Index j = cr.indices[static_cast<std::size_t>(i)];
    const double sc = cr.scales[static_cast<std::size_t>(i)];
    EXPECT_NEAR(sc, 1.0 / std::sqrt(7.0 * q.prob(j)), 1e-14);
    EXPECT_EQ(cr.C.col(i), a.col(j) * sc);
    EXPECT_EQ(cr.R.row(i), b.row(j) * sc);
  }
}

TEST(SubsampledProduct, UnbiasedMonteCarlo) {
  RngStream rng(3);
  const Index n = 20, s = 5;
  const DenseMatrix a = fixtures::rademacher(6, n, rng), b = fixtures::rademacher(n, 4, rng);
  const DenseMatrix ab = a * b;
  const int trials = 10000;
  DenseMatrix sum = DenseMatrix::Zero(6, 4), sq = DenseMatrix::Zero(6, 4);
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix p = subsampled_product(a, b, s, rng).product();
    sum += p;
    sq += p.cwiseProduct(p);
  }
  const DenseMatrix mean = sum / trials;
  const double z = fixtures::familywise_z(24);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 4; ++j) {
      const double var = sq(i, j) / trials - mean(i, j) * mean(i, j);
      EXPECT_NEAR(mean(i, j), ab(i, j), z * std::sqrt(var / trials) + 1e-12);
    }
}

TEST(SubsampledProduct, FrobeniusVarianceBound) {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    RngStream rng(seed);
    const Index s = 3 + static_cast<Index>(seed % 5);
    const DenseMatrix a = fixtures::gaussian(10, 30, rng), b = fixtures::gaussian(30, 8, rng);
    const DenseMatrix ab = a * b;
    double acc = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) acc += (ab - subsampled_product(a, b, s, rng).product()).squaredNorm();
    EXPECT_LE(acc / trials, a.squaredNorm() * b.squaredNorm() / s * 1.1) << "seed " << seed;
  }
}

TEST(SubsampledProduct, RejectsZeroRate) {
  RngStream rng(1);
  EXPECT_THROW(subsampled_product(DenseMatrix::Identity(2, 2), DenseMatrix::Identity(2, 2), 0, rng), Error);
}

TEST(ColumnSubsample, RankOneIsExact) {
  RngStream rng(4);
  const Vector u = fixtures::gaussian(30, 1, rng), v = fixtures::gaussian(40, 1, rng);
  const DenseMatrix x = u * v.transpose();
  const double exact = u.norm() * v.norm();
  for (int seed = 0; seed < 20; ++seed) {
    RngStream r(static_cast<std::uint64_t>(seed));
    for (Index s : {1, 2, 8, 100}) {
      const auto sk = column_subsample(x, s, r);
      EXPECT_NEAR(spectral_norm(sk.S), exact, 1e-10 * exact);
      for (Index i = 0; i < s; ++i) EXPECT_NEAR(sk.S.col(i).norm(), x.norm() / std::sqrt(double(s)), 1e-10 * exact);
    }
  }
}

TEST(ColumnSubsample, ColumnsAreScaledSourceColumns) {
  RngStream rng(5);
  const DenseMatrix x = fixtures::gaussian(8, 12, rng);
  const auto sk = column_subsample(x, 20, rng);
  ASSERT_EQ(sk.S.cols(), 20);
  for (Index i = 0; i < 20; ++i) {
    EXPECT_GT(sk.scales[static_cast<std::size_t>(i)], 0.0);
    EXPECT_EQ(sk.S.col(i), x.col(sk.indices[static_cast<std::size_t>(i)]) * sk.scales[static_cast<std::size_t>(i)]);
  }
}

TEST(ColumnSubsample, CompressedPreservesGram) {
  RngStream rng(6);
  const DenseMatrix x = fixtures::gaussian(7, 5, rng);
  const auto sk = column_subsample(x, 40, rng);
  const DenseMatrix t = sk.compressed();
  EXPECT_LE(t.cols(), 5);
  EXPECT_LE((t * t.transpose() - sk.S * sk.S.transpose()).norm(), 1e-12 * (sk.S * sk.S.transpose()).norm());
}

TEST(ColumnSubsample, GramIsUnbiased) {
  RngStream rng(7);
  const DenseMatrix x = fixtures::gaussian(4, 10, rng);
  const DenseMatrix xx = x * x.transpose();
  const int trials = 10000;
  DenseMatrix sum = DenseMatrix::Zero(4, 4), sq = DenseMatrix::Zero(4, 4);
  double frob = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto sk = column_subsample(x, 3, rng);
    const DenseMatrix g = sk.S * sk.S.transpose();
    sum += g;
    sq += g.cwiseProduct(g);
    frob += (g - xx).norm();
  }
  const DenseMatrix mean = sum / trials;
  const double z = fixtures::familywise_z(16);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      const double var = sq(i, j) / trials - mean(i, j) * mean(i, j);
      EXPECT_NEAR(mean(i, j), xx(i, j), z * std::sqrt(var / trials));
    }
  EXPECT_LE(frob / trials, x.squaredNorm() / std::sqrt(3.0));
}

TEST(ColumnSubsample, Determinism) {
  const DenseMatrix x = DenseMatrix::Random(6, 9);
  RngStream a(99), b(99);
  const auto s1 = column_subsample(x, 15, a), s2 = column_subsample(x, 15, b);
  EXPECT_EQ(s1.indices, s2.indices);
  EXPECT_EQ(s1.S, s2.S);
}

TEST(RowSubsample, TransposeOfColumnSketch) {
  const DenseMatrix x = DenseMatrix::Random(9, 6);
  RngStream a(21), b(21);
  const auto rows = row_subsample(x, 5, a);
  const DenseMatrix xt = x.transpose();
  const auto cols = column_subsample(xt, 5, b);
  EXPECT_EQ(rows.indices, cols.indices);
  EXPECT_EQ(rows.R, DenseMatrix(cols.S.transpose()));
}

TEST(ElementwiseSubsample, FullProbabilityIsIdentity) {
  RngStream rng(8);
  const SymMatrix x = fixtures::random_symmetric(12, rng);
  const auto s = elementwise_subsample(x, 1.0, rng);
  EXPECT_EQ(s.to_dense(), x.dense());
}

TEST(ElementwiseSubsample, SymmetricAndUnbiased) {
  RngStream rng(9);
  const SymMatrix x = fixtures::random_symmetric(5, rng);
  const int trials = 10000;
  const double p = 0.3;
  DenseMatrix sum = DenseMatrix::Zero(5, 5);
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix s = elementwise_subsample(x, p, rng).to_dense();
    ASSERT_EQ(s, DenseMatrix(s.transpose()));
    sum += s;
  }
  const double z = fixtures::familywise_z(15);
  for (Index j = 0; j < 5; ++j)
    for (Index i = j; i < 5; ++i) {
      const double sd = std::abs(x(i, j)) * std::sqrt((1 - p) / p / trials);
      EXPECT_NEAR(sum(i, j) / trials, x(i, j), z * sd + 1e-12);
    }
}

TEST(ElementwiseSubsample, ErrorScalesLikeRootNOverP) {
  // Logged diagnostic for the asymptotic bound; only the trend is asserted.
  RngStream rng(10);
  const Index n = 200;
  DenseMatrix g = fixtures::rademacher(n, n, rng);
  const SymMatrix x(DenseMatrix(g.triangularView<Eigen::Lower>()) + DenseMatrix(g.triangularView<Eigen::StrictlyLower>()).transpose());
  // Entry variance is X_ij^2 (1 - p) / p, so err / sqrt(n (1 - p) / p) should hold steady.
  double first = 0.0;
  for (double p : {0.8, 0.4, 0.2}) {
    const DenseMatrix s = elementwise_subsample(x, p, rng).to_dense();
    const double err = spectral_norm(SymMatrix(DenseMatrix(x.dense() - s)));
    const double bound = 4.0 * x.max_abs() * std::sqrt(n / p);
    const double trend = err / std::sqrt(n * (1 - p) / p);
    std::printf("p=%.1f err=%.3f bound=%.3f ratio=%.3f trend=%.3f\n", p, err, bound, err / bound, trend);
    EXPECT_LT(err, bound);
    if (first == 0.0) first = trend;
    EXPECT_NEAR(trend, first, 0.25 * first);
  }
}
