#include <gtest/gtest.h>

#include <algorithm>

#include "specsub/krylov/eigs.hpp"
#include "specsub/krylov/jacobi.hpp"
#include "specsub/krylov/lanczos.hpp"
#include "specsub/krylov/tridiag.hpp"
#include "test_support.hpp"

using namespace specsub;

namespace {

Vector linspace_desc(Index n, double hi, double lo) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = hi + (lo - hi) * double(i) / double(std::max<Index>(n - 1, 1));
  return v;
}

}  // namespace

TEST(Tridiagonal, BisectionMatchesJacobi) {
  RngStream rng(1);
  Tridiagonal t;
  for (int i = 0; i < 12; ++i) t.diag.push_back(rng.normal());
  for (int i = 0; i < 11; ++i) t.off.push_back(rng.normal());
  const auto ref = jacobi_eig(SymMatrix(t.dense()));
  const auto vals = tridiagonal_eigenvalues(t);
  ASSERT_EQ(vals.size(), 12u);
  for (Index i = 0; i < 12; ++i) EXPECT_NEAR(vals[static_cast<std::size_t>(i)], ref.values[11 - i], 1e-12);
}

TEST(Tridiagonal, EigenvectorsWithClusters) {
  Tridiagonal t;
  t.diag = {2, 2, 2, 2, 5};
  t.off = {0, 1e-15, 0, 0};
  const auto vals = tridiagonal_eigenvalues(t);
  const auto vecs = tridiagonal_eigenvectors(t, vals);
  const DenseMatrix d = t.dense();
  DenseMatrix v(5, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const Eigen::Map<const Vector> y(vecs[i].data(), 5);
    v.col(static_cast<Index>(i)) = y;
    EXPECT_LE((d * y - vals[i] * y).norm(), 1e-12);
  }
  EXPECT_LE((v.transpose() * v - DenseMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lanczos, FullKrylovSpaceOfDiagonal) {
  DenseMatrix x = Vector::LinSpaced(5, 1, 5).asDiagonal();
  DenseSymOperator op(x);
  const auto f = lanczos(op, Vector::Ones(5) / std::sqrt(5.0), 5);
  auto vals = tridiagonal_eigenvalues(f.t);
  std::sort(vals.begin(), vals.end());
  ASSERT_EQ(vals.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(vals[static_cast<std::size_t>(i)], i + 1.0, 1e-10);
  EXPECT_LE(f.residual_identity(op), 1e-8 * 5.0);
}

TEST(Lanczos, ResidualIdentityAndOrthogonality) {
  RngStream rng(2);
  const SymMatrix x = fixtures::random_symmetric(300, rng);
  DenseSymOperator op(x);
  const auto f = lanczos(op, detail::random_unit(300, rng), 30);
  ASSERT_EQ(f.steps(), 30);
  const double tnorm = spectral_norm(SymMatrix(f.t.dense()));
  EXPECT_LE(f.residual_identity(op), 1e-8 * tnorm);
  EXPECT_LE((f.basis.transpose() * f.basis - DenseMatrix::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-8);
  const auto ref = jacobi_eig(x);
  const double theta = tridiagonal_eigenvalue(f.t, 29);
  // 30 steps on a semicircle spectrum only pins the edge coarsely; the tighter check is below.
  EXPECT_LE(theta, ref.values[0] + 1e-10);
  EXPECT_GE(theta, ref.values[0] - 0.1 * ref.values.cwiseAbs().maxCoeff());
}

TEST(Lanczos, MatchesJacobiOnGappedSpectrum) {
  RngStream rng(3);
  Vector mu = linspace_desc(300, 1.0, -1.0);
  mu[0] = 3.0;
  const SymMatrix x = fixtures::with_spectrum(mu, rng);
  DenseSymOperator op(x);
  const auto f = lanczos(op, detail::random_unit(300, rng), 30);
  const auto ref = jacobi_eig(x);
  EXPECT_NEAR(tridiagonal_eigenvalue(f.t, 29), ref.values[0], 1e-6 * 3.0);
}

TEST(Lanczos, BreakdownOnInvariantSubspace) {
  DenseMatrix x = Vector::LinSpaced(6, 1, 6).asDiagonal();
  DenseSymOperator op(x);
  Vector u = Vector::Zero(6);
  u[0] = u[1] = 1.0;
  const auto f = lanczos(op, u, 5);
  EXPECT_TRUE(f.breakdown);
  EXPECT_EQ(f.steps(), 2);
  EXPECT_LE(f.residual_identity(op), 1e-12);
}

TEST(Lanczos, Preconditions) {
  DenseMatrix x = DenseMatrix::Identity(3, 3);
  DenseSymOperator op(x);
  EXPECT_THROW(lanczos(op, Vector::Zero(3), 2), Error);
  EXPECT_THROW(lanczos(op, Vector::Ones(3), 0), Error);
  EXPECT_THROW(lanczos(op, Vector::Ones(2), 2), Error);
}

TEST(LeadingEigpair, DiagonalExample) {
  DenseMatrix x = Vector(Eigen::Vector3d(5, 1, 1)).asDiagonal();
  DenseSymOperator op(x);
  RngStream rng(4);
  const auto p = leading_eigpair(op, 1e-10, 5, rng);
  EXPECT_NEAR(p.value, 5.0, 1e-8);
  EXPECT_NEAR(std::abs(p.vector[0]), 1.0, 1e-8);
  EXPECT_NEAR(p.vector.norm(), 1.0, 1e-12);
}

TEST(LeadingEigpair, RepeatedLeadingEigenvalue) {
  RngStream rng(5);
  Vector mu = linspace_desc(60, 0.5, -0.5);
  mu[0] = mu[1] = 2.0;
  const SymMatrix x = fixtures::with_spectrum(mu, rng);
  DenseSymOperator op(x);
  const auto ref = jacobi_eig(x);
  const DenseMatrix top = ref.vectors.leftCols(2);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RngStream r(seed);
    const auto p = leading_eigpair(op, 1e-9, 5, r);
    EXPECT_NEAR(p.value, 2.0, 1e-8);
    EXPECT_LE(p.residual, 1e-9 * 2.0);
    EXPECT_NEAR((top.transpose() * p.vector).norm(), 1.0, 1e-8);
  }
}

TEST(LeadingEigpair, AgreesWithJacobiOnRandomFixtures) {
  RngStream rng(6);
  for (int f = 0; f < 6; ++f) {
    const Index n = 40 + 40 * f;
    const SymMatrix x = fixtures::random_symmetric(n, rng);
    DenseSymOperator op(x);
    const auto ref = jacobi_eig(x);
    EXPECT_LE((x.dense() * ref.vectors - ref.vectors * ref.values.asDiagonal()).norm(), 1e-9 * x.frobenius());
    const auto p = leading_eigpair(op, 1e-8, 10, rng);
    EXPECT_GE(p.value, (1 - 1e-8) * ref.values[0]);
    EXPECT_NEAR(p.value, ref.values[0], 1e-6 * std::abs(ref.values[0]));
  }
}

TEST(LeadingEigpairs, MultiplePairsWithMultiplicity) {
  RngStream rng(7);
  Vector mu = linspace_desc(50, 1.0, 0.0);
  mu[0] = 4.0;
  mu[1] = mu[2] = 3.0;
  const SymMatrix x = fixtures::with_spectrum(mu, rng);
  DenseSymOperator op(x);
  EigOptions opts;
  opts.tol = 1e-10;
  const auto res = leading_eigpairs(op, 3, opts, rng);
  ASSERT_TRUE(res.converged);
  ASSERT_EQ(res.pairs.size(), 3u);
  EXPECT_NEAR(res.pairs[0].value, 4.0, 1e-8);
  EXPECT_NEAR(res.pairs[1].value, 3.0, 1e-8);
  EXPECT_NEAR(res.pairs[2].value, 3.0, 1e-8);
}

TEST(LeadingSingular, RowVectorExample) {
  DenseMatrix s = DenseMatrix::Zero(3, 2);
  s(0, 0) = s(0, 1) = 1.0 / std::sqrt(2.0);
  RngStream rng(8);
  const auto r = leading_singular(s, 1, 1e-10, rng);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.triplets[0].sigma, 1.0, 1e-10);
  EXPECT_NEAR(std::abs(r.triplets[0].left[0]), 1.0, 1e-10);
}

TEST(LeadingSingular, MatchesJacobiOfGram) {
  RngStream rng(9);
  const DenseMatrix s = fixtures::gaussian(200, 40, rng);
  const auto ref = jacobi_eig(SymMatrix(DenseMatrix(s.transpose() * s)));
  const auto r = leading_singular(s, 3, 1e-10, rng);
  ASSERT_TRUE(r.converged);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(r.triplets[static_cast<std::size_t>(i)].sigma, std::sqrt(ref.values[i]), 1e-6 * std::sqrt(ref.values[i]));
  }
}

TEST(LeadingSingular, StochasticMatrixHasUnitTopValue) {
  // Lazy random walk on a 7-cycle: symmetric doubly stochastic.
  const Index n = 7;
  DenseMatrix p = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    p(i, i) = 0.5;
    p(i, (i + 1) % n) += 0.25;
    p(i, (i + n - 1) % n) += 0.25;
  }
  RngStream rng(10);
  const auto r = leading_singular(p, 2, 1e-12, rng);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.triplets[0].sigma, 1.0, 1e-8);
  EXPECT_LT(r.triplets[1].sigma, 1.0 - 1e-3);
}

TEST(Jacobi, Examples) {
  const auto id = jacobi_eig(SymMatrix::identity(3));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(id.values[i], 1.0);

  const double c = std::cos(0.7), s = std::sin(0.7);
  DenseMatrix rot = DenseMatrix::Identity(3, 3);
  rot(0, 0) = c; rot(0, 2) = -s; rot(2, 0) = s; rot(2, 2) = c;
  const Vector mu = Eigen::Vector3d(-1.0, 4.0, 2.5);
  const auto res = jacobi_eig(SymMatrix(DenseMatrix(rot * mu.asDiagonal() * rot.transpose())));
  EXPECT_NEAR(res.values[0], 4.0, 1e-10);
  EXPECT_NEAR(res.values[1], 2.5, 1e-10);
  EXPECT_NEAR(res.values[2], -1.0, 1e-10);
}

TEST(Jacobi, TraceAndOrthogonality) {
  RngStream rng(11);
  const SymMatrix x = fixtures::random_symmetric(100, rng);
  const auto res = jacobi_eig(x);
  EXPECT_NEAR(res.values.sum(), x.dense().trace(), 1e-9);
  EXPECT_LE((res.vectors.transpose() * res.vectors - DenseMatrix::Identity(100, 100)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((x.dense() * res.vectors - res.vectors * res.values.asDiagonal()).norm(), 1e-9 * x.frobenius());
}

TEST(Jacobi, DimensionCap) {
  try {
    jacobi_eig(SymMatrix::identity(5), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_cap);
  }
}

TEST(Operators, LinearAndSymmetricOnProbes) {
  RngStream rng(12);
  const SymMatrix x = fixtures::random_symmetric(25, rng);
  const DenseMatrix s = fixtures::gaussian(25, 9, rng);
  DenseSymOperator dop(x);
  GramOperator gop(s);
  auto check = [&](const auto& op) {
    const Vector u = fixtures::gaussian(25, 1, rng), v = fixtures::gaussian(25, 1, rng);
    Vector au(25), av(25), mix(25);
    op.apply(u, au);
    op.apply(v, av);
    op.apply(Vector(2.5 * u + v), mix);
    EXPECT_LE((mix - 2.5 * au - av).norm(), 1e-10 * (mix.norm() + 1));
    EXPECT_NEAR(u.dot(av), v.dot(au), 1e-10 * (std::abs(u.dot(av)) + 1));
  };
  check(dop);
  check(gop);
  EXPECT_EQ(gop.entries_per_apply(), 2u * 25u * 9u);
}

TEST(IterationBound, Logged) {
  RngStream rng(13);
  for (int f = 0; f < 20; ++f) {
    const SymMatrix x = fixtures::random_symmetric(80, rng);
    DenseSymOperator op(x);
    EigOptions opts;
    EigResult res = leading_eigpairs(op, 1, opts, rng);
    const Index bound = lanczos_iteration_bound(80, 0.01, 1e-8);
    std::printf("fixture %d: iterations %ld, bound %ld\n", f, static_cast<long>(res.iterations), static_cast<long>(bound));
    EXPECT_TRUE(res.converged);
  }
}
