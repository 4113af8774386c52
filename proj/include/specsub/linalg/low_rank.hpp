#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/krylov/eigs.hpp"
#include "specsub/linalg/sketch.hpp"

namespace specsub {

struct LowRankApprox {
  DenseMatrix H;   // m x r, r <= k approximate left singular vectors
  Vector sigma2;   // the r leading eigenvalues of S^T S, descending
  bool rank_deficient = false;
  ColumnSketch sketch;
};

// Approximate top-k left singular vectors of X from a column sketch:
// H^(i) = S Y^(i) / sqrt(sigma_i) where S^T S = Y diag(sigma) Y^T.
// Eigenvalues below 1e-12 sigma_1 are dropped and the result is flagged.
inline LowRankApprox low_rank_from_sketch(ColumnSketch sketch, Index k) {
  require(k >= 1 && k <= sketch.rate, "low_rank_approx: need 1 <= k <= s");
  LowRankApprox out;
  const DenseMatrix gram = sketch.S.transpose() * sketch.S;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram);
  const Index s = gram.rows();
  const double top = std::max(es.eigenvalues()[s - 1], 0.0);
  Index r = 0;
  while (r < k && es.eigenvalues()[s - 1 - r] > 1e-12 * top && top > 0.0) ++r;
  out.rank_deficient = r < k;
  out.H.resize(sketch.S.rows(), r);
  out.sigma2.resize(r);
  for (Index i = 0; i < r; ++i) {
    const double lam = es.eigenvalues()[s - 1 - i];
    out.sigma2[i] = lam;
    out.H.col(i) = sketch.S * es.eigenvectors().col(s - 1 - i) / std::sqrt(lam);
  }
  out.sketch = std::move(sketch);
  return out;
}

inline LowRankApprox low_rank_approx(const Eigen::Ref<const DenseMatrix>& x, Index k, Index s, RngStream& rng) {
  require(k >= 1 && k <= s, "low_rank_approx: need 1 <= k <= s");
  return low_rank_from_sketch(column_subsample(x, s, rng), k);
}

// ||X||_F^2 / ||X||_2^2, between 1 and Rank(X).
inline double numerical_rank(const DenseMatrix& x) {
  const double f2 = x.squaredNorm();
  if (!(f2 > 0.0)) throw Error(Errc::all_zero, "numerical_rank: zero matrix");
  const double n2 = spectral_norm(x);
  return std::max(1.0, f2 / (n2 * n2));
}

inline double numerical_rank(const SymMatrix& x) {
  const double f2 = x.dense().squaredNorm();
  if (!(f2 > 0.0)) throw Error(Errc::all_zero, "numerical_rank: zero matrix");
  const double n2 = spectral_norm(x);
  return std::max(1.0, f2 / (n2 * n2));
}

}  // namespace specsub
