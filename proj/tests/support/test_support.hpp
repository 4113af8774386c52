#pragma once

#include <cmath>

#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"

namespace specsub::fixtures {

inline DenseMatrix gaussian(Index rows, Index cols, RngStream& rng) {
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline DenseMatrix rademacher(Index rows, Index cols, RngStream& rng) {
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.sign();
  return m;
}

inline SymMatrix random_symmetric(Index n, RngStream& rng) {
  DenseMatrix g = gaussian(n, n, rng);
  return SymMatrix(DenseMatrix((g + g.transpose()) / std::sqrt(2.0 * static_cast<double>(n))));
}

// Symmetric matrix Q diag(mu) Q^T with Q orthogonal (from Householder QR of a Gaussian).
inline SymMatrix with_spectrum(const Vector& mu, RngStream& rng) {
  const Index n = mu.size();
  Eigen::HouseholderQR<DenseMatrix> qr(gaussian(n, n, rng));
  DenseMatrix q = qr.householderQ();
  return SymMatrix(DenseMatrix(q * mu.asDiagonal() * q.transpose()));
}

// Per-entry z threshold so that `count` simultaneous two-sided checks have the
// same familywise false-alarm rate as a single 3-sigma check (Bonferroni).
inline double familywise_z(double count) {
  const double alpha = std::erfc(3.0 / std::sqrt(2.0)) / count;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > alpha) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace specsub::fixtures
