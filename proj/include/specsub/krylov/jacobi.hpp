#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"

namespace specsub {

inline constexpr Index kJacobiDimensionCap = 2000;

struct SymmetricEigen {
  Vector values;         // descending
  DenseMatrix vectors;   // column i pairs with values[i]
  int sweeps = 0;
};

// Full spectrum by cyclic Jacobi rotations. Slow (O(n^3) per sweep) but simple and
// accurate; serves as the exact baseline for the Krylov solvers.
inline SymmetricEigen jacobi_eig(const SymMatrix& x, Index cap = kJacobiDimensionCap, int max_sweeps = 100) {
  const Index n = x.dim();
  if (n > cap) throw Error(Errc::dimension_cap, "jacobi_eig: dimension exceeds cap");
  DenseMatrix a = x.dense();
  DenseMatrix v = DenseMatrix::Identity(n, n);
  const double total = a.norm();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index q = 1; q < n; ++q) off += a.col(q).head(q).squaredNorm();
    if (std::sqrt(2.0 * off) <= 1e-15 * total || total == 0.0) break;

    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that cannot change the diagonal in floating point.
        if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace specsub
