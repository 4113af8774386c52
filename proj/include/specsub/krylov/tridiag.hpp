#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"

namespace specsub {

// Symmetric tridiagonal matrix: diag[0..k), off[0..k-1) with off[i] = T(i, i+1).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  Index size() const noexcept { return static_cast<Index>(diag.size()); }

  double norm_bound() const {
    // Gershgorin-style bound on ||T||_2.
    double m = 0.0;
    const std::size_t k = diag.size();
    for (std::size_t i = 0; i < k; ++i) {
      double r = std::abs(diag[i]);
      if (i > 0) r += std::abs(off[i - 1]);
      if (i + 1 < k) r += std::abs(off[i]);
      m = std::max(m, r);
    }
    return m;
  }

  DenseMatrix dense() const {
    const Index k = size();
    DenseMatrix t = DenseMatrix::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
      t(i, i) = diag[static_cast<std::size_t>(i)];
      if (i + 1 < k) {
        t(i, i + 1) = off[static_cast<std::size_t>(i)];
        t(i + 1, i) = off[static_cast<std::size_t>(i)];
      }
    }
    return t;
  }
};

namespace detail {

inline double pivot_floor(const Tridiagonal& t) {
  double m = std::numeric_limits<double>::min();
  for (double b : t.off) m = std::max(m, b * b);
  return std::numeric_limits<double>::min() * std::max(1.0, m);
}

// Number of eigenvalues of T strictly less than x (Sturm sequence).
inline Index sturm_count(const Tridiagonal& t, double x, double pivmin) {
  Index count = 0;
  double q = 1.0;
  const std::size_t k = t.diag.size();
  for (std::size_t i = 0; i < k; ++i) {
    q = t.diag[i] - x - (i > 0 ? t.off[i - 1] * t.off[i - 1] / q : 0.0);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// Gaussian elimination with partial pivoting for (T - shift I), stored LAPACK gttrf style.
struct ShiftedTridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<unsigned char> swapped;

  ShiftedTridiagonalLU(const Tridiagonal& t, double shift, double tiny) {
    const std::size_t n = t.diag.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    dl = t.off;
    du = t.off;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && d[n - 1] == 0.0) d[n - 1] = tiny;
    for (double& v : d) {
      if (std::abs(v) < tiny) v = v < 0.0 ? -tiny : tiny;
    }
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    if (n == 0) return;
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t ii = n; ii-- > 2;) {
      const std::size_t i = ii - 2;
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }
};

}  // namespace detail

// The index-th smallest eigenvalue (0-based) by bisection.
inline double tridiagonal_eigenvalue(const Tridiagonal& t, Index index) {
  const Index k = t.size();
  require(index >= 0 && index < k, "tridiagonal_eigenvalue: index out of range");
  const double bound = t.norm_bound();
  const double pivmin = detail::pivot_floor(t);
  double lo = -bound - pivmin;
  double hi = bound + pivmin;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
    if (detail::sturm_count(t, mid, pivmin) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All eigenvalues, ascending.
inline std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& t) {
  std::vector<double> out(static_cast<std::size_t>(t.size()));
  for (Index i = 0; i < t.size(); ++i) out[static_cast<std::size_t>(i)] = tridiagonal_eigenvalue(t, i);
  return out;
}

// Unit eigenvectors of T for the given (ascending-sorted or not) eigenvalues, by
// inverse iteration. Eigenvalues closer than 1e-3 ||T|| are treated as a cluster
// and their vectors are orthogonalized against each other; exactly repeated
// values get their shifts nudged apart first.
inline std::vector<std::vector<double>> tridiagonal_eigenvectors(const Tridiagonal& t,
                                                                 const std::vector<double>& values) {
  const std::size_t k = t.diag.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(t.norm_bound(), std::numeric_limits<double>::min());
  const double cluster_tol = 1e-3 * scale;
  const double tiny = eps * scale;

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<std::vector<double>> vectors(values.size());
  std::vector<std::size_t> cluster;  // indices (into values) of the current cluster
  double prev_shift = 0.0;
  RngStream rng(0x5eed, k);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t idx = order[pos];
    double shift = values[idx];
    if (pos > 0 && values[idx] - values[order[pos - 1]] > cluster_tol) cluster.clear();
    if (pos > 0 && shift - prev_shift < 10.0 * eps * std::max(std::abs(shift), scale)) {
      shift = prev_shift + 10.0 * eps * std::max(std::abs(shift), scale);
    }
    prev_shift = shift;

    detail::ShiftedTridiagonalLU lu(t, shift, tiny);
    std::vector<double> z(k);
    for (auto& v : z) v = rng.uniform() - 0.5;
    for (int iter = 0; iter < 6; ++iter) {
      double nrm = 0.0;
      for (double v : z) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (auto& v : z) v /= nrm;
      lu.solve(z);
      for (std::size_t c : cluster) {
        const auto& w = vectors[c];
        double dot = 0.0;
        for (std::size_t i = 0; i < k; ++i) dot += w[i] * z[i];
        for (std::size_t i = 0; i < k; ++i) z[i] -= dot * w[i];
      }
      double grown = 0.0;
      for (double v : z) grown = std::max(grown, std::abs(v));
      // Growth beyond 1/(sqrt(k) eps-ish) means z is already an eigenvector to working precision.
      if (iter >= 1 && grown * tiny > 1e-3) break;
    }
    double nrm = 0.0;
    for (double v : z) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (auto& v : z) v /= nrm;
    vectors[idx] = std::move(z);
    cluster.push_back(idx);
  }
  return vectors;
}

}  // namespace specsub
