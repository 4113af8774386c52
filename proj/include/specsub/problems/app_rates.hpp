#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "specsub/core/matrix.hpp"
#include "specsub/linalg/rates.hpp"

namespace specsub {

// Sampling rates predicted from a computed solution, for the run logs.
struct AppRate {
  RateResult rate;
  Index capped = 0;  // min(s, n)
  bool degenerate = false;
  double numrank = 0.0;
  Index rank = 0;
  double kappa = 1.0;
};

namespace detail {

inline Vector abs_spectrum(const DenseMatrix& x) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(x, Eigen::EigenvaluesOnly);
  Vector s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

inline Index numeric_rank(const Vector& s, double rel = 1e-6) {
  Index r = 0;
  while (r < s.size() && s[r] > rel * s[0]) ++r;
  return r;
}

inline AppRate finish(AppRate a, double value, Index n) {
  a.rate = detail::finish_rate(value, kDefaultRateCap);
  a.capped = std::min(a.rate.s, n);
  return a;
}

}  // namespace detail

// eta^2 ||X||_2^2 / eps^2 * NumRank(X)^2 at X = A + U*.
inline AppRate spectral_box_rate(const DenseMatrix& x, double eps, double beta) {
  const Vector s = detail::abs_spectrum(x);
  AppRate a;
  a.numrank = s[0] > 0.0 ? s.squaredNorm() / (s[0] * s[0]) : 0.0;
  if (!(s[0] > 0.0)) {
    a.degenerate = true;
    return detail::finish(a, 1.0, x.rows());
  }
  a.rate = spectral_rate(s[0], a.numrank, eps, beta);
  a.capped = std::min(a.rate.s, x.rows());
  return a;
}

// eta^2 ||Y||_tr^2 / eps^2 * kappa^2 * Rank at the completed matrix Y.
inline AppRate collab_rate(const DenseMatrix& y, double eps, double beta) {
  const Vector s = detail::abs_spectrum(y);
  AppRate a;
  a.rank = detail::numeric_rank(s);
  if (a.rank == 0) {
    a.degenerate = true;
    return detail::finish(a, 1.0, y.rows());
  }
  a.kappa = s[0] / s[a.rank - 1];
  a.numrank = s.squaredNorm() / (s[0] * s[0]);
  const double eta = confidence_eta(beta), tr = s.sum();
  return detail::finish(a, eta * eta * tr * tr / (eps * eps) * a.kappa * a.kappa * static_cast<double>(a.rank), y.rows());
}

// eta^2 ||y||_1 / eps^2 * kappa(y)^2 * Card(y), kappa = |y|_[1] / |y|_[r].
inline AppRate lasso_rate(const Vector& y, double eps, double beta) {
  Vector s = y.cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  AppRate a;
  a.rank = s.size() > 0 ? detail::numeric_rank(s) : 0;
  if (a.rank == 0) {
    a.degenerate = true;
    return detail::finish(a, 1.0, y.size());
  }
  a.kappa = s[0] / s[a.rank - 1];
  const double eta = confidence_eta(beta);
  return detail::finish(a, eta * eta * s.sum() / (eps * eps) * a.kappa * a.kappa * static_cast<double>(a.rank), y.size());
}

// eta^2 NumRank(P)^2 Rank(P) / (eps^2 sigma_2(P)^2); sigma_2 near 0 makes it
// blow up, in which case the rate is reported as n and flagged.
inline AppRate fmmc_rate(const DenseMatrix& p, double eps, double beta) {
  const Vector s = detail::abs_spectrum(p);
  AppRate a;
  a.rank = detail::numeric_rank(s);
  a.numrank = s.squaredNorm() / (s[0] * s[0]);
  const double s2 = s.size() > 1 ? s[1] : 0.0;
  if (s2 <= 1e-12 * s[0]) {
    a.degenerate = true;
    a.rate.exact = std::numeric_limits<double>::infinity();
    a.rate.s = p.rows();
    a.rate.overflow = true;
    a.capped = p.rows();
    return a;
  }
  const double eta = confidence_eta(beta);
  return detail::finish(a, eta * eta * a.numrank * a.numrank * static_cast<double>(a.rank) / (eps * eps * s2 * s2),
                        p.rows());
}

}  // namespace specsub
