#pragma once

#include <cmath>
#include <cstdint>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"

namespace specsub {

inline constexpr Index kDefaultRateCap = 100'000'000;

// Confidence multiplier 1 + sqrt(8 log(1/beta)); beta = 1 gives the
// expectation-only value 1.
inline double confidence_eta(double beta) {
  require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
  return 1.0 + std::sqrt(8.0 * std::log(1.0 / beta));
}

struct RateResult {
  double exact = 0.0;  // formula value before rounding
  Index s = 1;
  bool overflow = false;
};

namespace detail {

inline RateResult finish_rate(double value, Index cap) {
  RateResult r;
  r.exact = value;
  // Shave relative rounding noise so an exact integer is not bumped up by one.
  const double rounded = std::ceil(value * (1.0 - 1e-12));
  if (!std::isfinite(rounded) || rounded > static_cast<double>(cap)) {
    r.s = cap;
    r.overflow = true;
  } else {
    r.s = std::max<Index>(1, static_cast<Index>(rounded));
  }
  return r;
}

}  // namespace detail

// Column count guaranteeing | ||S||_2 - ||X||_2 | <= eps with probability 1 - beta:
// s = eta^2 ||X||_2^2 / eps^2 * NumRank(X)^2.
inline RateResult spectral_rate(double norm2, double numrank, double eps, double beta,
                                Index cap = kDefaultRateCap) {
  require(eps > 0.0, "spectral_rate: eps must be positive");
  require(norm2 > 0.0, "spectral_rate: norm must be positive");
  require(numrank >= 1.0 - 1e-12, "spectral_rate: numerical rank must be >= 1");
  const double eta = confidence_eta(beta);
  return detail::finish_rate(eta * eta * norm2 * norm2 / (eps * eps) * numrank * numrank, cap);
}

// Column count for the sum of the k leading singular values:
// s = eta^2 (sum sigma)^2 / eps^2 * NumRank^2 / k^2 * kappa^4 * Rank,
// kappa = sigma_1 / sigma_r with r = min(k, Rank).
inline RateResult ksum_rate(double sigma_sum, double eps, Index k, double numrank, double kappa,
                            Index rank, double beta, Index cap = kDefaultRateCap) {
  require(eps > 0.0, "ksum_rate: eps must be positive");
  require(k >= 1, "ksum_rate: k must be >= 1");
  require(kappa >= 1.0, "ksum_rate: kappa must be >= 1");
  require(rank >= 1, "ksum_rate: rank must be >= 1");
  const double eta = confidence_eta(beta);
  const double kd = static_cast<double>(k);
  const double k4 = kappa * kappa * kappa * kappa;
  return detail::finish_rate(eta * eta * sigma_sum * sigma_sum / (eps * eps) * numrank * numrank /
                                 (kd * kd) * k4 * static_cast<double>(rank),
                             cap);
}

}  // namespace specsub
