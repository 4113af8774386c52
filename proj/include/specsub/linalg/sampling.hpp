#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"

namespace specsub {

// Discrete distribution over indices 0..n-1, drawn by inverse CDF.
//
// Only indices with positive probability enter the cumulative table, so a
// zero-probability index can never be drawn and never produces a 0/0 scale.
class SamplingDistribution {
 public:
  enum class Tables { all, alias_only };

  // Normalizes nonnegative weights. Throws Errc::all_zero if they sum to zero.
  // With Tables::alias_only only draw_alias() is available.
  static SamplingDistribution from_weights(std::span<const double> weights, Tables tables = Tables::all) {
    double total = 0.0;
    for (double w : weights) {
      require(std::isfinite(w) && w >= 0.0, "sampling weights must be finite and nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw Error(Errc::all_zero, "all sampling weights are zero");

    SamplingDistribution d;
    d.probs_.resize(weights.size());
    d.support_.reserve(weights.size());
    d.cumulative_.reserve(weights.size());
    double running = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      d.probs_[i] = weights[i] / total;
      if (weights[i] > 0.0) {
        running += weights[i];
        d.support_.push_back(static_cast<Index>(i));
        d.cumulative_.push_back(running / total);
      }
    }
    d.cumulative_.back() = 1.0;
    if (tables == Tables::all) d.build_guide();
    d.build_alias();
    return d;
  }

  static SamplingDistribution from_weights(const Vector& weights, Tables tables = Tables::all) {
    return from_weights(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())), tables);
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double prob(Index i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  // Prefix sums over the support, ending at exactly 1.
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }
  const std::vector<Index>& support() const noexcept { return support_; }

  // First cumulative entry above u, located from a guide table of cut points
  // (same answer as a binary search, expected O(1) probes).
  Index draw(RngStream& rng) const {
    require(!guide_.empty(), "draw: distribution was built for alias draws only");
    const double u = rng.uniform();
    const std::size_t last = cumulative_.size() - 1;
    std::size_t i = guide_[std::min(static_cast<std::size_t>(u * static_cast<double>(guide_.size())), guide_.size() - 1)];
    while (i < last && cumulative_[i] <= u) ++i;
    return support_[i];
  }

  // Same distribution through Walker's alias table; used by the product samplers.
  Index draw_alias(RngStream& rng) const {
    const double u = rng.uniform() * static_cast<double>(alias_.size());
    const auto j = std::min(static_cast<std::size_t>(u), alias_.size() - 1);
    const double frac = u - static_cast<double>(j);
    const std::size_t mask = 0 - static_cast<std::size_t>(frac >= keep_[j]);
    return support_[j ^ ((j ^ alias_[j]) & mask)];
  }

 private:
  // Vose's construction over the support. Small entries stack up from the
  // front of `work`, large ones down from the back.
  void build_alias() {
    const std::size_t m = cumulative_.size();
    keep_.resize(m);
    alias_.resize(m);
    std::vector<std::size_t> work(m);
    std::size_t ns = 0, nl = m;
    const double dm = static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      keep_[i] = probs_[static_cast<std::size_t>(support_[i])] * dm;
      alias_[i] = i;
      if (keep_[i] < 1.0)
        work[ns++] = i;
      else
        work[--nl] = i;
    }
    while (ns > 0 && nl < m) {
      const std::size_t a = work[--ns], b = work[nl];
      alias_[a] = b;
      keep_[b] -= 1.0 - keep_[a];
      if (keep_[b] < 1.0) {
        ++nl;
        work[ns++] = b;
      }
    }
    // Leftovers hold 1 up to rounding.
    for (std::size_t i = 0; i < ns; ++i) keep_[work[i]] = 1.0;
    for (std::size_t i = nl; i < m; ++i) keep_[work[i]] = 1.0;
  }

  void build_guide() {
    const std::size_t m = cumulative_.size();
    guide_.resize(m);
    std::size_t i = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double cut = static_cast<double>(k) / static_cast<double>(m);
      while (i + 1 < m && cumulative_[i] <= cut) ++i;
      guide_[k] = i;
    }
  }

  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<Index> support_;
  std::vector<std::size_t> guide_;
  std::vector<double> keep_;
  std::vector<std::size_t> alias_;
};

// s iid draws from the distribution proportional to `weights`, reported as
// fn(index, multiplicity, probability) in increasing index order. Sorted
// uniforms come from normalized exponential spacings and are merged against the
// running weight sum, so no table is built.
template <typename Fn>
void sorted_draws(std::span<const double> weights, Index s, RngStream& rng, Fn&& fn) {
  require(s >= 1, "sorted_draws: s must be >= 1");
  double total = 0.0;
  std::size_t last = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] >= 0.0, "sampling weights must be finite and nonnegative");
    total += weights[i];
    if (weights[i] > 0.0) last = i;
  }
  if (!(total > 0.0)) throw Error(Errc::all_zero, "all sampling weights are zero");
  std::vector<double> points(static_cast<std::size_t>(s));
  double acc = 0.0;
  for (auto& p : points) {
    acc -= std::log(rng.uniform_pos());
    p = acc;
  }
  const double scale = total / (acc - std::log(rng.uniform_pos()));
  std::size_t t = 0, i = 0;
  double running = 0.0;
  while (t < points.size()) {
    const double u = points[t] * scale;
    while (i < last && running + weights[i] <= u) running += weights[i++];
    // Past `last` only rounding can land; the last positive weight takes it.
    Index count = 0;
    while (t < points.size() && (i == last || points[t] * scale < running + weights[i])) {
      ++count;
      ++t;
    }
    fn(static_cast<Index>(i), count, weights[i] / total);
    running += weights[i++];
  }
}

// q_i proportional to ||A^(i)||_2 ||B_(i)||_2 (column i of A, row i of B).
inline SamplingDistribution product_probs(const Eigen::Ref<const DenseMatrix>& a,
                                          const Eigen::Ref<const DenseMatrix>& b) {
  require(a.cols() == b.rows(), "product_probs: inner dimensions disagree");
  std::vector<double> w(static_cast<std::size_t>(a.cols()));
  for (Index i = 0; i < a.cols(); ++i) {
    w[static_cast<std::size_t>(i)] = a.col(i).norm() * b.row(i).norm();
  }
  return SamplingDistribution::from_weights(w);
}

// q_i = ||X^(i)||_2^2 / ||X||_F^2.
inline SamplingDistribution column_probs(const Eigen::Ref<const DenseMatrix>& x) {
  std::vector<double> w(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j) w[static_cast<std::size_t>(j)] = x.col(j).squaredNorm();
  return SamplingDistribution::from_weights(w);
}

}  // namespace specsub
