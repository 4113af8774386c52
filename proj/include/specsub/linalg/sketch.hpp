#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/linalg/sampling.hpp"

namespace specsub {

// Scaled column sample S of a source matrix X: column i of S is
// X^(indices[i]) * scales[i] with scales[i] = 1/sqrt(s q_j). Draws are with
// replacement, so rate may exceed the source column count.
struct ColumnSketch {
  Index source_cols = 0;
  Index rate = 0;
  std::vector<Index> indices;
  std::vector<double> scales;
  DenseMatrix S;

  // Merges repeated draws into one column per distinct source column, scaled by
  // the root of the summed squared scales. T T^T == S S^T, so singular values
  // and left singular vectors are unchanged.
  ColumnSketch merged() const {
    std::map<Index, double> weight;
    std::map<Index, Index> first;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      weight[indices[i]] += scales[i] * scales[i];
      first.try_emplace(indices[i], static_cast<Index>(i));
    }
    ColumnSketch out;
    out.source_cols = source_cols;
    out.rate = rate;
    out.S.resize(S.rows(), static_cast<Index>(weight.size()));
    Index c = 0;
    for (const auto& [src, w] : weight) {
      const Index i = first[src];
      const double scale = std::sqrt(w);
      out.indices.push_back(src);
      out.scales.push_back(scale);
      out.S.col(c++) = S.col(i) * (scale / scales[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  DenseMatrix compressed() const { return merged().S; }
};

// Row sample of X; equal to the transpose of a column sketch of X^T under the same draws.
struct RowSketch {
  Index source_rows = 0;
  Index rate = 0;
  std::vector<Index> indices;
  std::vector<double> scales;
  DenseMatrix R;  // rate x cols
};

// C R approximating A B (C: m x s, R: s x p).
struct ProductSketch {
  std::vector<Index> indices;
  std::vector<double> scales;
  DenseMatrix C;
  DenseMatrix R;

  DenseMatrix product() const { return C * R; }
};

inline ColumnSketch column_subsample(const Eigen::Ref<const DenseMatrix>& x,
                                     const SamplingDistribution& q, Index s, RngStream& rng) {
  require(s >= 1, "column_subsample: rate must be >= 1");
  require(static_cast<Index>(q.size()) == x.cols(), "column_subsample: distribution size mismatch");
  ColumnSketch out;
  out.source_cols = x.cols();
  out.rate = s;
  out.indices.resize(static_cast<std::size_t>(s));
  out.scales.resize(static_cast<std::size_t>(s));
  out.S.resize(x.rows(), s);
  const double sd = static_cast<double>(s);
  for (Index i = 0; i < s; ++i) {
    const Index j = q.draw(rng);
    const double scale = 1.0 / std::sqrt(sd * q.prob(j));
    out.indices[static_cast<std::size_t>(i)] = j;
    out.scales[static_cast<std::size_t>(i)] = scale;
    out.S.col(i) = x.col(j) * scale;
  }
  return out;
}

inline ColumnSketch column_subsample(const Eigen::Ref<const DenseMatrix>& x, Index s, RngStream& rng) {
  return column_subsample(x, column_probs(x), s, rng);
}

inline RowSketch row_subsample(const Eigen::Ref<const DenseMatrix>& x, Index s, RngStream& rng) {
  const DenseMatrix xt = x.transpose();
  ColumnSketch cs = column_subsample(xt, s, rng);
  return RowSketch{x.rows(), s, std::move(cs.indices), std::move(cs.scales), cs.S.transpose()};
}

inline ProductSketch subsampled_product(const Eigen::Ref<const DenseMatrix>& a,
                                        const Eigen::Ref<const DenseMatrix>& b, Index s,
                                        RngStream& rng) {
  require(s >= 1, "subsampled_product: rate must be >= 1");
  const SamplingDistribution q = product_probs(a, b);
  ProductSketch out;
  out.indices.resize(static_cast<std::size_t>(s));
  out.scales.resize(static_cast<std::size_t>(s));
  out.C.resize(a.rows(), s);
  out.R.resize(s, b.cols());
  const double sd = static_cast<double>(s);
  for (Index i = 0; i < s; ++i) {
    const Index j = q.draw(rng);
    const double scale = 1.0 / std::sqrt(sd * q.prob(j));
    out.indices[static_cast<std::size_t>(i)] = j;
    out.scales[static_cast<std::size_t>(i)] = scale;
    out.C.col(i) = a.col(j) * scale;
    out.R.row(i) = b.row(j) * scale;
  }
  return out;
}

// Keeps each entry X_ij (i >= j) independently with probability p, rescaled by 1/p,
// and mirrors it to (j, i). E[S] = X.
inline SparseMatrix elementwise_subsample(const SymMatrix& x, double p, RngStream& rng) {
  require(p > 0.0 && p <= 1.0, "elementwise_subsample: p must be in (0, 1]");
  const Index n = x.dim();
  std::vector<Triplet> kept;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const bool keep = p >= 1.0 || rng.bernoulli(p);
      const double v = x(i, j);
      if (!keep || v == 0.0) continue;
      kept.push_back({i, j, v / p});
      if (i != j) kept.push_back({j, i, v / p});
    }
  }
  return SparseMatrix(n, n, std::move(kept), true);
}

}  // namespace specsub
