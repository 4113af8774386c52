#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "specsub/core/counters.hpp"
#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/krylov/eigs.hpp"
#include "specsub/krylov/oracle.hpp"
#include "specsub/linalg/sampling.hpp"
#include "specsub/linalg/sketch.hpp"
#include "specsub/sa/problem.hpp"

namespace specsub {

enum class GradientMode { sampled, exact };

inline const char* to_string(GradientMode m) { return m == GradientMode::sampled ? "sampled" : "exact"; }

struct GradientOptions {
  Index s1 = 1;
  Index s2 = 1;
  GradientMode mode = GradientMode::sampled;
  double tol = 1e-8;
  bool verify_multiplicity = false;
};

// g together with the certificate G = sum_i signs_i u_i u_i^T that produced it.
struct Subgradient {
  Vector g;
  DenseMatrix U;      // n x r
  Vector signs;       // +-1
  Vector sigma;       // singular value estimates of X(y)
  double norm_estimate = 0.0;  // sum of sigma
  bool zero_matrix = false;
};

namespace detail {

inline DenseMatrix certificate_matrix(const DenseMatrix& u, const Vector& signs) {
  return u * signs.asDiagonal() * u.transpose();
}

// Eigenpairs of largest magnitude of a dense symmetric matrix.
inline void exact_top_pairs(const DenseMatrix& x, Index r, double tol, bool verify, RngStream& rng,
                            CostCounters& cost, DenseMatrix& u, Vector& lambda) {
  const Index n = x.rows();
  DenseSymOperator op(x);
  EigResult res;
  if (2 * r <= n) {
    EigOptions opts;
    opts.tol = tol;
    opts.which = Which::largest_magnitude;
    opts.verify_multiplicity = verify;
    res = leading_eigpairs(op, r, opts, rng);
    cost.matvecs += res.matvecs;
    cost.matvec_entries += res.entries;
  }
  // Small or stubborn cases go to a dense symmetric eigensolver.
  if (2 * r > n || !res.converged || static_cast<Index>(res.pairs.size()) < r) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(x);
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    u.resize(n, r);
    lambda.resize(r);
    for (Index i = 0; i < r; ++i) {
      u.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
      lambda[i] = es.eigenvalues()[order[static_cast<std::size_t>(i)]];
    }
    ++cost.dense_passes;
    return;
  }
  const Index got = static_cast<Index>(res.pairs.size());
  u.resize(n, got);
  lambda.resize(got);
  for (Index i = 0; i < got; ++i) {
    u.col(i) = res.pairs[static_cast<std::size_t>(i)].vector;
    lambda[i] = res.pairs[static_cast<std::size_t>(i)].value;
  }
}

// g = sampled product of the stacked operator matrix with vec(G), minus b.
using TallyMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;

inline void sampled_adjoint(const AffineSpectralProblem& prob, const DenseMatrix& u, const Vector& signs, Index s2,
                            RngStream& rng, CostCounters& cost, Vector& g, TallyMatrix& m) {
  const OperatorFamily& fam = *prob.family;
  const double s2d = static_cast<double>(s2);
  const auto* grid = dynamic_cast<const SymmetricUnitBasis*>(&fam);
  const bool fast = grid && grid->full_grid() && u.cols() == 1 && u.col(0).cwiseAbs().sum() > 0.0;
  if (!fast) g.setZero(prob.p());
  if (u.cols() == 0 || prob.p() == 0) return;

  if (fast) {
    // Unit row norms and G = +-v v^T: q_rc = |v_r| |v_c| / ||v||_1^2 factors.
    const Vector a = u.col(0).cwiseAbs();
    const double l1 = a.sum();
    const auto q = SamplingDistribution::from_weights(a, SamplingDistribution::Tables::alias_only);
    const double coef = signs[0] * l1 * l1 / s2d;
    const Vector sgn = u.col(0).cwiseSign();
    // Row draws first, then each row's column draws tallied in column r of m.
    const Index n = u.rows();
    std::vector<Index> count(static_cast<std::size_t>(n), 0);
    for (Index t = 0; t < s2; ++t) ++count[static_cast<std::size_t>(q.draw_alias(rng))];
    m.setZero(n, n);
    for (Index r = 0; r < n; ++r) {
      std::uint32_t* col = m.col(r).data();
      for (Index t = count[static_cast<std::size_t>(r)]; t > 0; --t) ++col[q.draw_alias(rng)];
    }
    grid->fold_tallies(m, sgn, coef, g);
    cost.product_samples += static_cast<std::uint64_t>(s2);
    return;
  }

  const auto& rows = fam.rows();
  std::vector<double> w(rows.size()), grc(rows.size());
  // Transposed copies so each row lookup reads contiguous memory.
  const DenseMatrix ust = (u * signs.asDiagonal()).transpose();
  const DenseMatrix ut = u.transpose();
  double total = 0.0;
  for (std::size_t e = 0; e < rows.size(); ++e) {
    grc[e] = ust.col(rows[e].r).dot(ut.col(rows[e].c));
    w[e] = rows[e].norm * std::abs(grc[e]);
    total += w[e];
  }
  if (!(total > 0.0)) return;
  sorted_draws(w, s2, rng, [&](Index e, Index count, double prob) {
    const auto ue = static_cast<std::size_t>(e);
    fam.add_row(ue, static_cast<double>(count) * grc[ue] / (s2d * prob), g);
  });
  cost.product_samples += static_cast<std::uint64_t>(s2);
}

}  // namespace detail

// Scratch space reused across iterations.
struct GradientWorkspace {
  DenseMatrix x;
  detail::TallyMatrix tally;
  const AffineSpectralProblem* b_owner = nullptr;
  bool b_zero = false;
};

// One stochastic subgradient of y -> ||pi^(s1)(X(y))|| - b^T y. In exact mode the
// leading eigenpairs of X(y) and the full adjoint are used instead of sketches.
inline Subgradient stochastic_subgradient(const AffineSpectralProblem& prob, const Vector& y,
                                          const GradientOptions& opt, RngStream& rng, CostCounters& cost,
                                          GradientWorkspace& ws) {
  require(opt.s1 >= 1 && opt.s2 >= 1, "subgradient: sampling rates must be >= 1");
  Subgradient out;
  const Index n = prob.n();
  {
    ScopedTimer t(cost.seconds_sketch);
    prob.materialize_into(y, ws.x);
    ++cost.dense_passes;
  }
  const Index r = prob.terms();

  if (opt.mode == GradientMode::exact) {
    Vector lambda;
    {
      ScopedTimer t(cost.seconds_eig);
      if (ws.x.squaredNorm() == 0.0) {
        out.zero_matrix = true;
        out.U.resize(n, 0);
        lambda.resize(0);
      } else {
        detail::exact_top_pairs(ws.x, r, opt.tol, opt.verify_multiplicity, rng, cost, out.U, lambda);
      }
    }
    out.signs = lambda.unaryExpr([](double v) { return v < 0 ? -1.0 : 1.0; });
    out.sigma = lambda.cwiseAbs();
    out.norm_estimate = out.sigma.sum();
    ScopedTimer t(cost.seconds_gradient);
    const auto* grid = dynamic_cast<const SymmetricUnitBasis*>(prob.family.get());
    if (out.U.cols() > 0 && grid && grid->full_grid()) {
      out.g = grid->adjoint_low_rank(out.U, out.signs) - prob.b;
    } else if (out.U.cols() > 0 && prob.p() > 0) {
      out.g = prob.family->adjoint(detail::certificate_matrix(out.U, out.signs)) - prob.b;
    } else {
      out.g = -prob.b;
    }
    return out;
  }

  ColumnSketch sk;
  {
    ScopedTimer t(cost.seconds_sketch);
    const Vector norms = ws.x.colwise().squaredNorm().transpose();
    if (!(norms.sum() > 0.0)) {
      out.zero_matrix = true;
    } else {
      sk = column_subsample(ws.x, SamplingDistribution::from_weights(norms), opt.s1, rng);
      cost.sampled_columns += static_cast<std::uint64_t>(opt.s1);
      if (opt.s1 > n) sk = sk.merged();
    }
  }
  if (out.zero_matrix) {
    out.U.resize(n, 0);
    out.signs.resize(0);
    out.sigma.resize(0);
    out.g = -prob.b;
    return out;
  }

  {
    ScopedTimer t(cost.seconds_eig);
    const Index rk = std::min({r, n, sk.S.cols()});
    SingularResult sv = leading_singular_auto(sk.S, rk, opt.tol, rng, opt.verify_multiplicity);
    cost.matvecs += sv.matvecs;
    cost.matvec_entries += sv.entries;
    // Directions the sketch does not see carry no information; drop them.
    Index got = 0;
    while (got < static_cast<Index>(sv.triplets.size()) &&
           sv.triplets[static_cast<std::size_t>(got)].sigma > 1e-6 * sv.triplets.front().sigma)
      ++got;
    out.U.resize(n, got);
    out.signs.resize(got);
    out.sigma.resize(got);
    for (Index i = 0; i < got; ++i) {
      const auto& tr = sv.triplets[static_cast<std::size_t>(i)];
      out.U.col(i) = tr.left;
      out.sigma[i] = tr.sigma;
      // Unbiased estimate of u^T X u from the sampled columns fixes the sign of the eigenvalue.
      double est = 0.0;
      for (Index c = 0; c < sk.S.cols(); ++c) {
        const double sc = sk.scales[static_cast<std::size_t>(c)];
        est += tr.left[sk.indices[static_cast<std::size_t>(c)]] * sc * sk.S.col(c).dot(tr.left);
      }
      out.signs[i] = est < 0 ? -1.0 : 1.0;
    }
    out.norm_estimate = out.sigma.sum();
  }

  ScopedTimer t(cost.seconds_gradient);
  detail::sampled_adjoint(prob, out.U, out.signs, opt.s2, rng, cost, out.g, ws.tally);
  if (ws.b_owner != &prob) {
    ws.b_owner = &prob;
    ws.b_zero = prob.b.isZero(0.0);
  }
  if (!ws.b_zero) out.g -= prob.b;
  return out;
}

// Sum of the k leading singular values of a column sketch of X(y).
inline double ksum_objective_estimate(const AffineSpectralProblem& prob, const Vector& y, Index k, Index s1,
                                      RngStream& rng, double tol = 1e-8) {
  require(k >= 1 && k <= s1, "ksum_objective_estimate: need 1 <= k <= s1");
  const DenseMatrix x = prob.materialize(y).dense();
  if (x.squaredNorm() == 0.0) return 0.0;
  ColumnSketch sk = column_subsample(x, s1, rng);
  if (s1 > x.cols()) sk = sk.merged();
  const Index rk = std::min({k, x.rows(), sk.S.cols()});
  const SingularResult sv = leading_singular(sk.S, rk, tol, rng, true);
  double s = 0.0;
  for (const auto& t : sv.triplets)
    if (t.sigma > 1e-6 * sv.triplets.front().sigma) s += t.sigma;
  return s;
}

}  // namespace specsub
