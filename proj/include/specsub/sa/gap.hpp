#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsub/core/counters.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/sa/geometry.hpp"
#include "specsub/sa/gradient.hpp"
#include "specsub/sa/problem.hpp"

namespace specsub {

// Lower bound <C, G> - S_Q(w), w = b - A^T vec(G), valid for any G in the dual
// norm ball of the objective.
struct DualCertificate {
  double c = 0.0;
  Vector w;
};

inline DualCertificate make_certificate(const AffineSpectralProblem& prob, const DenseMatrix& g) {
  DualCertificate d;
  d.c = prob.C.dense().cwiseProduct(g).sum();
  d.w = prob.p() > 0 ? Vector(prob.b - prob.family->adjoint(g)) : Vector(prob.b);
  return d;
}

inline double dual_value(const ProxGeometry& q, const DualCertificate& d) {
  return d.c - (d.w.size() > 0 ? q.support(d.w) : 0.0);
}

// Weighted running average of the certificates produced by the iterations;
// convex combinations of dual-feasible points stay dual-feasible.
class AveragedCertificate {
 public:
  void reset(Index n) {
    g_ = DenseMatrix::Zero(n, n);
    weight_ = 0.0;
  }
  void add(const DenseMatrix& u, const Vector& signs, double weight) {
    if (u.cols() == 0 || weight <= 0.0) {
      weight_ += weight;
      return;
    }
    weight_ += weight;
    const double a = weight / weight_;
    g_ *= 1.0 - a;
    g_.noalias() += a * (u * signs.asDiagonal() * u.transpose());
  }
  bool empty() const { return weight_ <= 0.0; }
  const DenseMatrix& matrix() const { return g_; }

 private:
  DenseMatrix g_;
  double weight_ = 0.0;
};

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  DenseMatrix v;  // certificate vectors at y
  Vector w;       // w_j = b_j - <A_j, G> for the certificate that gave `dual`
  bool exact_norm_used = false;
  bool averaged = false;  // dual came from the averaged certificate
  double point_dual = -std::numeric_limits<double>::infinity();
  double averaged_dual = -std::numeric_limits<double>::infinity();
};

struct ExactNorm {
  double value = 0.0;
  DenseMatrix U;
  Vector lambda;
};

// Sum of the k largest |eigenvalues| of X(y) with the eigenvectors.
inline ExactNorm exact_objective_norm(const AffineSpectralProblem& prob, const Vector& y, double tol, RngStream& rng,
                                      CostCounters* cost = nullptr) {
  CostCounters local;
  CostCounters& c = cost ? *cost : local;
  ExactNorm out;
  DenseMatrix x;
  prob.materialize_into(y, x);
  if (x.squaredNorm() == 0.0) {
    out.U.resize(prob.n(), 0);
    out.lambda.resize(0);
    return out;
  }
  detail::exact_top_pairs(x, prob.terms(), tol, true, rng, c, out.U, out.lambda);
  out.value = out.lambda.cwiseAbs().sum();
  return out;
}

// Surrogate duality gap at y. With `exact`, the norm and certificate come from an
// exact eigensolve of X(y); otherwise from the supplied sampled subgradient.
inline GapReport surrogate_gap(const AffineSpectralProblem& prob, const ProxGeometry& q, const Vector& y, bool exact,
                               double tol, RngStream& rng, const Subgradient* sampled = nullptr,
                               const AveragedCertificate* avg = nullptr, CostCounters* cost = nullptr) {
  GapReport r;
  DenseMatrix u;
  Vector signs;
  double norm = 0.0;
  if (exact || sampled == nullptr) {
    ExactNorm ex = exact_objective_norm(prob, y, tol, rng, cost);
    norm = ex.value;
    u = std::move(ex.U);
    signs = ex.lambda.unaryExpr([](double v) { return v < 0 ? -1.0 : 1.0; });
    r.exact_norm_used = true;
  } else {
    norm = sampled->norm_estimate;
    u = sampled->U;
    signs = sampled->signs;
  }
  r.primal = norm - prob.b.dot(y);
  DualCertificate point = make_certificate(prob, detail::certificate_matrix(u, signs));
  r.point_dual = dual_value(q, point);
  r.dual = r.point_dual;
  r.w = point.w;
  if (avg && !avg->empty()) {
    DualCertificate a = make_certificate(prob, avg->matrix());
    r.averaged_dual = dual_value(q, a);
    if (r.averaged_dual > r.dual) {
      r.dual = r.averaged_dual;
      r.w = a.w;
      r.averaged = true;
    }
  }
  r.v = std::move(u);
  r.gap = r.primal - r.dual;
  return r;
}

}  // namespace specsub
