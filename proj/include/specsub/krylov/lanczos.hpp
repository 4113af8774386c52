#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/krylov/oracle.hpp"
#include "specsub/krylov/tridiag.hpp"

namespace specsub {

// X U_k = U_k T_k + beta_k u_{k+1} e_k^T with orthonormal U_k.
struct LanczosFactorization {
  DenseMatrix basis;  // n x k
  Tridiagonal t;
  double beta_last = 0.0;
  Vector next;  // u_{k+1}; zero after breakdown
  bool breakdown = false;

  Index steps() const noexcept { return t.size(); }

  // || X U - U T - beta_k u_{k+1} e_k^T ||_F, recomputed with k extra products.
  template <SymmetricOperator Op>
  double residual_identity(const Op& op) const {
    const Index k = steps();
    DenseMatrix xu(basis.rows(), k);
    Vector y(basis.rows());
    for (Index j = 0; j < k; ++j) {
      op.apply(basis.col(j), y);
      xu.col(j) = y;
    }
    DenseMatrix r = xu - basis * t.dense();
    if (k > 0 && next.size() == r.rows()) r.col(k - 1) -= beta_last * next;
    return r.norm();
  }
};

// Lanczos recurrence with full (two-pass classical Gram-Schmidt) reorthogonalization,
// optionally restricted to the orthogonal complement of `locked` columns.
template <SymmetricOperator Op>
class LanczosProcess {
 public:
  LanczosProcess(const Op& op, const Vector& start, Index max_steps, const DenseMatrix* locked = nullptr)
      : op_(op), locked_(locked) {
    const Index n = op.dim();
    require(start.size() == n, "lanczos: start vector has wrong dimension");
    const Index room = n - (locked_ ? locked_->cols() : 0);
    max_steps_ = std::max<Index>(0, std::min(max_steps, room));
    basis_.resize(n, std::max<Index>(max_steps_, 1));
    w_.resize(n);
    Vector u = start;
    if (locked_ && locked_->cols() > 0) {
      for (int pass = 0; pass < 2; ++pass) u -= (*locked_) * (locked_->transpose() * u);
    }
    const double nrm = u.norm();
    require(nrm > 0.0 && std::isfinite(nrm), "lanczos: start vector must be nonzero");
    if (max_steps_ > 0) basis_.col(0) = u / nrm;
  }

  Index steps() const noexcept { return steps_; }
  Index max_steps() const noexcept { return max_steps_; }
  bool breakdown() const noexcept { return breakdown_; }
  bool done() const noexcept { return breakdown_ || steps_ >= max_steps_; }
  const Tridiagonal& tridiagonal() const noexcept { return t_; }
  double beta_last() const noexcept { return beta_last_; }
  std::uint64_t matvecs() const noexcept { return matvecs_; }
  std::uint64_t entries() const noexcept { return matvecs_ * op_.entries_per_apply(); }
  auto basis() const { return basis_.leftCols(steps_); }
  const Vector& next() const noexcept { return next_; }

  // Advances one step; returns false when no further step is possible.
  bool step() {
    if (done()) return false;
    const Index j = steps_;
    const auto uj = basis_.col(j);
    op_.apply(uj, w_);
    ++matvecs_;
    scale_ = std::max(scale_, w_.norm());
    const double alpha = uj.dot(w_);
    w_ -= alpha * uj;
    if (j > 0) w_ -= t_.off.back() * basis_.col(j - 1);
    const auto active = basis_.leftCols(j + 1);
    for (int pass = 0; pass < 2; ++pass) {
      w_ -= active * (active.transpose() * w_);
      if (locked_ && locked_->cols() > 0) w_ -= (*locked_) * (locked_->transpose() * w_);
    }
    const double beta = w_.norm();
    t_.diag.push_back(alpha);
    scale_ = std::max(scale_, std::abs(alpha));
    ++steps_;
    beta_last_ = beta;
    if (beta <= 1e-14 * scale_) {
      breakdown_ = true;
      next_.setZero(w_.size());
      return false;
    }
    next_ = w_ / beta;
    if (steps_ < max_steps_) {
      t_.off.push_back(beta);
      basis_.col(steps_) = next_;
    }
    return true;
  }

  LanczosFactorization factorization() const {
    LanczosFactorization f;
    f.basis = basis_.leftCols(steps_);
    f.t = t_;
    f.beta_last = beta_last_;
    f.next = next_.size() == basis_.rows() ? next_ : Vector::Zero(basis_.rows());
    f.breakdown = breakdown_;
    return f;
  }

 private:
  const Op& op_;
  const DenseMatrix* locked_;
  Index max_steps_ = 0;
  Index steps_ = 0;
  DenseMatrix basis_;
  Tridiagonal t_;
  Vector w_;
  Vector next_;
  double beta_last_ = 0.0;
  double scale_ = 0.0;
  bool breakdown_ = false;
  std::uint64_t matvecs_ = 0;
};

// k steps of the Lanczos recurrence from u1. Stops early on breakdown, which
// means an invariant subspace was found and the Ritz values are exact.
template <SymmetricOperator Op>
LanczosFactorization lanczos(const Op& op, const Vector& u1, Index k) {
  require(k >= 1, "lanczos: k must be >= 1");
  require(k <= op.dim(), "lanczos: k must not exceed the dimension");
  LanczosProcess<Op> proc(op, u1, k);
  while (proc.step()) {
  }
  return proc.factorization();
}

}  // namespace specsub
