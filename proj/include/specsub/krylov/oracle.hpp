#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <utility>

#include "specsub/core/matrix.hpp"

namespace specsub {

enum class CostModel { dense, sparse, factored };

// A symmetric linear map accessed only through products u -> X u.
template <typename Op>
concept SymmetricOperator = requires(const Op& op, const Vector& x, Vector& y) {
  { op.dim() } -> std::convertible_to<Index>;
  { op.apply(x, y) };
  { op.entries_per_apply() } -> std::convertible_to<std::uint64_t>;
};

// u -> X u for a dense symmetric X (n^2 per product).
class DenseSymOperator {
 public:
  explicit DenseSymOperator(const DenseMatrix& x) : x_(&x) {}
  explicit DenseSymOperator(const SymMatrix& x) : x_(&x.dense()) {}

  Index dim() const noexcept { return x_->rows(); }
  void apply(const Vector& u, Vector& y) const { y.noalias() = (*x_) * u; }
  std::uint64_t entries_per_apply() const noexcept {
    return static_cast<std::uint64_t>(x_->rows()) * static_cast<std::uint64_t>(x_->cols());
  }
  static constexpr CostModel cost_model() noexcept { return CostModel::dense; }

 private:
  const DenseMatrix* x_;
};

// u -> S (S^T u) for a tall or wide S; eigenvalues are the squared singular values
// of S and eigenvectors its left singular vectors (2 m s per product).
class GramOperator {
 public:
  explicit GramOperator(const DenseMatrix& s) : s_(&s), tmp_(s.cols()) {}

  Index dim() const noexcept { return s_->rows(); }
  void apply(const Vector& u, Vector& y) const {
    tmp_.noalias() = s_->transpose() * u;
    y.noalias() = (*s_) * tmp_;
  }
  std::uint64_t entries_per_apply() const noexcept {
    return 2ULL * static_cast<std::uint64_t>(s_->rows()) * static_cast<std::uint64_t>(s_->cols());
  }
  static constexpr CostModel cost_model() noexcept { return CostModel::factored; }

 private:
  const DenseMatrix* s_;
  mutable Vector tmp_;
};

class SparseSymOperator {
 public:
  explicit SparseSymOperator(const SparseMatrix& x) : x_(&x) {}

  Index dim() const noexcept { return x_->rows(); }
  void apply(const Vector& u, Vector& y) const { x_->apply(u, y); }
  std::uint64_t entries_per_apply() const noexcept { return x_->nnz(); }
  static constexpr CostModel cost_model() noexcept { return CostModel::sparse; }

 private:
  const SparseMatrix* x_;
};

// Type-erased oracle for callers that only have a product routine.
class FunctionOperator {
 public:
  using Apply = std::function<void(const Vector&, Vector&)>;

  FunctionOperator(Index n, Apply apply, std::uint64_t entries, CostModel model)
      : n_(n), apply_(std::move(apply)), entries_(entries), model_(model) {}

  Index dim() const noexcept { return n_; }
  void apply(const Vector& u, Vector& y) const { apply_(u, y); }
  std::uint64_t entries_per_apply() const noexcept { return entries_; }
  CostModel cost_model() const noexcept { return model_; }

 private:
  Index n_;
  Apply apply_;
  std::uint64_t entries_;
  CostModel model_;
};

}  // namespace specsub
