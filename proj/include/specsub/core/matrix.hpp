#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "specsub/core/error.hpp"

namespace specsub {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Column-major real matrix; every kernel samples columns of one of these.
using DenseMatrix = Eigen::MatrixXd;

inline bool all_finite(const Eigen::Ref<const DenseMatrix>& x) { return x.allFinite(); }

inline void require_finite(const Eigen::Ref<const DenseMatrix>& x, const char* what) {
  if (!x.allFinite()) throw Error(Errc::invalid_argument, what);
}

inline double max_abs(const Eigen::Ref<const DenseMatrix>& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

// Real symmetric matrix. Input is symmetrized on construction, so X(i,j) == X(j,i)
// holds bit-for-bit afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(DenseMatrix m) : data_(std::move(m)) {
    require(data_.rows() == data_.cols(), "SymMatrix: matrix must be square");
    require_finite(data_, "SymMatrix: entries must be finite");
    symmetrize_in_place(data_);
  }

  static SymMatrix identity(Index n) { return SymMatrix(DenseMatrix::Identity(n, n)); }
  static SymMatrix zero(Index n) { return SymMatrix(DenseMatrix::Zero(n, n)); }
  static SymMatrix diagonal(const Vector& d) { return SymMatrix(DenseMatrix(d.asDiagonal())); }

  Index dim() const noexcept { return data_.rows(); }
  const DenseMatrix& dense() const noexcept { return data_; }
  double operator()(Index i, Index j) const { return data_(i, j); }

  double frobenius() const { return data_.norm(); }
  double max_abs() const { return specsub::max_abs(data_); }

  static void symmetrize_in_place(DenseMatrix& m) {
    const Index n = m.rows();
    for (Index j = 0; j < n; ++j) {
      for (Index i = j + 1; i < n; ++i) {
        const double avg = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = avg;
        m(j, i) = avg;
      }
    }
  }

 private:
  DenseMatrix data_;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Coordinate-format matrix. For symmetric matrices both (i,j) and (j,i) are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Triplet> entries, bool symmetric)
      : rows_(rows), cols_(cols), entries_(std::move(entries)), symmetric_(symmetric) {}

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool symmetric() const noexcept { return symmetric_; }
  const std::vector<Triplet>& entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  DenseMatrix to_dense() const {
    DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
    for (const auto& t : entries_) out(t.row, t.col) += t.value;
    return out;
  }

  void apply(const Vector& x, Vector& y) const {
    y.setZero(rows_);
    for (const auto& t : entries_) y[t.row] += t.value * x[t.col];
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Triplet> entries_;
  bool symmetric_ = false;
};

}  // namespace specsub
