#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"

namespace specsub {

// Nonzero row of the stacked operator matrix: the row indexed by cell (r, c) of
// the n x n grid holds ((A_1)_rc, ..., (A_p)_rc).
struct StackedRow {
  Index r;
  Index c;
  double norm;
};

// Symmetric operators A_1..A_p of a common dimension n.
class OperatorFamily {
 public:
  virtual ~OperatorFamily() = default;

  virtual Index dim() const = 0;
  virtual Index size() const = 0;
  // x += sum_j y_j A_j
  virtual void accumulate(const Vector& y, DenseMatrix& x) const = 0;
  // x = c + sum_j y_j A_j
  virtual void assign(const DenseMatrix& c, const Vector& y, DenseMatrix& x) const {
    x = c;
    accumulate(y, x);
  }
  // (<A_j, G>)_j for a symmetric G
  virtual Vector adjoint(const DenseMatrix& g) const = 0;
  virtual const std::vector<StackedRow>& rows() const = 0;
  // g += coef * (row of the stacked matrix)^T
  virtual void add_row(std::size_t row, double coef, Vector& g) const = 0;

  double frobenius_sq() const {
    double s = 0.0;
    for (const auto& r : rows()) s += r.norm * r.norm;
    return s;
  }

  // Explicit n^2 x p stacked matrix (column j = vec(A_j)); small n only.
  DenseMatrix stacked() const {
    const Index n = dim(), p = size();
    DenseMatrix out(n * n, p);
    Vector e = Vector::Zero(p);
    DenseMatrix a(n, n);
    for (Index j = 0; j < p; ++j) {
      e.setZero();
      e[j] = 1.0;
      a.setZero();
      accumulate(e, a);
      out.col(j) = Eigen::Map<const Vector>(a.data(), n * n);
    }
    return out;
  }
};

struct Cell {
  Index i;  // i <= j
  Index j;
};

// B_ij = E_ii on the diagonal and E_ij + E_ji off it; one variable per cell.
class SymmetricUnitBasis final : public OperatorFamily {
 public:
  SymmetricUnitBasis(Index n, std::vector<Cell> cells) : n_(n), cells_(std::move(cells)) {
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      auto& c = cells_[k];
      if (c.i > c.j) std::swap(c.i, c.j);
      require(c.i >= 0 && c.j < n_, "unit basis: cell out of range");
      rows_.push_back({c.i, c.j, 1.0});
      owner_.push_back(k);
      if (c.i != c.j) {
        rows_.push_back({c.j, c.i, 1.0});
        owner_.push_back(k);
      }
    }
    full_grid_ = static_cast<Index>(cells_.size()) == n_ * (n_ + 1) / 2;
    for (std::size_t k = 0; full_grid_ && k < cells_.size(); ++k) {
      full_grid_ = cell_index(cells_[k].i, cells_[k].j) == static_cast<Index>(k);
    }
  }

  // Every cell of the upper triangle, in column-major order.
  static std::vector<Cell> all_cells(Index n) {
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i <= j; ++i) cells.push_back({i, j});
    return cells;
  }

  Index dim() const override { return n_; }
  Index size() const override { return static_cast<Index>(cells_.size()); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  // True when the variables are every upper-triangle cell in all_cells order.
  bool full_grid() const noexcept { return full_grid_; }
  static Index cell_index(Index i, Index j) {
    if (i > j) std::swap(i, j);
    return j * (j + 1) / 2 + i;
  }
  // (<B_ij, U diag(s) U^T>)_ij straight from the factors; full grid only.
  Vector adjoint_low_rank(const DenseMatrix& u, const Vector& s) const {
    const DenseMatrix us = u * s.asDiagonal();
    const DenseMatrix ut = u.transpose();
    const DenseMatrix ust = us.transpose();
    Vector out(size());
    Index k = 0;
    for (Index j = 0; j < n_; ++j) {
      const auto wj = ust.col(j);
      for (Index i = 0; i < j; ++i) out[k++] = 2.0 * ut.col(i).dot(wj);
      out[k++] = ut.col(j).dot(wj);
    }
    return out;
  }

  // g[cell(i, j)] = coef * sgn_i * sgn_j * (m_ij + m_ji) (m_jj on the diagonal); full grid only.
  template <typename Tally>
  void fold_tallies(const Tally& m, const Vector& sgn, double coef, Vector& g) const {
    g.resize(size());
    constexpr Index tile = 64;
    for (Index jb = 0; jb < n_; jb += tile) {
      const Index je = std::min(n_, jb + tile);
      for (Index ib = 0; ib <= jb; ib += tile) {
        const Index ie = std::min(je, ib + tile);
        for (Index j = jb; j < je; ++j) {
          const double cj = coef * sgn[j];
          const Index base = j * (j + 1) / 2;
          for (Index i = ib; i < std::min(ie, j); ++i)
            g[base + i] = cj * sgn[i] * static_cast<double>(m(i, j) + m(j, i));
          if (j >= ib && j < ie) g[base + j] = coef * static_cast<double>(m(j, j));
        }
      }
    }
  }

  // g += coef * row (r, c); full grid only.
  void add_cell(Index r, Index c, double coef, Vector& g) const {
    const Index lo = std::min(r, c), hi = std::max(r, c);
    g[hi * (hi + 1) / 2 + lo] += coef;
  }

  void accumulate(const Vector& y, DenseMatrix& x) const override {
    if (full_grid_) {
      accumulate_grid(y, x);
      return;
    }
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      const auto [i, j] = cells_[k];
      const double v = y[static_cast<Index>(k)];
      x(i, j) += v;
      if (i != j) x(j, i) += v;
    }
  }

  void assign(const DenseMatrix& c, const Vector& y, DenseMatrix& x) const override {
    if (!full_grid_) {
      OperatorFamily::assign(c, y, x);
      return;
    }
    x.resize(n_, n_);
    Index k = 0;
    for (Index j = 0; j < n_; ++j) {
      double* col = x.col(j).data();
      const double* src = c.col(j).data();
      for (Index i = 0; i <= j; ++i) col[i] = src[i] + y[k++];
    }
    constexpr Index tile = 32;
    for (Index jb = 0; jb < n_; jb += tile) {
      const Index je = std::min(n_, jb + tile);
      for (Index ib = jb; ib < n_; ib += tile) {
        const Index ie = std::min(n_, ib + tile);
        for (Index j = jb; j < je; ++j)
          for (Index i = std::max(ib, j + 1); i < ie; ++i) x(i, j) = c(i, j) + y[i * (i + 1) / 2 + j];
      }
    }
  }

  Vector adjoint(const DenseMatrix& g) const override {
    Vector out(size());
    if (full_grid_) {
      const DenseMatrix s = g + g.transpose();
      Index k = 0;
      for (Index j = 0; j < n_; ++j) {
        for (Index i = 0; i < j; ++i) out[k++] = s(i, j);
        out[k++] = g(j, j);
      }
      return out;
    }
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      const auto [i, j] = cells_[k];
      out[static_cast<Index>(k)] = i == j ? g(i, i) : g(i, j) + g(j, i);
    }
    return out;
  }

  const std::vector<StackedRow>& rows() const override { return rows_; }

  void add_row(std::size_t row, double coef, Vector& g) const override {
    g[static_cast<Index>(owner_[row])] += coef;
  }

 private:
  // Upper triangle column by column, then a tiled mirror into the lower one.
  void accumulate_grid(const Vector& y, DenseMatrix& x) const {
    Index k = 0;
    for (Index j = 0; j < n_; ++j) {
      double* col = x.col(j).data();
      for (Index i = 0; i < j; ++i) col[i] += y[k++];
      col[j] += y[k++];
    }
    constexpr Index tile = 32;
    for (Index jb = 0; jb < n_; jb += tile) {
      const Index je = std::min(n_, jb + tile);
      for (Index ib = jb; ib < n_; ib += tile) {
        const Index ie = std::min(n_, ib + tile);
        for (Index j = jb; j < je; ++j)
          for (Index i = std::max(ib, j + 1); i < ie; ++i) x(i, j) += y[i * (i + 1) / 2 + j];
      }
    }
  }

  Index n_;
  std::vector<Cell> cells_;
  std::vector<StackedRow> rows_;
  std::vector<std::size_t> owner_;
  bool full_grid_ = false;
};

struct Edge {
  Index u;
  Index v;
};

// A_e = -(e_u - e_v)(e_u - e_v)^T for each edge.
class EdgeLaplacian final : public OperatorFamily {
 public:
  EdgeLaplacian(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), incident_(static_cast<std::size_t>(n)) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      require(u >= 0 && v >= 0 && u < n_ && v < n_ && u != v, "edge laplacian: bad edge");
      incident_[static_cast<std::size_t>(u)].push_back(e);
      incident_[static_cast<std::size_t>(v)].push_back(e);
    }
    for (Index r = 0; r < n_; ++r) {
      const auto deg = incident_[static_cast<std::size_t>(r)].size();
      if (deg > 0) {
        rows_.push_back({r, r, std::sqrt(static_cast<double>(deg))});
        kind_.push_back({-1, r});
      }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      rows_.push_back({edges_[e].u, edges_[e].v, 1.0});
      kind_.push_back({static_cast<Index>(e), 0});
      rows_.push_back({edges_[e].v, edges_[e].u, 1.0});
      kind_.push_back({static_cast<Index>(e), 0});
    }
  }

  Index dim() const override { return n_; }
  Index size() const override { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::vector<std::size_t>>& incident() const noexcept { return incident_; }

  void accumulate(const Vector& y, DenseMatrix& x) const override {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      const double w = y[static_cast<Index>(e)];
      x(u, u) -= w;
      x(v, v) -= w;
      x(u, v) += w;
      x(v, u) += w;
    }
  }

  Vector adjoint(const DenseMatrix& g) const override {
    Vector out(size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      out[static_cast<Index>(e)] = g(u, v) + g(v, u) - g(u, u) - g(v, v);
    }
    return out;
  }

  const std::vector<StackedRow>& rows() const override { return rows_; }

  void add_row(std::size_t row, double coef, Vector& g) const override {
    const auto [edge, vertex] = kind_[row];
    if (edge >= 0) {
      g[edge] += coef;
    } else {
      for (std::size_t e : incident_[static_cast<std::size_t>(vertex)]) g[static_cast<Index>(e)] -= coef;
    }
  }

 private:
  struct RowKind {
    Index edge;    // -1 for a diagonal row
    Index vertex;
  };
  Index n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<StackedRow> rows_;
  std::vector<RowKind> kind_;
};

// A_j = E_jj.
class DiagonalBasis final : public OperatorFamily {
 public:
  explicit DiagonalBasis(Index n) : n_(n) {
    for (Index j = 0; j < n; ++j) rows_.push_back({j, j, 1.0});
  }

  Index dim() const override { return n_; }
  Index size() const override { return n_; }
  void accumulate(const Vector& y, DenseMatrix& x) const override { x.diagonal() += y; }
  Vector adjoint(const DenseMatrix& g) const override { return g.diagonal(); }
  const std::vector<StackedRow>& rows() const override { return rows_; }
  void add_row(std::size_t row, double coef, Vector& g) const override { g[static_cast<Index>(row)] += coef; }

 private:
  Index n_;
  std::vector<StackedRow> rows_;
};

// Arbitrary dense symmetric operators.
class DenseFamily final : public OperatorFamily {
 public:
  explicit DenseFamily(std::vector<SymMatrix> ops) : ops_(std::move(ops)) {
    require(!ops_.empty(), "dense family: need at least one operator");
    n_ = ops_.front().dim();
    for (const auto& a : ops_) require(a.dim() == n_, "dense family: dimension mismatch");
    const Index p = size();
    for (Index c = 0; c < n_; ++c)
      for (Index r = 0; r < n_; ++r) {
        double s = 0.0;
        for (Index j = 0; j < p; ++j) s += ops_[static_cast<std::size_t>(j)](r, c) * ops_[static_cast<std::size_t>(j)](r, c);
        if (s > 0.0) rows_.push_back({r, c, std::sqrt(s)});
      }
  }

  Index dim() const override { return n_; }
  Index size() const override { return static_cast<Index>(ops_.size()); }

  void accumulate(const Vector& y, DenseMatrix& x) const override {
    for (std::size_t j = 0; j < ops_.size(); ++j) x += y[static_cast<Index>(j)] * ops_[j].dense();
  }

  Vector adjoint(const DenseMatrix& g) const override {
    Vector out(size());
    for (std::size_t j = 0; j < ops_.size(); ++j) out[static_cast<Index>(j)] = ops_[j].dense().cwiseProduct(g).sum();
    return out;
  }

  const std::vector<StackedRow>& rows() const override { return rows_; }

  void add_row(std::size_t row, double coef, Vector& g) const override {
    const auto& rw = rows_[row];
    for (std::size_t j = 0; j < ops_.size(); ++j) g[static_cast<Index>(j)] += coef * ops_[j](rw.r, rw.c);
  }

 private:
  Index n_ = 0;
  std::vector<SymMatrix> ops_;
  std::vector<StackedRow> rows_;
};

}  // namespace specsub
