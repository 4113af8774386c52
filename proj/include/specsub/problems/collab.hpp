#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/problems/instance.hpp"

namespace specsub {

struct Rating {
  Index i;
  Index j;
  double value;
};

// Observed entries of a symmetric ratings matrix; (i, j) and (j, i) name the same cell.
struct CollabFilterInstance {
  Index n = 0;
  std::vector<Rating> ratings;
  Index k = 4;
  bool center = true;
  double radius = 0.0;  // 0: 1.5 * rms(centered ratings) * sqrt(#unobserved cells)
};

struct CollabLayout {
  double mean = 0.0;
  double radius = 0.0;
  std::vector<Cell> observed;
  std::vector<Cell> missing;
};

namespace detail {

// Averages duplicate cells.
inline std::map<std::pair<Index, Index>, double> observed_cells(const CollabFilterInstance& c) {
  std::map<std::pair<Index, Index>, std::pair<double, int>> acc;
  for (const auto& r : c.ratings) {
    require(r.i >= 0 && r.j >= 0 && r.i < c.n && r.j < c.n, "collab: rating index out of range");
    require(std::isfinite(r.value), "collab: rating must be finite");
    auto& slot = acc[{std::min(r.i, r.j), std::max(r.i, r.j)}];
    slot.first += r.value;
    ++slot.second;
  }
  std::map<std::pair<Index, Index>, double> out;
  for (const auto& [cell, s] : acc) out[cell] = s.first / s.second;
  return out;
}

}  // namespace detail

// Fill in the unobserved cells: minimize the sum of the k largest singular values
// of C + Y, where C holds the (centered) observed ratings and Y is supported on the
// unobserved cells and kept in a Euclidean ball. kind = trace minimizes the trace norm.
inline ProblemInstance build_collab_filter(const CollabFilterInstance& c, CollabLayout* layout = nullptr,
                                           ObjectiveKind kind = ObjectiveKind::ksum) {
  require(c.n >= 1 && !c.ratings.empty(), "collab: need at least one observed entry");
  require(c.k >= 1, "collab: k must be >= 1");
  const auto cells = detail::observed_cells(c);
  CollabLayout lay;
  if (c.center) {
    double s = 0.0;
    for (const auto& [cell, v] : cells) s += v;
    lay.mean = s / static_cast<double>(cells.size());
  }
  DenseMatrix cm = DenseMatrix::Zero(c.n, c.n);
  double sq = 0.0;
  for (const auto& [cell, v] : cells) {
    const double x = v - lay.mean;
    cm(cell.first, cell.second) = x;
    cm(cell.second, cell.first) = x;
    sq += x * x;
    lay.observed.push_back({cell.first, cell.second});
  }
  for (Index j = 0; j < c.n; ++j)
    for (Index i = 0; i <= j; ++i)
      if (!cells.count({i, j})) lay.missing.push_back({i, j});

  const double rms = std::sqrt(sq / static_cast<double>(cells.size()));
  lay.radius = c.radius > 0.0 ? c.radius
                              : 1.5 * std::max(rms, 1e-12) * std::sqrt(static_cast<double>(lay.missing.size()));

  ProblemInstance inst;
  auto fam = std::make_shared<SymmetricUnitBasis>(c.n, lay.missing);
  inst.problem.family = fam;
  inst.problem.C = SymMatrix(std::move(cm));
  inst.problem.b = Vector::Zero(fam->size());
  inst.problem.kind = kind;
  inst.problem.k = kind == ObjectiveKind::trace ? c.n : c.k;
  inst.problem.name = kind == ObjectiveKind::trace ? "collab-trace" : "collab";
  inst.geometry = std::make_shared<EllipsoidGeometry>(EllipsoidGeometry::ball(fam->size(), lay.radius));
  if (layout) *layout = std::move(lay);
  return inst;
}

// Completed ratings matrix: X(y) with the mean added back.
inline DenseMatrix reconstruct_ratings(const ProblemInstance& inst, const CollabLayout& lay, const Vector& y) {
  DenseMatrix x;
  inst.problem.materialize_into(y, x);
  return x.array() + lay.mean;
}

struct CollabObjectives {
  double ksum = 0.0;
  double trace = 0.0;
  Vector sigma;  // all singular values, descending
  bool rank_below_k = false;  // sigma_k < 1e-6 sigma_1: the k-sum point is trace-norm optimal too
};

inline CollabObjectives collab_objectives(const ProblemInstance& inst, const Vector& y, Index k) {
  const DenseMatrix x = inst.problem.materialize(y).dense();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(x, Eigen::EigenvaluesOnly);
  Vector s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  CollabObjectives o;
  o.sigma = s;
  o.trace = s.sum();
  const Index kk = std::min<Index>(k, s.size());
  o.ksum = s.head(kk).sum();
  o.rank_below_k = s.size() > 0 && (kk < 1 || s[kk - 1] < 1e-6 * s[0]);
  return o;
}

struct GeneratedRatings {
  DenseMatrix full;  // V V^T
  CollabFilterInstance instance;
};

// V in {0,1,2}^{n x rank}, X = V V^T, each upper-triangle cell observed with
// probability `observed` (mirrored, so the mask is symmetric).
inline GeneratedRatings generate_vvt_ratings(Index n, Index rank, double observed, Index k, RngStream& rng) {
  require(n >= 1 && rank >= 1 && observed > 0.0 && observed <= 1.0, "vvt ratings: bad parameters");
  DenseMatrix v(n, rank);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < rank; ++j) v(i, j) = static_cast<double>(rng.below(3));
  GeneratedRatings g;
  g.full = v * v.transpose();
  g.instance.n = n;
  g.instance.k = k;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i)
      if (rng.bernoulli(observed)) g.instance.ratings.push_back({i, j, g.full(i, j)});
  if (g.instance.ratings.empty()) g.instance.ratings.push_back({0, 0, g.full(0, 0)});
  return g;
}

// CSV lines "i,j,value" with zero-based indices; a non-numeric first line is a header.
inline std::vector<Rating> read_ratings_csv(std::istream& in) {
  std::vector<Rating> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) {
      if (out.empty() && lineno == 1) continue;
      throw Error(Errc::io, "ratings: bad line " + std::to_string(lineno));
    }
    require(i >= 0 && j >= 0, "ratings: negative index");
    out.push_back({static_cast<Index>(i), static_cast<Index>(j), v});
  }
  return out;
}

inline std::vector<Rating> read_ratings_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open " + path);
  return read_ratings_csv(f);
}

inline Index ratings_dimension(const std::vector<Rating>& r) {
  Index n = 0;
  for (const auto& x : r) n = std::max({n, x.i + 1, x.j + 1});
  return n;
}

}  // namespace specsub
