#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/problems/instance.hpp"

namespace specsub {

// Undirected simple graph on vertices 0..n-1.
struct Graph {
  Index n = 0;
  std::vector<Edge> edges;

  std::vector<Index> degrees() const {
    std::vector<Index> d(static_cast<std::size_t>(n), 0);
    for (const auto& e : edges) {
      ++d[static_cast<std::size_t>(e.u)];
      ++d[static_cast<std::size_t>(e.v)];
    }
    return d;
  }
};

// Drops self-loops and repeated edges, orients each edge as u < v.
inline Graph make_graph(Index n, const std::vector<Edge>& edges) {
  require(n >= 1, "graph: need at least one vertex");
  std::set<std::pair<Index, Index>> seen;
  Graph g;
  g.n = n;
  for (const auto& e : edges) {
    require(e.u >= 0 && e.v >= 0 && e.u < n && e.v < n, "graph: vertex out of range");
    if (e.u == e.v) continue;
    const auto key = std::make_pair(std::min(e.u, e.v), std::max(e.u, e.v));
    if (seen.insert(key).second) g.edges.push_back({key.first, key.second});
  }
  return g;
}

inline bool is_connected(const Graph& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.n));
  for (Index i = 0; i < g.n; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<Index(Index)> find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  Index parts = g.n;
  for (const auto& e : g.edges) {
    const Index a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --parts;
    }
  }
  return parts == 1;
}

inline void require_connected(const Graph& g) {
  if (!is_connected(g)) throw Error(Errc::disconnected_graph, "graph is not connected");
}

// Header "n m", then m lines "u v" with zero-based vertices.
inline Graph read_graph(std::istream& in) {
  long long n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 0) throw Error(Errc::io, "graph: bad header, expected 'n m'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw Error(Errc::io, "graph: expected " + std::to_string(m) + " edges");
    edges.push_back({static_cast<Index>(u), static_cast<Index>(v)});
  }
  return make_graph(static_cast<Index>(n), edges);
}

inline Graph read_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open " + path);
  return read_graph(f);
}

inline Graph path_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return make_graph(n, e);
}

inline Graph cycle_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return make_graph(n, e);
}

// Vertex 0 joined to vertices 1..n-1.
inline Graph star_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 1; i < n; ++i) e.push_back({0, i});
  return make_graph(n, e);
}

inline Graph complete_graph(Index n) {
  std::vector<Edge> e;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) e.push_back({i, j});
  return make_graph(n, e);
}

struct FmmcInstance {
  Graph graph;
};

// minimize sigma_1(P) + sigma_2(P), P(y) = I - sum_e y_e (e_u - e_v)(e_u - e_v)^T,
// over edge weights with y >= 0 and per-vertex sums <= 1.
inline ProblemInstance build_fmmc(const Graph& g) {
  require_connected(g);
  require(!g.edges.empty(), "fmmc: graph needs at least one edge");
  ProblemInstance inst;
  auto fam = std::make_shared<EdgeLaplacian>(g.n, g.edges);
  inst.problem.family = fam;
  inst.problem.C = SymMatrix::identity(g.n);
  inst.problem.b = Vector::Zero(fam->size());
  inst.problem.kind = ObjectiveKind::ksum;
  inst.problem.k = 2;
  inst.problem.name = "fmmc";
  inst.geometry = std::make_shared<FmmcGeometry>(g.n, g.edges);
  return inst;
}

inline DenseMatrix transition_matrix(const Graph& g, const Vector& y) {
  require(y.size() == static_cast<Index>(g.edges.size()), "transition matrix: wrong weight count");
  DenseMatrix p = DenseMatrix::Identity(g.n, g.n);
  EdgeLaplacian(g.n, g.edges).accumulate(y, p);
  return p;
}

// Edge weights min(1/d_u, 1/d_v), degrees counting the implicit self-loop.
inline Vector metropolis_hastings_weights(const Graph& g) {
  const auto d = g.degrees();
  Vector y(static_cast<Index>(g.edges.size()));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double du = static_cast<double>(d[static_cast<std::size_t>(g.edges[e].u)] + 1);
    const double dv = static_cast<double>(d[static_cast<std::size_t>(g.edges[e].v)] + 1);
    y[static_cast<Index>(e)] = std::min(1.0 / du, 1.0 / dv);
  }
  return y;
}

inline DenseMatrix metropolis_hastings_chain(const Graph& g) {
  require_connected(g);
  return transition_matrix(g, metropolis_hastings_weights(g));
}

// Singular values of a symmetric matrix, descending.
inline Vector symmetric_singular_values(const DenseMatrix& p) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(p, Eigen::EigenvaluesOnly);
  Vector s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

inline double second_singular_value(const DenseMatrix& p) {
  const Vector s = symmetric_singular_values(p);
  return s.size() > 1 ? s[1] : 0.0;
}

}  // namespace specsub
