#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/sa/family.hpp"

namespace specsub {

// Feasible set Q with the Euclidean distance generating function
// omega(y) = ||y||^2 / 2 (alpha = 1, V(x, y) = ||y - x||^2 / 2).
class ProxGeometry {
 public:
  virtual ~ProxGeometry() = default;

  virtual std::string kind() const = 0;
  virtual Index size() const = 0;
  virtual Vector project(const Vector& z) const = 0;
  virtual bool contains(const Vector& y, double tol = 1e-12) const = 0;
  // max_{y in Q} w^T y
  virtual double support(const Vector& w) const = 0;
  // max_Q omega - min_Q omega
  virtual double diameter_sq() const = 0;
  // argmin_Q omega, the starting point
  virtual Vector center() const { return project(Vector::Zero(size())); }

  double diameter() const { return std::sqrt(std::max(0.0, diameter_sq())); }
  double alpha() const { return 1.0; }
  double delta_star() const { return 1.0; }

  double norm(const Vector& y) const { return y.norm(); }
  double dual_norm(const Vector& y) const { return y.norm(); }
  double omega(const Vector& y) const { return 0.5 * y.squaredNorm(); }
  Vector omega_grad(const Vector& y) const { return y; }
  double bregman(const Vector& x, const Vector& y) const { return 0.5 * (y - x).squaredNorm(); }

  // argmin_{z in Q} { step^T (z - y) + V(y, z) }
  Vector prox(const Vector& y, const Vector& step) const { return project(y - step); }
};

// |y_i| <= rho.
class BoxGeometry final : public ProxGeometry {
 public:
  BoxGeometry(Index p, double rho) : p_(p), rho_(rho) { require(rho > 0.0, "box: rho must be positive"); }

  std::string kind() const override { return "box"; }
  Index size() const override { return p_; }
  double rho() const noexcept { return rho_; }
  Vector project(const Vector& z) const override { return z.cwiseMax(-rho_).cwiseMin(rho_); }
  bool contains(const Vector& y, double tol) const override {
    return y.size() == p_ && (p_ == 0 || y.cwiseAbs().maxCoeff() <= rho_ + tol);
  }
  double support(const Vector& w) const override { return rho_ * w.lpNorm<1>(); }
  double diameter_sq() const override { return 0.5 * static_cast<double>(p_) * rho_ * rho_; }
  Vector center() const override { return Vector::Zero(p_); }

 private:
  Index p_;
  double rho_;
};

// { y : || d .* y - r ||_2 <= sigma } with d > 0; d = 1, r = 0 is the ball of radius sigma.
class EllipsoidGeometry final : public ProxGeometry {
 public:
  EllipsoidGeometry(Vector d, Vector r, double sigma) : d_(std::move(d)), r_(std::move(r)), sigma_(sigma) {
    require(d_.size() == r_.size(), "ellipsoid: size mismatch");
    require(sigma_ >= 0.0, "ellipsoid: sigma must be nonnegative");
    require(d_.size() == 0 || d_.minCoeff() > 0.0, "ellipsoid: scales must be positive");
  }

  static EllipsoidGeometry ball(Index p, double radius) {
    return EllipsoidGeometry(Vector::Ones(p), Vector::Zero(p), radius);
  }

  std::string kind() const override { return is_ball() ? "ball" : "ellipsoid"; }
  Index size() const override { return d_.size(); }
  double sigma() const noexcept { return sigma_; }
  bool is_ball() const { return (d_.array() == 1.0).all() && (r_.array() == 0.0).all(); }

  Vector project(const Vector& z) const override {
    const Vector resid = d_.cwiseProduct(z) - r_;
    const double len = resid.norm();
    if (len <= sigma_) return z;
    if (sigma_ == 0.0) return r_.cwiseQuotient(d_);
    if ((d_.array() == 1.0).all()) return r_ + resid * (sigma_ / len);
    // y(lam)_i = (z_i + lam d_i r_i) / (1 + lam d_i^2); find lam with ||d y - r|| = sigma.
    auto phi = [&](double lam) {
      return (resid.array() / (1.0 + lam * d_.array().square())).matrix().norm();
    };
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > sigma_) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) > sigma_ ? lo : hi) = mid;
    }
    const Vector den = (1.0 + hi * d_.array().square()).matrix();
    return (z + hi * d_.cwiseProduct(r_)).cwiseQuotient(den);
  }

  bool contains(const Vector& y, double tol) const override {
    return y.size() == size() && (d_.cwiseProduct(y) - r_).norm() <= sigma_ + tol * (1.0 + sigma_);
  }

  double support(const Vector& w) const override {
    const Vector dw = w.cwiseQuotient(d_);
    return dw.dot(r_) + sigma_ * dw.norm();
  }

  double diameter_sq() const override {
    const double far = r_.cwiseQuotient(d_).norm() + sigma_ / (d_.size() ? d_.minCoeff() : 1.0);
    const double near = center().norm();
    return 0.5 * (far * far - near * near);
  }

 private:
  Vector d_;
  Vector r_;
  double sigma_;
};

namespace detail {

// Maximum-weight assignment on an n x n matrix of nonnegative weights
// (Hungarian method, O(n^3)). Returns the optimal total.
inline double max_weight_assignment(const DenseMatrix& w) {
  const Index n = w.rows();
  if (n == 0) return 0.0;
  const double big = w.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  // Minimize cost = big - w with 1-based potentials.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = (big - w(i0 - 1, j - 1)) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (Index j = 1; j <= n; ++j) total += w(match[static_cast<std::size_t>(j)] - 1, j - 1);
  return total;
}

}  // namespace detail

// Edge weights of a symmetric chain: { y >= 0, sum_{e incident to v} y_e <= 1 for all v }.
class FmmcGeometry final : public ProxGeometry {
 public:
  FmmcGeometry(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), incident_(static_cast<std::size_t>(n)) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      incident_[static_cast<std::size_t>(edges_[e].u)].push_back(e);
      incident_[static_cast<std::size_t>(edges_[e].v)].push_back(e);
    }
  }

  std::string kind() const override { return "fmmc"; }
  Index size() const override { return static_cast<Index>(edges_.size()); }
  Vector center() const override { return Vector::Zero(size()); }

  Vector vertex_sums(const Vector& y) const {
    Vector s = Vector::Zero(n_);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      s[edges_[e].u] += y[static_cast<Index>(e)];
      s[edges_[e].v] += y[static_cast<Index>(e)];
    }
    return s;
  }

  // Dykstra's alternating projections over the n vertex halfspaces and the orthant.
  Vector project(const Vector& z) const override {
    const Index m = size();
    Vector x = z;
    std::vector<double> half(static_cast<std::size_t>(n_), 0.0);  // halfspace corrections (multiples of a_v)
    Vector orth = Vector::Zero(m);
    last_sweeps_ = 0;
    for (int sweep = 0; sweep < 500; ++sweep) {
      const Vector before = x;
      for (Index v = 0; v < n_; ++v) {
        const auto& inc = incident_[static_cast<std::size_t>(v)];
        if (inc.empty()) continue;
        const double c = half[static_cast<std::size_t>(v)];
        double dot = 0.0;
        for (std::size_t e : inc) dot += x[static_cast<Index>(e)] + c;
        const double deg = static_cast<double>(inc.size());
        const double excess = dot > 1.0 ? (dot - 1.0) / deg : 0.0;
        for (std::size_t e : inc) x[static_cast<Index>(e)] += c - excess;
        half[static_cast<std::size_t>(v)] = excess;
      }
      const Vector t = x + orth;
      x = t.cwiseMax(0.0);
      orth = t - x;
      last_sweeps_ = sweep + 1;
      const double change = (x - before).lpNorm<Eigen::Infinity>();
      const double viol = m > 0 ? std::max(0.0, vertex_sums(x).maxCoeff() - 1.0) : 0.0;
      if (change <= 1e-10 && viol <= 1e-10) break;
    }
    // Remove any residual violation left by the sweep cap.
    const Vector s = vertex_sums(x);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const double scale = std::max({1.0, s[edges_[e].u], s[edges_[e].v]});
      x[static_cast<Index>(e)] /= scale;
    }
    return x;
  }

  int last_sweeps() const noexcept { return last_sweeps_; }

  bool contains(const Vector& y, double tol) const override {
    if (y.size() != size()) return false;
    if (size() == 0) return true;
    return y.minCoeff() >= -tol && vertex_sums(y).maxCoeff() <= 1.0 + tol;
  }

  // The polytope is the fractional matching polytope; its support value equals
  // half the maximum-weight matching of the bipartite double cover.
  double support(const Vector& w) const override {
    DenseMatrix cover = DenseMatrix::Zero(n_, n_);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const double we = std::max(0.0, w[static_cast<Index>(e)]);
      cover(edges_[e].u, edges_[e].v) = std::max(cover(edges_[e].u, edges_[e].v), we);
      cover(edges_[e].v, edges_[e].u) = std::max(cover(edges_[e].v, edges_[e].u), we);
    }
    return 0.5 * detail::max_weight_assignment(cover);
  }

  // ||y||^2 <= (max y_e) * sum y_e <= min(|E|, n / 2).
  double diameter_sq() const override {
    return 0.5 * std::min(static_cast<double>(edges_.size()), 0.5 * static_cast<double>(n_));
  }

 private:
  Index n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  mutable int last_sweeps_ = 0;
};

}  // namespace specsub
