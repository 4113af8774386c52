#include <gtest/gtest.h>

#include <functional>
#include <memory>

#include "specsub/sa/geometry.hpp"
#include "test_support.hpp"

using namespace specsub;

namespace {

// Projection optimality: (z - P z)^T (y - P z) <= 0 for feasible y.
void expect_projection(const ProxGeometry& q, const Vector& z, const std::vector<Vector>& feasible, double tol) {
  const Vector pz = q.project(z);
  EXPECT_TRUE(q.contains(pz, 1e-8));
  for (const auto& y : feasible) EXPECT_LE((z - pz).dot(y - pz), tol);
}

Vector random_point(Index p, double scale, RngStream& rng) {
  return scale * fixtures::gaussian(p, 1, rng).col(0);
}

// Enumerates {0, 1/2, 1}^E for the fractional matching polytope, max w^T y.
double brute_matching_support(Index n, const std::vector<Edge>& edges, const Vector& w) {
  const std::size_t m = edges.size();
  double best = 0.0;
  std::vector<int> level(m, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t e) {
    if (e == m) {
      Vector y(static_cast<Index>(m));
      for (std::size_t i = 0; i < m; ++i) y[static_cast<Index>(i)] = 0.5 * level[i];
      Vector s = Vector::Zero(n);
      for (std::size_t i = 0; i < m; ++i) {
        s[edges[i].u] += y[static_cast<Index>(i)];
        s[edges[i].v] += y[static_cast<Index>(i)];
      }
      if (s.maxCoeff() <= 1.0 + 1e-12) best = std::max(best, w.dot(y));
      return;
    }
    for (int l = 0; l <= 2; ++l) {
      level[e] = l;
      rec(e + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST(BoxGeometry, ProxExamples) {
  const BoxGeometry q(1, 1.0);
  Vector y(1), g(1);
  y << 0.5;
  g << 1.0;
  EXPECT_DOUBLE_EQ(q.prox(y, g)[0], -0.5);
  g << 0.0;
  EXPECT_EQ(q.prox(y, g), y);
  g << 10.0;
  EXPECT_DOUBLE_EQ(q.prox(y, g)[0], -1.0);
}

TEST(BoxGeometry, SupportAndDiameter) {
  RngStream rng(3);
  const BoxGeometry q(6, 0.3);
  const Vector w = random_point(6, 1.0, rng);
  EXPECT_NEAR(q.support(w), 0.3 * w.lpNorm<1>(), 1e-14);
  EXPECT_NEAR(w.dot(0.3 * w.cwiseSign()), q.support(w), 1e-14);
  // max omega - min omega over the box
  EXPECT_NEAR(q.diameter_sq(), 0.5 * 6 * 0.09, 1e-14);
  EXPECT_TRUE(q.contains(q.center(), 1e-12));
  EXPECT_THROW(BoxGeometry(2, 0.0), Error);
}

TEST(EllipsoidGeometry, BallRadialRescale) {
  const auto q = EllipsoidGeometry::ball(3, 2.0);
  Vector z(3);
  z << 3.0, 4.0, 0.0;
  const Vector p = q.project(z);
  EXPECT_NEAR(p.norm(), 2.0, 1e-14);
  EXPECT_NEAR(p[0] / p[1], 0.75, 1e-14);
  Vector inside(3);
  inside << 0.1, 0.2, 0.3;
  EXPECT_EQ(q.project(inside), inside);
  EXPECT_NEAR(q.support(z), 10.0, 1e-12);
  EXPECT_EQ(q.kind(), "ball");
}

TEST(EllipsoidGeometry, ProjectionIsOptimal) {
  RngStream rng(4);
  Vector d(5), r(5);
  d << 0.5, 1.0, 2.0, 3.0, 0.7;
  r << 0.2, -0.1, 0.5, 0.0, 1.0;
  const EllipsoidGeometry q(d, r, 0.4);
  std::vector<Vector> feasible;
  for (int i = 0; i < 200; ++i) feasible.push_back(q.project(random_point(5, 3.0, rng)));
  for (int i = 0; i < 20; ++i) expect_projection(q, random_point(5, 3.0, rng), feasible, 1e-8);
}

TEST(EllipsoidGeometry, SupportUpperBoundsAndIsAttained) {
  RngStream rng(5);
  Vector d(4), r(4);
  d << 1.0, 2.0, 0.5, 1.5;
  r << 0.3, 0.0, -0.2, 0.1;
  const EllipsoidGeometry q(d, r, 0.8);
  for (int t = 0; t < 20; ++t) {
    const Vector w = random_point(4, 1.0, rng);
    const double sup = q.support(w);
    double best = -1e300;
    for (int i = 0; i < 300; ++i) {
      const Vector y = q.project(random_point(4, 5.0, rng));
      EXPECT_LE(w.dot(y), sup + 1e-10);
      best = std::max(best, w.dot(y));
    }
    // maximizer: d y - r = sigma (w / d) / ||w / d||
    const Vector dw = w.cwiseQuotient(d);
    const Vector y = (r + 0.8 * dw / dw.norm()).cwiseQuotient(d);
    EXPECT_TRUE(q.contains(y, 1e-10));
    EXPECT_NEAR(w.dot(y), sup, 1e-10);
  }
}

TEST(EllipsoidGeometry, ZeroRadiusIsAPoint) {
  Vector d(2), r(2);
  d << 2.0, 4.0;
  r << 1.0, 1.0;
  const EllipsoidGeometry q(d, r, 0.0);
  Vector z(2);
  z << 5.0, -5.0;
  const Vector p = q.project(z);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
}

TEST(FmmcGeometry, ProjectionFeasibleAndFixesFeasiblePoints) {
  RngStream rng(6);
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {3, 4}};
  const FmmcGeometry q(5, edges);
  for (int t = 0; t < 50; ++t) {
    const Vector z = random_point(6, 1.0, rng);
    const Vector p = q.project(z);
    EXPECT_GE(p.minCoeff(), -1e-8);
    EXPECT_LE(q.vertex_sums(p).maxCoeff(), 1.0 + 1e-8);
    EXPECT_LE((q.project(p) - p).norm(), 1e-10);
  }
  Vector y(6);
  y << 0.2, 0.1, 0.3, 0.1, 0.2, 0.4;
  ASSERT_TRUE(q.contains(y, 1e-12));
  EXPECT_LE((q.project(y) - y).norm(), 1e-10);
}

TEST(FmmcGeometry, ProjectionIsOptimal) {
  RngStream rng(7);
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {0, 2}, {2, 3}};
  const FmmcGeometry q(4, edges);
  std::vector<Vector> feasible;
  for (int i = 0; i < 300; ++i) feasible.push_back(q.project(random_point(4, 1.0, rng)));
  for (int i = 0; i < 20; ++i) expect_projection(q, random_point(4, 1.0, rng), feasible, 1e-7);
}

TEST(FmmcGeometry, SupportMatchesHalfIntegralEnumeration) {
  RngStream rng(8);
  const std::vector<std::pair<Index, std::vector<Edge>>> graphs = {
      {3, {{0, 1}, {1, 2}, {0, 2}}},
      {4, {{0, 1}, {1, 2}, {2, 3}}},
      {5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}},
      {5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}}},
  };
  for (const auto& [n, edges] : graphs) {
    const FmmcGeometry q(n, edges);
    for (int t = 0; t < 10; ++t) {
      const Vector w = random_point(static_cast<Index>(edges.size()), 1.0, rng);
      EXPECT_NEAR(q.support(w), brute_matching_support(n, edges, w), 1e-10);
    }
  }
}

TEST(ProxGeometry, BregmanStrongConvexityAndDiameter) {
  RngStream rng(9);
  std::vector<std::unique_ptr<ProxGeometry>> qs;
  qs.push_back(std::make_unique<BoxGeometry>(4, 0.5));
  qs.push_back(std::make_unique<EllipsoidGeometry>(EllipsoidGeometry::ball(4, 1.0)));
  qs.push_back(std::make_unique<FmmcGeometry>(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  for (const auto& q : qs) {
    EXPECT_GE(q->diameter_sq(), 0.0);
    double max_omega = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Vector x = q->project(random_point(4, 2.0, rng));
      const Vector y = q->project(random_point(4, 2.0, rng));
      EXPECT_GE(q->bregman(x, y), 0.5 * q->alpha() * (y - x).squaredNorm() - 1e-15);
      EXPECT_TRUE(q->contains(q->prox(x, random_point(4, 1.0, rng)), 1e-8));
      max_omega = std::max(max_omega, q->omega(y));
    }
    EXPECT_LE(max_omega - q->omega(q->center()), q->diameter_sq() + 1e-12) << q->kind();
  }
}
