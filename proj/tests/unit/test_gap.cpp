#include <gtest/gtest.h>

#include <memory>

#include "specsub/problems/collab.hpp"
#include "specsub/problems/fmmc.hpp"
#include "specsub/problems/lasso.hpp"
#include "specsub/problems/spectral_box.hpp"
#include "specsub/sa/gap.hpp"
#include "test_support.hpp"

using namespace specsub;

namespace {

std::vector<ProblemInstance> instances() {
  RngStream rng(21);
  std::vector<ProblemInstance> out;
  out.push_back(build_spectral_box(fixtures::random_symmetric(8, rng), 0.1));
  GeneratedRatings gr = generate_vvt_ratings(9, 2, 0.5, 3, rng);
  out.push_back(build_collab_filter(gr.instance));
  out.push_back(build_collab_filter(gr.instance, nullptr, ObjectiveKind::trace));
  Vector d(6), r(6);
  d << 1, 2, 0.5, 1, 3, 1;
  r << 1, -2, 0.3, 0, 4, -1;
  out.push_back(build_lasso(d, r, 0.5));
  out.push_back(build_fmmc(path_graph(6)));
  out.push_back(build_fmmc(cycle_graph(5)));
  return out;
}

double primal(const ProblemInstance& inst, const Vector& y, RngStream& rng) {
  return exact_objective_norm(inst.problem, y, 1e-12, rng).value - inst.problem.b.dot(y);
}

}  // namespace

TEST(SurrogateGap, WeakDualityOnFeasibleProbes) {
  for (const auto& inst : instances()) {
    RngStream rng(22);
    const Index p = inst.problem.p();
    std::vector<Vector> probes;
    probes.push_back(inst.q().center());
    for (int i = 0; i < 12; ++i) probes.push_back(inst.q().project(inst.q().center() + fixtures::gaussian(p, 1, rng).col(0)));
    double min_primal = std::numeric_limits<double>::infinity();
    for (const auto& y : probes) {
      ASSERT_TRUE(inst.q().contains(y, 1e-9)) << inst.problem.name;
      min_primal = std::min(min_primal, primal(inst, y, rng));
    }
    AveragedCertificate avg;
    avg.reset(inst.problem.n());
    for (const auto& y : probes) {
      const GapReport g = surrogate_gap(inst.problem, inst.q(), y, true, 1e-12, rng, nullptr, &avg);
      EXPECT_LE(g.dual, min_primal + 1e-8) << inst.problem.name;
      EXPECT_GE(g.gap, -1e-8) << inst.problem.name;
      EXPECT_NEAR(g.gap, g.primal - g.dual, 1e-12);
      EXPECT_GE(g.dual, g.point_dual);
      avg.add(g.v, g.v.cols() > 0 ? Vector(Vector::Ones(g.v.cols())) : Vector(), 1.0);
    }
  }
}

TEST(SurrogateGap, ScalarToyOptimumHasZeroGap) {
  // minimize |y + 2| over |y| <= 1: optimum y = -1, value 1.
  AffineSpectralProblem prob;
  prob.family = std::make_shared<DiagonalBasis>(1);
  prob.C = SymMatrix::diagonal(Vector::Constant(1, 2.0));
  prob.b = Vector::Zero(1);
  BoxGeometry box(1, 1.0);
  RngStream rng(23);
  const GapReport at_opt = surrogate_gap(prob, box, Vector::Constant(1, -1.0), true, 1e-12, rng);
  EXPECT_NEAR(at_opt.primal, 1.0, 1e-12);
  EXPECT_NEAR(at_opt.gap, 0.0, 1e-8);
  const GapReport off = surrogate_gap(prob, box, Vector::Constant(1, 0.5), true, 1e-12, rng);
  EXPECT_NEAR(off.gap, 1.5, 1e-9);
}

TEST(SurrogateGap, ScalarLassoOptimumHasZeroGap) {
  // minimize |y| subject to |y - 3| <= 1: y = 2.
  const ProblemInstance inst = build_lasso(Vector::Ones(1), Vector::Constant(1, 3.0), 1.0);
  RngStream rng(24);
  const GapReport g = surrogate_gap(inst.problem, inst.q(), Vector::Constant(1, 2.0), true, 1e-12, rng);
  EXPECT_NEAR(g.primal, 2.0, 1e-12);
  EXPECT_NEAR(g.gap, 0.0, 1e-8);
}

TEST(SurrogateGap, SampledCertificateStillLowerBounds) {
  RngStream rng(25);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(10, rng), 0.05);
  CostCounters cost;
  GradientWorkspace ws;
  GradientOptions opt;
  opt.s1 = 2;
  opt.s2 = 5;
  const Vector y = inst.q().center();
  const double opt_primal = primal(inst, y, rng);
  for (int t = 0; t < 20; ++t) {
    const Subgradient sg = stochastic_subgradient(inst.problem, y, opt, rng, cost, ws);
    const GapReport g = surrogate_gap(inst.problem, inst.q(), y, false, 1e-12, rng, &sg);
    EXPECT_FALSE(g.exact_norm_used);
    EXPECT_LE(g.dual, opt_primal + 1e-9);
  }
}

TEST(SurrogateGap, ZeroMatrixHasEmptyCertificate) {
  AffineSpectralProblem prob;
  prob.family = std::make_shared<DiagonalBasis>(2);
  prob.C = SymMatrix::zero(2);
  prob.b = Vector::Zero(2);
  BoxGeometry box(2, 1.0);
  RngStream rng(26);
  const GapReport g = surrogate_gap(prob, box, Vector::Zero(2), true, 1e-12, rng);
  EXPECT_EQ(g.primal, 0.0);
  EXPECT_EQ(g.v.cols(), 0);
  EXPECT_NEAR(g.gap, 0.0, 1e-15);
}
