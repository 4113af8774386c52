#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "specsub/problems/fmmc.hpp"
#include "specsub/problems/spectral_box.hpp"
#include "specsub/sa/solver.hpp"
#include "test_support.hpp"

using namespace specsub;

namespace {

SolverConfig small_config(Index N, double gamma) {
  SolverConfig c;
  c.N = N;
  c.gamma = gamma;
  c.s1 = 2;
  c.s2 = 6;
  c.seed = 77;
  return c;
}

}  // namespace

TEST(Solver, AverageIsMeanOfIterates) {
  RngStream rng(31);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(6, rng), 0.2);
  const Index K = 12;
  const double gamma = 0.03;
  // Runs truncated at N = k share the iterate path of the full run.
  Vector mean = Vector::Zero(inst.problem.p());
  for (Index k = 0; k < K; ++k) {
    const SolverRun r = solve(inst.problem, inst.q(), small_config(std::max<Index>(k, 1), gamma));
    mean += k == 0 ? Vector(inst.q().center()) : r.y;
  }
  mean /= static_cast<double>(K);
  const SolverRun full = solve(inst.problem, inst.q(), small_config(K, gamma));
  EXPECT_LE((full.y_avg - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(full.gamma_sum, K * gamma, 1e-12);
}

TEST(Solver, ScalarToyConverges) {
  // minimize |y + 2| over |y| <= 1.
  AffineSpectralProblem prob;
  prob.family = std::make_shared<DiagonalBasis>(1);
  prob.C = SymMatrix::diagonal(Vector::Constant(1, 2.0));
  prob.b = Vector::Zero(1);
  BoxGeometry box(1, 1.0);
  SolverConfig c;
  c.eps = 0.05;
  c.beta = 0.1;
  c.seed = 3;
  const SolverRun r = solve(prob, box, c);
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(r.best_y[0], -1.0, 0.2);
  EXPECT_LE(r.best_gap, 2 * c.eps);
}

TEST(Solver, DeterministicGivenSeed) {
  RngStream rng(32);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(10, rng), 0.1);
  const SolverConfig c = small_config(200, 0.0);
  const SolverRun a = solve(inst.problem, inst.q(), c), b = solve(inst.problem, inst.q(), c);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.y_avg, b.y_avg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].obj_estimate, b.trace[i].obj_estimate);
  SolverConfig other = c;
  other.seed = 78;
  EXPECT_NE(solve(inst.problem, inst.q(), other).y, a.y);
}

TEST(Solver, IteratesStayFeasible) {
  RngStream rng(33);
  const ProblemInstance box = build_spectral_box(fixtures::random_symmetric(8, rng), 0.05);
  const SolverRun a = solve(box.problem, box.q(), small_config(100, 1.0));
  EXPECT_TRUE(box.q().contains(a.y, 1e-12));
  EXPECT_TRUE(box.q().contains(a.y_avg, 1e-12));
  const ProblemInstance f = build_fmmc(cycle_graph(6));
  SolverConfig c = small_config(100, 0.5);
  c.s1 = 3;
  const SolverRun b = solve(f.problem, f.q(), c);
  EXPECT_TRUE(f.q().contains(b.y, 1e-9));
  EXPECT_TRUE(f.q().contains(b.y_avg, 1e-9));
}

TEST(Solver, TraceAndChecksFollowIntervals) {
  RngStream rng(34);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(6, rng), 0.1);
  SolverConfig c = small_config(100, 0.0);
  c.gap_check_interval = 25;
  c.trace_stride = 10;
  const SolverRun r = solve(inst.problem, inst.q(), c);
  EXPECT_EQ(r.iterations, 100);
  EXPECT_EQ(r.checks.size(), 4u);
  EXPECT_EQ(r.trace.size(), 12u);  // multiples of 10 plus 25 and 75
  for (const auto& row : r.trace) EXPECT_EQ(row.exact_gap, row.iter % 25 == 0);
  EXPECT_EQ(r.cost.sampled_columns, 100u * 2u);
  EXPECT_EQ(r.cost.product_samples, 100u * 6u);
}

TEST(Solver, RankOneBoxCertifies) {
  const Index n = 6;
  DenseMatrix a = DenseMatrix::Zero(n, n);
  a(0, 0) = 3.0;
  const ProblemInstance inst = build_spectral_box(SymMatrix(a), 0.5);
  SolverConfig c;
  c.eps = 0.1;
  c.beta = 0.1;
  c.s1 = 1;
  c.seed = 5;
  c.stop_when_certified = true;
  const SolverRun r = solve(inst.problem, inst.q(), c);
  EXPECT_TRUE(r.certified);
  EXPECT_GT(r.first_certified_iter, 0);
  EXPECT_LE(r.final_gap().gap, 2 * c.eps);
  // Optimum is 3 - 0.5.
  EXPECT_LE(r.final_gap().primal, 2.5 + 2 * c.eps);
  EXPECT_GE(r.final_gap().primal, 2.5 - 1e-9);
}

TEST(Solver, StopsAtFirstCertification) {
  const Index n = 5;
  DenseMatrix a = DenseMatrix::Zero(n, n);
  a(1, 1) = -2.0;
  const ProblemInstance inst = build_spectral_box(SymMatrix(a), 0.5);
  SolverConfig c;
  c.eps = 0.2;
  c.seed = 6;
  c.stop_when_certified = true;
  const SolverRun r = solve(inst.problem, inst.q(), c);
  ASSERT_TRUE(r.certified);
  EXPECT_EQ(r.iterations, r.first_certified_iter);
  EXPECT_LT(r.iterations, r.config.cfg.N);
}

TEST(RateSearch, DoublingStagesAndWork) {
  RngStream rng(35);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(12, rng), 0.1);
  SolverConfig c;
  c.eps = 0.3;
  c.beta = 0.2;
  c.N = 300;
  c.seed = 8;
  const RateSearchResult r = rate_search(inst.problem, inst.q(), c, 1, 12);
  ASSERT_FALSE(r.stages.empty());
  EXPECT_LE(static_cast<double>(r.stages.size()), std::ceil(std::log2(static_cast<double>(r.s1_final))) + 1.0);
  EXPECT_LE(r.total_work, 4 * r.final_work);
  for (std::size_t i = 1; i < r.stages.size(); ++i)
    EXPECT_EQ(r.stages[i].s1, std::min<Index>(2 * r.stages[i - 1].s1, 12));
  EXPECT_TRUE(r.certified || r.cap_reached);
  if (r.cap_reached) {
    EXPECT_EQ(r.s1_final, 12);
  }
  EXPECT_THROW(rate_search(inst.problem, inst.q(), c, 0), Error);
}

TEST(Solver, RejectsBadConfig) {
  RngStream rng(36);
  const ProblemInstance inst = build_spectral_box(fixtures::random_symmetric(4, rng), 0.1);
  SolverConfig c;
  c.eps = 0.0;
  EXPECT_THROW(solve(inst.problem, inst.q(), c), Error);
  c.eps = 0.1;
  c.beta = 1.5;
  EXPECT_THROW(solve(inst.problem, inst.q(), c), Error);
  BoxGeometry wrong(3, 1.0);
  EXPECT_THROW(solve(inst.problem, wrong, SolverConfig{}), Error);
}
