#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "specsub/core/counters.hpp"
#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/sa/formulas.hpp"
#include "specsub/sa/gap.hpp"
#include "specsub/sa/geometry.hpp"
#include "specsub/sa/gradient.hpp"
#include "specsub/sa/problem.hpp"

namespace specsub {

struct SolverConfig {
  double eps = 0.05;
  double beta = 0.1;
  Index s1 = 0;  // 0: n
  Index s2 = 0;  // 0: n^2
  Index N = 0;   // 0: iteration budget formula
  double gamma = 0.0;  // 0: step size formula
  Index gap_check_interval = 0;  // 0: max(1, N / 50)
  Index trace_stride = 0;        // 0: max(1, N / 1000)
  std::uint64_t seed = 0;
  GradientMode mode = GradientMode::sampled;
  double eig_tol = 1e-8;   // gradient eigensolves
  double gap_tol = 1e-10;  // exact gap eigensolves
  bool verify_multiplicity = false;
  bool average_certificate = true;
  bool stop_when_certified = false;
  Index max_iterations = 50'000'000;
};

// Config with every automatic field filled in.
struct ResolvedConfig {
  SolverConfig cfg;
  double m_star_sq = 0.0;
  double formula_N = 0.0;
  bool budget_capped = false;
};

inline ResolvedConfig resolve_config(const AffineSpectralProblem& prob, const ProxGeometry& q, SolverConfig cfg) {
  require(cfg.eps > 0.0, "solver: eps must be positive");
  require(cfg.beta > 0.0 && cfg.beta <= 1.0, "solver: beta must lie in (0, 1]");
  require(q.size() == prob.p(), "solver: geometry and problem sizes differ");
  ResolvedConfig r;
  const Index n = prob.n();
  if (cfg.s1 <= 0) cfg.s1 = n;
  if (cfg.s2 <= 0) cfg.s2 = n * n;
  r.m_star_sq = m_star_sq(prob, cfg.s2);
  const RateResult budget = iteration_budget(q, r.m_star_sq, cfg.eps, cfg.beta, cfg.max_iterations);
  r.formula_N = budget.exact;
  if (cfg.N <= 0) {
    cfg.N = budget.s;
    r.budget_capped = budget.overflow;
  }
  if (cfg.gamma <= 0.0) cfg.gamma = r.m_star_sq > 0.0 ? step_size(q, r.m_star_sq, cfg.N) : 0.0;
  if (cfg.gap_check_interval <= 0) cfg.gap_check_interval = std::max<Index>(1, cfg.N / 50);
  if (cfg.trace_stride <= 0) cfg.trace_stride = std::max<Index>(1, cfg.N / 1000);
  r.cfg = cfg;
  return r;
}

struct TraceRow {
  Index iter = 0;
  double elapsed_s = 0.0;
  double obj_estimate = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool exact_gap = false;
  Index s1 = 0;
  Index s2 = 0;
};

struct GapCheck {
  Index iter = 0;
  double solver_seconds = 0.0;
  GapReport report;
};

struct SolverRun {
  ResolvedConfig config;
  Vector y;      // last iterate
  Vector y_avg;  // weighted running average
  Index iterations = 0;
  double gamma_sum = 0.0;
  std::vector<TraceRow> trace;
  std::vector<GapCheck> checks;
  Vector best_y;  // averaged iterate with the smallest exact gap
  double best_gap = std::numeric_limits<double>::infinity();
  Index first_certified_iter = -1;
  double time_to_certified = std::numeric_limits<double>::quiet_NaN();
  bool certified = false;  // some exact gap <= 2 eps
  CostCounters cost;
  double wall_seconds = 0.0;

  const GapReport& final_gap() const { return checks.back().report; }
  const char* status() const { return certified ? "certified" : "not_converged"; }
};

// Stochastic approximation with subsampled subgradients: N prox steps with a
// fixed step size, returning the weighted average of the iterates.
inline SolverRun solve(const AffineSpectralProblem& prob, const ProxGeometry& q, const SolverConfig& config) {
  prob.validate();
  SolverRun run;
  run.config = resolve_config(prob, q, config);
  const SolverConfig& cfg = run.config.cfg;
  RngStream rng(cfg.seed, 0);
  RngStream gap_rng(cfg.seed, 1);
  GradientOptions gopt;
  gopt.s1 = cfg.s1;
  gopt.s2 = cfg.s2;
  gopt.mode = cfg.mode;
  gopt.tol = cfg.eig_tol;
  gopt.verify_multiplicity = cfg.verify_multiplicity;
  GradientWorkspace ws;
  AveragedCertificate avg;
  avg.reset(prob.n());
  Stopwatch wall;

  run.y = q.center();
  run.y_avg = run.y;
  const double gamma = cfg.gamma;
  const double weight = gamma > 0.0 ? gamma : 1.0;

  for (Index l = 0; l < cfg.N; ++l) {
    Subgradient sub = stochastic_subgradient(prob, run.y, gopt, rng, run.cost, ws);
    const double obj = sub.norm_estimate - prob.b.dot(run.y);

    run.gamma_sum += weight;
    run.y_avg += (weight / run.gamma_sum) * (run.y - run.y_avg);
    if (cfg.average_certificate) {
      ScopedTimer t(run.cost.seconds_gap);
      avg.add(sub.U, sub.signs, weight);
    }
    {
      ScopedTimer t(run.cost.seconds_prox);
      run.y = q.prox(run.y, gamma * sub.g);
    }
    run.iterations = l + 1;

    const bool check = run.iterations % cfg.gap_check_interval == 0 || run.iterations == cfg.N;
    TraceRow row;
    row.iter = run.iterations;
    row.obj_estimate = obj;
    row.s1 = cfg.s1;
    row.s2 = cfg.s2;
    if (check) {
      GapCheck gc;
      gc.iter = run.iterations;
      {
        ScopedTimer t(run.cost.seconds_gap);
        gc.report = surrogate_gap(prob, q, run.y_avg, true, cfg.gap_tol, gap_rng, nullptr,
                                  cfg.average_certificate ? &avg : nullptr);
      }
      gc.solver_seconds = run.cost.solver_seconds();
      row.gap = gc.report.gap;
      row.exact_gap = true;
      if (gc.report.gap < run.best_gap) {
        run.best_gap = gc.report.gap;
        run.best_y = run.y_avg;
      }
      if (gc.report.gap <= 2.0 * cfg.eps && run.first_certified_iter < 0) {
        run.first_certified_iter = run.iterations;
        run.time_to_certified = gc.solver_seconds;
        run.certified = true;
      }
      run.checks.push_back(std::move(gc));
    }
    row.elapsed_s = run.cost.solver_seconds();
    if (check || run.iterations % cfg.trace_stride == 0) run.trace.push_back(row);
    if (check && run.certified && cfg.stop_when_certified) break;
  }
  if (run.checks.empty()) {
    GapCheck gc;
    gc.iter = 0;
    gc.report = surrogate_gap(prob, q, run.y_avg, true, cfg.gap_tol, gap_rng);
    run.best_gap = gc.report.gap;
    run.best_y = run.y_avg;
    run.certified = gc.report.gap <= 2.0 * cfg.eps;
    run.checks.push_back(std::move(gc));
  }
  run.wall_seconds = wall.seconds();
  return run;
}

struct RateStage {
  Index s1 = 0;
  Index iterations = 0;
  double best_gap = 0.0;
  bool certified = false;
  std::uint64_t sampled_columns = 0;
  double solver_seconds = 0.0;
};

struct RateSearchResult {
  Vector y;
  Index s1_final = 0;
  std::vector<RateStage> stages;
  bool certified = false;
  bool cap_reached = false;
  double best_gap = std::numeric_limits<double>::infinity();
  std::uint64_t total_work = 0;  // sampled columns over all stages
  std::uint64_t final_work = 0;
  SolverRun final_run;
  const char* status() const { return certified ? "certified" : "cap_reached"; }
};

// Doubles s1 from `s1_start` until a run is certified by an exact gap <= 2 eps,
// clamping the last stage at `s1_cap` (default n).
inline RateSearchResult rate_search(const AffineSpectralProblem& prob, const ProxGeometry& q, SolverConfig cfg,
                                    Index s1_start = 1, Index s1_cap = 0) {
  require(s1_start >= 1, "rate_search: s1_start must be >= 1");
  if (s1_cap <= 0) s1_cap = prob.n();
  RateSearchResult out;
  Index s1 = std::min(s1_start, s1_cap);
  for (std::uint64_t stage = 0;; ++stage) {
    SolverConfig c = cfg;
    c.s1 = s1;
    c.seed = RngStream(cfg.seed).split(stage).next_u64();
    SolverRun run = solve(prob, q, c);
    RateStage st;
    st.s1 = s1;
    st.iterations = run.iterations;
    st.best_gap = run.best_gap;
    st.certified = run.certified;
    st.sampled_columns = run.cost.sampled_columns;
    st.solver_seconds = run.cost.solver_seconds();
    out.stages.push_back(st);
    out.total_work += st.sampled_columns;
    if (run.best_gap < out.best_gap) {
      out.best_gap = run.best_gap;
      out.y = run.best_y;
    }
    out.s1_final = s1;
    out.final_work = st.sampled_columns;
    if (run.certified) {
      out.certified = true;
      out.y = run.best_y;
      out.final_run = std::move(run);
      return out;
    }
    if (s1 >= s1_cap) {
      out.cap_reached = true;
      out.final_run = std::move(run);
      return out;
    }
    s1 = std::min(2 * s1, s1_cap);
  }
}

}  // namespace specsub
