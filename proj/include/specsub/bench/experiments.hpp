#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "specsub/bench/csv.hpp"
#include "specsub/bench/spectrum.hpp"
#include "specsub/core/counters.hpp"
#include "specsub/core/error.hpp"
#include "specsub/core/parallel.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/krylov/eigs.hpp"
#include "specsub/linalg/rates.hpp"
#include "specsub/linalg/sketch.hpp"
#include "specsub/problems/collab.hpp"
#include "specsub/problems/spectral_box.hpp"
#include "specsub/sa/solver.hpp"

namespace specsub {

enum class ExperimentId { err_vs_rank, err_hist, err_vs_s, eig_speedup, converge_trace, cpu_table };

inline const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::err_vs_rank: return "err-vs-rank";
    case ExperimentId::err_hist: return "err-hist";
    case ExperimentId::err_vs_s: return "err-vs-s";
    case ExperimentId::eig_speedup: return "eig-speedup";
    case ExperimentId::converge_trace: return "converge-trace";
    case ExperimentId::cpu_table: return "cpu-table";
  }
  return "?";
}

inline ExperimentId parse_experiment(const std::string& s) {
  for (auto id : {ExperimentId::err_vs_rank, ExperimentId::err_hist, ExperimentId::err_vs_s,
                  ExperimentId::eig_speedup, ExperimentId::converge_trace, ExperimentId::cpu_table})
    if (s == to_string(id)) return id;
  throw Error(Errc::invalid_argument, "unknown experiment '" + s + "'");
}

struct ExperimentConfig {
  ExperimentId id = ExperimentId::err_vs_rank;
  Index n = 0;       // 0: experiment default
  Index trials = 0;  // matrices, trials per s, runs or seeds depending on the experiment
  Index reps = 0;    // sketches per matrix
  std::vector<double> ratios;  // s / n
  std::vector<Index> s_values;
  std::vector<Index> dims;
  std::vector<std::string> laws;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  std::string problem = "spectral-box";  // cpu-table
  double eps = 0.0;   // 0: experiment default
  Index iterations = 0;
  double rho = 0.01;
  double numrank_lo = 2.0;
  double numrank_hi = 50.0;
  double observed = 0.3;
  Index k = 4;
  std::string output;
};

struct ExperimentResult {
  CsvTable table;
  std::vector<std::pair<std::string, double>> summary;

  double get(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    throw Error(Errc::invalid_argument, "no summary value " + key);
  }
};

inline std::vector<std::string> default_beta_sweep() {
  std::vector<std::string> laws;
  for (const char* a : {"0.02", "0.05", "0.1", "0.2", "0.5", "1"})
    for (const char* b : {"1", "3", "10"}) laws.push_back(std::string("beta:") + a + ":" + b);
  return laws;
}

// Fills every zero or empty field with the experiment's default.
inline ExperimentConfig with_defaults(ExperimentConfig c) {
  switch (c.id) {
    case ExperimentId::err_vs_rank:
    case ExperimentId::err_hist:
      if (c.n <= 0) c.n = 500;
      if (c.trials <= 0) c.trials = c.id == ExperimentId::err_vs_rank ? 36 : 60;
      if (c.reps <= 0) c.reps = 5;
      if (c.ratios.empty()) c.ratios = {0.2};
      if (c.laws.empty()) c.laws = default_beta_sweep();
      break;
    case ExperimentId::err_vs_s:
      if (c.n <= 0) c.n = 500;
      if (c.trials <= 0) c.trials = 50;
      if (c.laws.empty()) c.laws = {"power:1"};
      if (c.s_values.empty())
        for (Index s = std::max<Index>(8, c.n / 50); s <= c.n; s *= 2) c.s_values.push_back(s);
      break;
    case ExperimentId::eig_speedup:
      if (c.n <= 0) c.n = 2000;
      if (c.trials <= 0) c.trials = 10;
      if (c.ratios.empty()) c.ratios = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
      if (c.laws.empty()) c.laws = {"beta:0.1:3"};
      break;
    case ExperimentId::converge_trace:
      if (c.n <= 0) c.n = 100;
      if (c.trials <= 0) c.trials = 5;
      if (c.ratios.empty()) c.ratios = {0.2};
      if (c.eps <= 0.0) c.eps = 5.0;
      if (c.iterations <= 0) c.iterations = 3000;
      break;
    case ExperimentId::cpu_table:
      if (c.dims.empty()) c.dims = c.problem == "collab" ? std::vector<Index>{100, 200} : std::vector<Index>{200, 500, 1000};
      if (c.trials <= 0) c.trials = 3;
      if (c.ratios.empty()) c.ratios = {0.2};
      if (c.laws.empty()) c.laws = {"beta:0.1:3"};
      if (c.eps <= 0.0) c.eps = c.problem == "collab" ? 5.0 : 0.01;
      if (c.iterations <= 0) c.iterations = 150;
      break;
  }
  require(c.trials >= 1, "experiment: trials must be >= 1");
  for (double r : c.ratios) require(r > 0.0 && r <= 1.0, "experiment: ratios must lie in (0, 1]");
  require(c.confidence > 0.0 && c.confidence < 1.0, "experiment: confidence must lie in (0, 1)");
  return c;
}

namespace detail {

inline Index ratio_columns(double ratio, Index n) {
  return std::max<Index>(1, static_cast<Index>(std::llround(ratio * static_cast<double>(n))));
}

inline Index ratio_cells(double ratio, Index n) {
  return std::max<Index>(1, static_cast<Index>(std::llround(ratio * static_cast<double>(n) * static_cast<double>(n))));
}

inline double sketch_norm(const DenseMatrix& x, Index s, RngStream& rng) {
  ColumnSketch sk = column_subsample(x, s, rng);
  if (s > x.cols()) sk = sk.merged();
  return spectral_norm(sk.S, 1e-12, rng.next_u64());
}

struct RankRow {
  Index matrix = 0;
  std::string law;
  double numrank = 0.0;
  Index s = 0;
  std::vector<double> errors;
};

// One random matrix per index, `reps` column sketches each.
inline std::vector<RankRow> rank_rows(const ExperimentConfig& c) {
  const Index s = ratio_columns(c.ratios.front(), c.n);
  std::vector<RankRow> rows(static_cast<std::size_t>(c.trials));
  const RngStream root(c.seed);
  parallel_for(rows.size(), [&](std::size_t m) {
    RngStream rng = root.split(m);
    const std::string& law = c.laws[m % c.laws.size()];
    const SpectrumMatrix sm = random_spectrum_matrix(parse_spectrum_law(law, c.n), rng);
    const double norm = sm.mu.cwiseAbs().maxCoeff();
    RankRow& r = rows[m];
    r.matrix = static_cast<Index>(m);
    r.law = law;
    r.numrank = spectrum_numerical_rank(sm.mu);
    r.s = s;
    for (Index t = 0; t < c.reps; ++t)
      r.errors.push_back(std::abs(sketch_norm(sm.x.dense(), s, rng) - norm) / norm);
  });
  return rows;
}

}  // namespace detail

// Relative error of the sketched spectral norm against the numerical rank.
// Summary: log-log slope of the binned median error over [numrank_lo, numrank_hi].
inline ExperimentResult run_err_vs_rank(ExperimentConfig c) {
  c.id = ExperimentId::err_vs_rank;
  c = with_defaults(std::move(c));
  const double eta = confidence_eta(1.0 - c.confidence);
  ExperimentResult out;
  out.table.header = {"matrix", "law", "numrank", "s", "rep", "rel_error", "bound_ratio"};
  std::vector<double> nr, err;
  for (const auto& r : detail::rank_rows(c)) {
    const double bound = eta * r.numrank / std::sqrt(static_cast<double>(r.s));
    for (std::size_t t = 0; t < r.errors.size(); ++t) {
      out.table.add(r.matrix, r.law, r.numrank, r.s, static_cast<Index>(t), r.errors[t], r.errors[t] / bound);
      nr.push_back(r.numrank);
      err.push_back(r.errors[t]);
    }
  }
  const auto [slope, bins] = [&] {
    constexpr int kBins = 6;
    const double lo = std::log(c.numrank_lo), hi = std::log(c.numrank_hi);
    std::vector<double> bx, by;
    for (int b = 0; b < kBins; ++b) {
      const double a = lo + (hi - lo) * b / kBins, z = lo + (hi - lo) * (b + 1) / kBins;
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < nr.size(); ++i) {
        const double l = std::log(nr[i]);
        if (l >= a && (l < z || (b == kBins - 1 && l <= z))) {
          xs.push_back(nr[i]);
          ys.push_back(err[i]);
        }
      }
      if (xs.size() >= 3 && median(ys) > 0.0) {
        bx.push_back(median(xs));
        by.push_back(median(ys));
      }
    }
    return std::pair{bx.size() >= 2 ? loglog_slope(bx, by) : std::nan(""), static_cast<double>(bx.size())};
  }();
  out.summary = {{"slope", slope}, {"bins", bins}, {"s", static_cast<double>(detail::ratio_columns(c.ratios.front(), c.n))}};
  return out;
}

// Ratio of the observed error to eta * NumRank / sqrt(s), one row per sketch.
inline ExperimentResult run_err_hist(ExperimentConfig c) {
  c.id = ExperimentId::err_hist;
  c = with_defaults(std::move(c));
  const double eta = confidence_eta(1.0 - c.confidence);
  ExperimentResult out;
  out.table.header = {"matrix", "law", "numrank", "s", "rep", "rel_error", "bound", "ratio"};
  std::vector<double> ratios;
  for (const auto& r : detail::rank_rows(c)) {
    const double bound = eta * r.numrank / std::sqrt(static_cast<double>(r.s));
    for (std::size_t t = 0; t < r.errors.size(); ++t) {
      out.table.add(r.matrix, r.law, r.numrank, r.s, static_cast<Index>(t), r.errors[t], bound, r.errors[t] / bound);
      ratios.push_back(r.errors[t] / bound);
    }
  }
  const double below = static_cast<double>(std::count_if(ratios.begin(), ratios.end(), [](double v) { return v < 1.0; }));
  out.summary = {{"median_ratio", median(ratios)},
                 {"fraction_below_one", below / static_cast<double>(ratios.size())},
                 {"max_ratio", *std::max_element(ratios.begin(), ratios.end())}};
  return out;
}

// Relative error against the number of sampled columns on one fixed matrix.
inline ExperimentResult run_err_vs_s(ExperimentConfig c) {
  c.id = ExperimentId::err_vs_s;
  c = with_defaults(std::move(c));
  const RngStream root(c.seed);
  RngStream gen = root.split(0);
  const SpectrumMatrix sm = random_spectrum_matrix(parse_spectrum_law(c.laws.front(), c.n), gen);
  const double norm = sm.mu.cwiseAbs().maxCoeff();
  const std::size_t ns = c.s_values.size(), nt = static_cast<std::size_t>(c.trials);
  std::vector<double> err(ns * nt);
  parallel_for(err.size(), [&](std::size_t i) {
    RngStream rng = root.split(1 + i);
    err[i] = std::abs(detail::sketch_norm(sm.x.dense(), c.s_values[i / nt], rng) - norm) / norm;
  });
  ExperimentResult out;
  out.table.header = {"s", "trial", "rel_error"};
  std::vector<double> xs, meds;
  for (std::size_t a = 0; a < ns; ++a) {
    std::vector<double> col(err.begin() + static_cast<std::ptrdiff_t>(a * nt),
                            err.begin() + static_cast<std::ptrdiff_t>((a + 1) * nt));
    for (std::size_t t = 0; t < nt; ++t) out.table.add(c.s_values[a], static_cast<Index>(t), col[t]);
    const double m = median(col);
    if (m > 0.0) {
      xs.push_back(static_cast<double>(c.s_values[a]));
      meds.push_back(m);
    }
  }
  const bool fit = xs.size() >= 2 && xs.front() != xs.back();
  out.summary = {{"slope", fit ? loglog_slope(xs, meds) : std::nan("")}, {"numrank", spectrum_numerical_rank(sm.mu)}};
  return out;
}

// Time of an exact leading eigenpair of X over the time of sketch plus leading
// singular pair of S. Runs are sequential so timings do not interfere.
inline ExperimentResult run_eig_speedup(ExperimentConfig c) {
  c.id = ExperimentId::eig_speedup;
  c = with_defaults(std::move(c));
  const RngStream root(c.seed);
  RngStream gen = root.split(0);
  const SpectrumMatrix sm = random_spectrum_matrix(parse_spectrum_law(c.laws.front(), c.n), gen);
  const DenseMatrix& x = sm.x.dense();
  ExperimentResult out;
  out.table.header = {"ratio", "s", "run", "t_exact", "t_sketch", "speedup",
                      "matvecs_exact", "matvecs_sketch", "entries_per_product_exact", "entries_per_product_sketch"};
  for (std::size_t a = 0; a < c.ratios.size(); ++a) {
    const Index s = detail::ratio_columns(c.ratios[a], c.n);
    std::vector<double> sp;
    for (Index run = 0; run < c.trials; ++run) {
      RngStream rng = root.split(1 + a * 1000 + static_cast<std::size_t>(run));
      EigOptions opts;
      opts.tol = 1e-8;
      opts.which = Which::largest_magnitude;
      Stopwatch w1;
      const EigResult ex = leading_eigpairs(DenseSymOperator(x), 1, opts, rng);
      const double t_exact = w1.seconds();
      Stopwatch w2;
      const ColumnSketch sk = column_subsample(x, s, rng);
      const SingularResult sv = leading_singular(sk.S, 1, 1e-8, rng);
      const double t_sketch = w2.seconds();
      const double speedup = t_exact / t_sketch;
      sp.push_back(speedup);
      out.table.add(c.ratios[a], s, run, t_exact, t_sketch, speedup, ex.matvecs, sv.matvecs,
                    DenseSymOperator(x).entries_per_apply(), GramOperator(sk.S).entries_per_apply());
    }
    out.summary.emplace_back("median_speedup_" + fmt(c.ratios[a]), median(sp));
  }
  return out;
}

namespace detail {

inline GeneratedRatings collab_fixture(Index n, double observed, Index k, std::uint64_t seed) {
  RngStream rng(seed, 7);
  return generate_vvt_ratings(n, 3, observed, k, rng);
}

inline SolverConfig bench_solver(double eps, Index iterations, GradientMode mode, Index s1, Index s2,
                                 std::uint64_t seed) {
  SolverConfig cfg;
  cfg.eps = eps;
  cfg.N = iterations;
  cfg.mode = mode;
  cfg.s1 = s1;
  cfg.s2 = s2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace detail

// Deterministic (exact eigenpairs and adjoint) against subsampled (s1 = ratio n,
// s2 = ratio n^2) on the generated ratings instance, one pair of runs per seed.
inline ExperimentResult run_converge_trace(ExperimentConfig c) {
  c.id = ExperimentId::converge_trace;
  c = with_defaults(std::move(c));
  const GeneratedRatings gr = detail::collab_fixture(c.n, c.observed, c.k, c.seed);
  const ProblemInstance inst = build_collab_filter(gr.instance);
  const Index n = c.n, s1 = detail::ratio_columns(c.ratios.front(), n);
  ExperimentResult out;
  out.table.header = {"seed", "mode", "iter", "elapsed_s", "obj_estimate", "gap", "exact_gap_flag", "s1", "s2"};
  std::map<std::string, std::vector<double>> ttc, fin;
  std::map<std::string, double> certified;
  for (Index t = 0; t < c.trials; ++t) {
    const std::uint64_t seed = RngStream(c.seed).split(static_cast<std::uint64_t>(t)).next_u64();
    for (auto mode : {GradientMode::exact, GradientMode::sampled}) {
      const bool det = mode == GradientMode::exact;
      SolverConfig cfg = detail::bench_solver(c.eps, c.iterations, mode, det ? n : s1,
                                              det ? n * n : detail::ratio_cells(c.ratios.front(), n), seed);
      cfg.gap_check_interval = std::max<Index>(1, c.iterations / 100);
      cfg.trace_stride = 1;
      cfg.stop_when_certified = true;
      const SolverRun run = solve(inst.problem, inst.q(), cfg);
      const std::string name = to_string(mode);
      for (const auto& r : run.trace)
        out.table.add(t, name, r.iter, r.elapsed_s, r.obj_estimate, r.gap, r.exact_gap, r.s1, r.s2);
      ttc[name].push_back(run.certified ? run.time_to_certified : std::numeric_limits<double>::infinity());
      certified[name] += run.certified ? 1.0 : 0.0;
      fin[name].push_back(run.final_gap().primal);
    }
  }
  for (const char* m : {"exact", "sampled"}) {
    out.summary.emplace_back(std::string("median_time_to_gap_") + m, median(ttc[m]));
    out.summary.emplace_back(std::string("certified_runs_") + m, certified[m]);
    out.summary.emplace_back(std::string("median_final_objective_") + m, median(fin[m]));
  }
  return out;
}

// Solver seconds for a fixed iteration budget, deterministic against subsampled.
inline ExperimentResult run_cpu_table(ExperimentConfig c) {
  c.id = ExperimentId::cpu_table;
  c = with_defaults(std::move(c));
  require(c.problem == "spectral-box" || c.problem == "collab", "cpu-table: problem must be spectral-box or collab");
  ExperimentResult out;
  out.table.header = {"problem", "n", "run", "iterations", "t_det", "t_sub", "speedup", "gap_det", "gap_sub"};
  for (Index n : c.dims) {
    std::vector<double> sp;
    for (Index run = 0; run < c.trials; ++run) {
      const std::uint64_t seed = RngStream(c.seed).split(static_cast<std::uint64_t>(n * 1000 + run)).next_u64();
      ProblemInstance inst;
      if (c.problem == "collab") {
        inst = build_collab_filter(detail::collab_fixture(n, c.observed, c.k, seed).instance);
      } else {
        RngStream gen(seed, 3);
        inst = build_spectral_box(random_spectrum_matrix(parse_spectrum_law(c.laws.front(), n), gen).x, c.rho);
      }
      const Index s1 = detail::ratio_columns(c.ratios.front(), n);
      SolverConfig det = detail::bench_solver(c.eps, c.iterations, GradientMode::exact, n, n * n, seed);
      SolverConfig sub =
          detail::bench_solver(c.eps, c.iterations, GradientMode::sampled, s1, detail::ratio_cells(c.ratios.front(), n), seed);
      det.gap_check_interval = sub.gap_check_interval = c.iterations;
      det.average_certificate = sub.average_certificate = false;
      const SolverRun rd = solve(inst.problem, inst.q(), det);
      const SolverRun rs = solve(inst.problem, inst.q(), sub);
      const double td = rd.cost.solver_seconds(), ts = rs.cost.solver_seconds();
      sp.push_back(td / ts);
      out.table.add(c.problem, n, run, c.iterations, td, ts, td / ts, rd.final_gap().gap, rs.final_gap().gap);
    }
    out.summary.emplace_back("median_speedup_" + std::to_string(n), median(sp));
  }
  return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  switch (c.id) {
    case ExperimentId::err_vs_rank: return run_err_vs_rank(c);
    case ExperimentId::err_hist: return run_err_hist(c);
    case ExperimentId::err_vs_s: return run_err_vs_s(c);
    case ExperimentId::eig_speedup: return run_eig_speedup(c);
    case ExperimentId::converge_trace: return run_converge_trace(c);
    case ExperimentId::cpu_table: return run_cpu_table(c);
  }
  throw Error(Errc::invalid_argument, "unknown experiment");
}

}  // namespace specsub
