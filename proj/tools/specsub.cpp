#include <openssl/evp.h>

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "specsub/bench/csv.hpp"
#include "specsub/bench/experiments.hpp"
#include "specsub/bench/spectrum.hpp"
#include "specsub/core/error.hpp"
#include "specsub/core/parallel.hpp"
#include "specsub/io/matrix_market.hpp"
#include "specsub/problems/app_rates.hpp"
#include "specsub/problems/collab.hpp"
#include "specsub/problems/fmmc.hpp"
#include "specsub/problems/lasso.hpp"
#include "specsub/problems/spectral_box.hpp"
#include "specsub/sa/solver.hpp"

namespace fs = std::filesystem;
using namespace specsub;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNotConverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// sha1("blob <len>\0" + bytes), the digest git gives a file.
std::string git_blob_sha1(const std::string& bytes) {
  const std::string head = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, head.data(), head.size());
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return s.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// "key: value" lines.
struct Metadata {
  std::vector<std::pair<std::string, std::string>> rows;
  template <typename T>
  void add(const std::string& k, const T& v) {
    rows.emplace_back(k, fmt(v));
  }
  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw Error(Errc::io, "cannot write " + path);
    for (const auto& [k, v] : rows) f << k << ": " << v << '\n';
  }
};

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Timing columns set to 0 so repeated runs give identical bytes.
void mask_timing(CsvTable& t) {
  static const std::vector<std::string> timing = {"elapsed_s", "t_exact", "t_sketch", "speedup", "t_det", "t_sub"};
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (std::find(timing.begin(), timing.end(), t.header[c]) == timing.end()) continue;
    for (auto& row : t.rows) row[c] = "0";
  }
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind = "matrix";
  Index n = 0;
  std::string law = "beta:1:3";
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::string graph = "path";
  double observed = 0.3;
  Index rank = 3;
  std::string out;
};

int run_gen(const GenArgs& a, int argc, char** argv) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  Metadata md;
  md.add("command", command_line(argc, argv));
  md.add("started_at", utc_now());
  md.add("kind", a.kind);
  md.add("n", a.n);
  md.add("seed", a.seed);
  RngStream rng(a.seed, 3);
  if (a.kind == "matrix") {
    if (a.n < 2) throw UsageError("gen matrix: --n must be >= 2");
    SpectrumSpec spec = parse_spectrum_law(a.law, a.n);
    spec.scale = a.scale;
    const SpectrumMatrix m = random_spectrum_matrix(spec, rng);
    mm::write_file(a.out, m.x);
    md.add("law", a.law);
    md.add("scale", a.scale);
    md.add("numrank", spectrum_numerical_rank(m.mu));
    md.add("data", "synthetic spectrum Q diag(mu) Q^T with Haar Q");
  } else if (a.kind == "ratings") {
    const GeneratedRatings g = generate_vvt_ratings(a.n, a.rank, a.observed, 4, rng);
    std::ofstream f(a.out);
    if (!f) throw Error(Errc::io, "cannot write " + a.out);
    f << "i,j,value\n";
    for (const auto& r : g.instance.ratings) f << r.i << ',' << r.j << ',' << fmt(r.value) << '\n';
    md.add("rank", a.rank);
    md.add("observed", a.observed);
    md.add("ratings", static_cast<Index>(g.instance.ratings.size()));
  } else if (a.kind == "graph") {
    Graph g;
    if (a.graph == "path") g = path_graph(a.n);
    else if (a.graph == "cycle") g = cycle_graph(a.n);
    else if (a.graph == "star") g = star_graph(a.n);
    else if (a.graph == "complete") g = complete_graph(a.n);
    else throw UsageError("--graph must be path, cycle, star or complete");
    std::ofstream f(a.out);
    if (!f) throw Error(Errc::io, "cannot write " + a.out);
    f << g.n << ' ' << g.edges.size() << '\n';
    for (const auto& e : g.edges) f << e.u << ' ' << e.v << '\n';
    md.add("graph", a.graph);
  } else {
    throw UsageError("--kind must be matrix, ratings or graph");
  }
  md.add("output_sha1", git_blob_sha1(read_bytes(a.out)));
  md.add("finished_at", utc_now());
  md.write(a.out + ".meta.txt");
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string problem;
  std::string input;
  double rho = 0.1;
  Index k = 4;
  bool trace_norm = false;
  double radius = 0.0;
  bool no_center = false;
  double sigma = 0.0;
  double eps = 0.05;
  double beta = 0.1;
  Index s1 = 0;
  Index s2 = 0;
  Index iterations = 0;
  double gamma = 0.0;
  std::string mode = "sampled";
  std::uint64_t seed = 0;
  Index gap_interval = 0;
  Index trace_stride = 0;
  Index max_iterations = 20'000;
  bool stop_when_certified = false;
  bool no_timing = false;
  Index s1_start = 1;
  Index s1_cap = 0;
  std::string out;
};

struct Loaded {
  ProblemInstance inst;
  CollabLayout layout;
  Graph graph;
  LassoInstance lasso;
};

// Two whitespace-separated columns per line: design entry, response entry.
LassoInstance read_lasso(const std::string& path, double sigma) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open " + path);
  std::vector<double> d, r;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      if (d.empty()) continue;
      throw Error(Errc::io, "lasso: bad line in " + path);
    }
    d.push_back(a);
    r.push_back(b);
  }
  LassoInstance l;
  l.design = Eigen::Map<Vector>(d.data(), static_cast<Index>(d.size()));
  l.response = Eigen::Map<Vector>(r.data(), static_cast<Index>(r.size()));
  l.sigma = sigma;
  return l;
}

Loaded load_problem(const SolveArgs& a) {
  Loaded L;
  if (a.problem == "spectral-box") {
    L.inst = build_spectral_box(SymMatrix(mm::read_file(a.input)), a.rho);
  } else if (a.problem == "collab") {
    CollabFilterInstance c;
    c.ratings = read_ratings_csv(a.input);
    c.n = ratings_dimension(c.ratings);
    c.k = a.k;
    c.center = !a.no_center;
    c.radius = a.radius;
    L.inst = build_collab_filter(c, &L.layout, a.trace_norm ? ObjectiveKind::trace : ObjectiveKind::ksum);
  } else if (a.problem == "lasso") {
    L.lasso = read_lasso(a.input, a.sigma);
    L.inst = build_lasso(L.lasso);
  } else if (a.problem == "fmmc") {
    L.graph = read_graph(a.input);
    L.inst = build_fmmc(L.graph);
  } else {
    throw UsageError("--problem must be spectral-box, collab, lasso or fmmc");
  }
  return L;
}

SolverConfig solver_config(const SolveArgs& a) {
  SolverConfig c;
  c.eps = a.eps;
  c.beta = a.beta;
  c.s1 = a.s1;
  c.s2 = a.s2;
  c.N = a.iterations;
  c.gamma = a.gamma;
  c.seed = a.seed;
  c.gap_check_interval = a.gap_interval;
  c.trace_stride = a.trace_stride;
  c.max_iterations = a.max_iterations;
  c.stop_when_certified = a.stop_when_certified;
  if (a.mode == "sampled") c.mode = GradientMode::sampled;
  else if (a.mode == "exact") c.mode = GradientMode::exact;
  else throw UsageError("--mode must be sampled or exact");
  return c;
}

void write_trace(const SolverRun& run, bool no_timing, const std::string& path) {
  CsvTable t;
  t.header = {"iter", "elapsed_s", "obj_estimate", "gap", "exact_gap_flag", "s1", "s2"};
  for (const auto& r : run.trace)
    t.add(r.iter, no_timing ? 0.0 : r.elapsed_s, r.obj_estimate, r.gap, r.exact_gap, r.s1, r.s2);
  t.write_file(path);
}

void write_vector(const Vector& y, const std::string& path) {
  CsvTable t;
  t.header = {"index", "value"};
  for (Index i = 0; i < y.size(); ++i) t.add(i, y[i]);
  t.write_file(path);
}

// Problem-specific outputs and the sampling rate predicted at the solution.
void write_solution(const Loaded& L, const SolveArgs& a, const Vector& y, const fs::path& dir, Metadata& md) {
  write_vector(y, (dir / "solution.csv").string());
  const auto& prob = L.inst.problem;
  AppRate rate;
  if (a.problem == "spectral-box") {
    mm::write_file((dir / "perturbation.mtx").string(), box_perturbation(L.inst, y));
    rate = spectral_box_rate(prob.materialize(y).dense(), a.eps, a.beta);
    md.add("rate_formula", "eta^2 ||A+U||_2^2 / eps^2 * NumRank^2");
  } else if (a.problem == "collab") {
    const DenseMatrix full = reconstruct_ratings(L.inst, L.layout, y);
    mm::write_file((dir / "completed.mtx").string(), full);
    rate = collab_rate(prob.materialize(y).dense(), a.eps, a.beta);
    const CollabObjectives o = collab_objectives(L.inst, y, a.k);
    md.add("rating_mean", L.layout.mean);
    md.add("ball_radius", L.layout.radius);
    md.add("ksum_at_solution", o.ksum);
    md.add("trace_norm_at_solution", o.trace);
    md.add("rate_formula", "eta^2 ||Y||_tr^2 / eps^2 * kappa^2 * Rank");
  } else if (a.problem == "lasso") {
    rate = lasso_rate(y, a.eps, a.beta);
    md.add("l1_at_solution", y.cwiseAbs().sum());
    md.add("residual_norm", (L.lasso.design.cwiseProduct(y) - L.lasso.response).norm());
    md.add("rate_formula", "eta^2 ||y||_1 / eps^2 * kappa(y)^2 * Card(y)");
  } else {
    const DenseMatrix p = transition_matrix(L.graph, y);
    mm::write_file((dir / "transition.mtx").string(), p);
    rate = fmmc_rate(p, a.eps, a.beta);
    md.add("sigma2_at_solution", second_singular_value(p));
    md.add("sigma2_metropolis_hastings", second_singular_value(metropolis_hastings_chain(L.graph)));
    md.add("rate_formula", "eta^2 NumRank^2 Rank / (eps^2 sigma_2^2)");
  }
  md.add("rate_at_solution", rate.rate.exact);
  md.add("rate_at_solution_columns", rate.capped);
  md.add("rate_degenerate", rate.degenerate);
  if (rate.degenerate) md.add("rate_note", "formula degenerate at this solution; s1 capped at n");
  if (rate.numrank > 0.0) md.add("numrank_at_solution", rate.numrank);
  if (rate.rank > 0) md.add("rank_at_solution", rate.rank);
}

void describe_run(const SolverRun& run, Metadata& md) {
  const auto& c = run.config;
  md.add("mode", to_string(c.cfg.mode));
  md.add("s1", c.cfg.s1);
  md.add("s2", c.cfg.s2);
  md.add("iterations_planned", c.cfg.N);
  md.add("iterations_formula", c.formula_N);
  md.add("iterations_run", run.iterations);
  md.add("budget_capped", c.budget_capped);
  md.add("gamma", c.cfg.gamma);
  md.add("m_star_sq", c.m_star_sq);
  md.add("gap_check_interval", c.cfg.gap_check_interval);
  md.add("final_primal", run.final_gap().primal);
  md.add("final_dual", run.final_gap().dual);
  md.add("final_gap", run.final_gap().gap);
  md.add("best_gap", run.best_gap);
  md.add("first_certified_iter", run.first_certified_iter);
  md.add("matvecs", run.cost.matvecs);
  md.add("sampled_columns", run.cost.sampled_columns);
  md.add("dense_passes", run.cost.dense_passes);
  md.add("product_samples", run.cost.product_samples);
  md.add("solver_seconds", run.cost.solver_seconds());
}

Metadata common_metadata(const SolveArgs& a, int argc, char** argv) {
  Metadata md;
  md.add("command", command_line(argc, argv));
  md.add("started_at", utc_now());
  md.add("problem", a.problem);
  md.add("input", a.input);
  md.add("input_sha1", git_blob_sha1(read_bytes(a.input)));
  md.add("seed", a.seed);
  md.add("eps", a.eps);
  md.add("beta", a.beta);
  md.add("threads", static_cast<Index>(thread_count()));
  return md;
}

int run_solve(const SolveArgs& a, int argc, char** argv) {
  const SolverConfig cfg = solver_config(a);
  const Loaded L = load_problem(a);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  Metadata md = common_metadata(a, argc, argv);
  md.add("n", L.inst.problem.n());
  md.add("p", L.inst.problem.p());
  md.add("objective", to_string(L.inst.problem.kind));
  const SolverRun run = solve(L.inst.problem, L.inst.q(), cfg);
  describe_run(run, md);
  md.add("status", run.status());
  write_trace(run, a.no_timing, (dir / "trace.csv").string());
  write_solution(L, a, run.best_y, dir, md);
  md.add("solution", "averaged iterate with the smallest exact gap");
  md.add("finished_at", utc_now());
  md.write((dir / "metadata.txt").string());
  std::cout << "status " << run.status() << "  gap " << fmt(run.best_gap) << "  iterations "
            << run.iterations << '\n';
  return run.certified ? kOk : kNotConverged;
}

int run_rate_search(const SolveArgs& a, int argc, char** argv) {
  const SolverConfig cfg = solver_config(a);
  const Loaded L = load_problem(a);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  Metadata md = common_metadata(a, argc, argv);
  md.add("n", L.inst.problem.n());
  md.add("p", L.inst.problem.p());
  const RateSearchResult r = rate_search(L.inst.problem, L.inst.q(), cfg, a.s1_start, a.s1_cap);

  CsvTable stages;
  stages.header = {"stage", "s1", "iterations", "best_gap", "certified", "sampled_columns", "solver_seconds"};
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    const auto& st = r.stages[i];
    stages.add(static_cast<Index>(i), st.s1, st.iterations, st.best_gap, st.certified, st.sampled_columns,
               a.no_timing ? 0.0 : st.solver_seconds);
  }
  stages.write_file((dir / "stages.csv").string());
  write_trace(r.final_run, a.no_timing, (dir / "trace.csv").string());
  describe_run(r.final_run, md);
  md.add("stages", static_cast<Index>(r.stages.size()));
  md.add("s1_final", r.s1_final);
  md.add("total_work", r.total_work);
  md.add("final_work", r.final_work);
  md.add("status", r.status());
  write_solution(L, a, r.y, dir, md);
  md.add("finished_at", utc_now());
  md.write((dir / "metadata.txt").string());
  std::cout << "status " << r.status() << "  s1 " << r.s1_final << "  gap " << fmt(r.best_gap) << '\n';
  return r.certified ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string experiment;
  ExperimentConfig cfg;
  bool no_timing = false;
};

int run_bench(BenchArgs a, int argc, char** argv) {
  a.cfg.id = parse_experiment(a.experiment);
  Metadata md;
  md.add("command", command_line(argc, argv));
  md.add("started_at", utc_now());
  md.add("experiment", a.experiment);
  md.add("seed", a.cfg.seed);
  md.add("threads", static_cast<Index>(thread_count()));
  ExperimentResult res = run_experiment(a.cfg);
  if (a.no_timing) mask_timing(res.table);
  res.table.write_file(a.cfg.output);
  const ExperimentConfig c = with_defaults(a.cfg);
  md.add("n", c.n);
  md.add("trials", c.trials);
  md.add("confidence", c.confidence);
  if (c.id == ExperimentId::cpu_table || c.id == ExperimentId::converge_trace) {
    md.add("problem", c.id == ExperimentId::converge_trace ? std::string("collab") : c.problem);
    md.add("eps", c.eps);
    md.add("iterations", c.iterations);
  }
  for (const auto& l : c.laws) md.add("law", l);
  md.add("data", "synthetic beta-law and power-law spectra stand in for gene-expression covariances");
  md.add("rows", static_cast<Index>(res.table.rows.size()));
  md.add("output_sha1", git_blob_sha1(read_bytes(a.cfg.output)));
  for (const auto& [k, v] : res.summary) md.add("summary." + k, v);
  md.add("finished_at", utc_now());
  md.write(a.cfg.output + ".meta.txt");
  for (const auto& [k, v] : res.summary) std::cout << k << " = " << fmt(v) << '\n';
  return kOk;
}

void add_solver_options(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--problem", a.problem, "spectral-box | collab | lasso | fmmc")->required();
  cmd->add_option("--input", a.input,
                  "spectral-box: Matrix Market symmetric matrix; collab: CSV 'i,j,value' (zero-based); "
                  "lasso: lines 'design response'; fmmc: edge list with header 'n m' then 'u v' lines")
      ->required();
  cmd->add_option("--rho", a.rho, "box half-width (spectral-box)");
  cmd->add_option("--k", a.k, "number of singular values (collab)");
  cmd->add_flag("--trace-norm", a.trace_norm, "minimize the trace norm instead of the k-sum (collab)");
  cmd->add_option("--radius", a.radius, "ball radius, 0 picks it from the ratings (collab)");
  cmd->add_flag("--no-center", a.no_center, "keep ratings uncentered (collab)");
  cmd->add_option("--sigma", a.sigma, "residual bound (lasso)");
  cmd->add_option("--eps", a.eps, "target accuracy");
  cmd->add_option("--beta", a.beta, "failure probability in (0,1]");
  cmd->add_option("--s1", a.s1, "sketch columns, 0 = n");
  cmd->add_option("--s2", a.s2, "product samples, 0 = n^2");
  cmd->add_option("--iterations", a.iterations, "iteration count, 0 = budget formula");
  cmd->add_option("--gamma", a.gamma, "step size, 0 = formula");
  cmd->add_option("--mode", a.mode, "sampled | exact");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--gap-interval", a.gap_interval, "iterations between exact gap checks, 0 = N/50");
  cmd->add_option("--trace-stride", a.trace_stride, "iterations between trace rows, 0 = N/1000");
  cmd->add_option("--max-iterations", a.max_iterations, "cap on the formula iteration budget");
  cmd->add_flag("--stop-when-certified", a.stop_when_certified, "stop at the first gap <= 2 eps");
  cmd->add_flag("--no-timing", a.no_timing, "write 0 in timing columns");
  cmd->add_option("-o,--out", a.out, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specsub: subsampled stochastic approximation for spectral objectives"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a test matrix, ratings file or graph");
  gen_cmd->add_option("--kind", gen.kind, "matrix | ratings | graph");
  gen_cmd->add_option("--n", gen.n, "dimension")->required();
  gen_cmd->add_option("--law", gen.law, "beta:a:b | power:a | rank:r:noise | list:v1,v2,...");
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--scale", gen.scale, "spectrum multiplier");
  gen_cmd->add_option("--graph", gen.graph, "path | cycle | star | complete");
  gen_cmd->add_option("--observed", gen.observed, "observed fraction (ratings)");
  gen_cmd->add_option("--rank", gen.rank, "factor rank (ratings)");
  gen_cmd->add_option("-o,--out", gen.out, "output file")->required();

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "run the solver once");
  add_solver_options(solve_cmd, solve_args);

  SolveArgs rate_args;
  auto* rate_cmd = app.add_subcommand("rate-search", "double s1 until the gap certifies");
  add_solver_options(rate_cmd, rate_args);
  rate_cmd->add_option("--s1-start", rate_args.s1_start, "first s1");
  rate_cmd->add_option("--s1-cap", rate_args.s1_cap, "largest s1, 0 = n");

  BenchArgs bench_args;
  auto& bc = bench_args.cfg;
  auto* bench_cmd = app.add_subcommand("bench", "run an experiment and write its CSV");
  bench_cmd->add_option("experiment", bench_args.experiment,
                        "err-vs-rank | err-hist | err-vs-s | eig-speedup | converge-trace | cpu-table")
      ->required();
  bench_cmd->add_option("--n", bc.n, "dimension, 0 = experiment default");
  bench_cmd->add_option("--trials", bc.trials, "matrices, trials, runs or seeds");
  bench_cmd->add_option("--reps", bc.reps, "sketches per matrix");
  bench_cmd->add_option("--ratios", bc.ratios, "sampling ratios s/n")->delimiter(',');
  bench_cmd->add_option("--s-values", bc.s_values, "sketch sizes (err-vs-s)")->delimiter(',');
  bench_cmd->add_option("--dims", bc.dims, "dimensions (cpu-table)")->delimiter(',');
  bench_cmd->add_option("--law", bc.laws, "spectrum law, repeatable");
  bench_cmd->add_option("--confidence", bc.confidence, "confidence level for eta");
  bench_cmd->add_option("--seed", bc.seed, "random seed");
  bench_cmd->add_option("--problem", bc.problem, "spectral-box | collab (cpu-table)");
  bench_cmd->add_option("--eps", bc.eps, "target accuracy, 0 = default");
  bench_cmd->add_option("--iterations", bc.iterations, "iterations, 0 = default");
  bench_cmd->add_option("--rho", bc.rho, "box half-width (cpu-table)");
  bench_cmd->add_option("--observed", bc.observed, "observed fraction (collab)");
  bench_cmd->add_option("--k", bc.k, "number of singular values (collab)");
  bench_cmd->add_flag("--no-timing", bench_args.no_timing, "write 0 in timing columns");
  bench_cmd->add_option("-o,--out", bc.output, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen, argc, argv);
    if (*solve_cmd) return run_solve(solve_args, argc, argv);
    if (*rate_cmd) return run_rate_search(rate_args, argc, argv);
    return run_bench(bench_args, argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument) std::cerr << "error: " << e.what() << "\n\n" << app.help();
    else std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
