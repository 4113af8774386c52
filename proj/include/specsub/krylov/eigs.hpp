#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/core/rng.hpp"
#include "specsub/krylov/lanczos.hpp"
#include "specsub/krylov/oracle.hpp"
#include "specsub/krylov/tridiag.hpp"

namespace specsub {

struct RitzPair {
  double value = 0.0;
  Vector vector;          // unit norm
  double residual = 0.0;  // ||X v - value v||_2, recomputed with a fresh product
};

enum class Which { largest_algebraic, largest_magnitude };

struct EigOptions {
  double tol = 1e-8;  // residual <= tol * |theta_1|
  Index max_steps = 0;  // per Lanczos run; 0 picks min(dim, 300)
  int max_restarts = 5;
  Which which = Which::largest_algebraic;
  // Search the complement of the found pairs for extra copies of repeated
  // eigenvalues (only matters when more than one pair is requested).
  bool verify_multiplicity = true;
};

struct EigResult {
  std::vector<RitzPair> pairs;
  Index iterations = 0;
  std::uint64_t matvecs = 0;
  std::uint64_t entries = 0;
  int restarts = 0;
  bool converged = false;
};

// Worst-case step count for a leading Ritz value of relative precision eps with
// probability 1 - delta from a random start. Very conservative; logged only.
inline Index lanczos_iteration_bound(Index n, double delta, double eps) {
  return static_cast<Index>(std::ceil(std::log(static_cast<double>(n) / (delta * delta)) / (4.0 * std::sqrt(eps))));
}

namespace detail {

inline bool ranks_before(double a, double b, Which which) {
  return which == Which::largest_magnitude ? std::abs(a) > std::abs(b) : a > b;
}

inline double criterion_value(double v, Which which) {
  return which == Which::largest_magnitude ? std::abs(v) : v;
}

// Up to r Ritz values of T ordered by the target criterion.
inline std::vector<double> select_ritz_values(const Tridiagonal& t, Index r, Which which) {
  const Index k = t.size();
  std::vector<double> vals;
  if (k <= 2 * r + 8) {
    vals = tridiagonal_eigenvalues(t);
  } else {
    for (Index i = 0; i < r; ++i) vals.push_back(tridiagonal_eigenvalue(t, k - 1 - i));
    if (which == Which::largest_magnitude) {
      for (Index i = 0; i < r; ++i) vals.push_back(tridiagonal_eigenvalue(t, i));
    }
  }
  std::sort(vals.begin(), vals.end(), [&](double a, double b) { return ranks_before(a, b, which); });
  if (static_cast<Index>(vals.size()) > r) vals.resize(static_cast<std::size_t>(r));
  return vals;
}

struct RunOutcome {
  std::vector<RitzPair> pairs;
  bool converged = false;
  bool stagnated = false;
};

template <SymmetricOperator Op>
RunOutcome lanczos_run(const Op& op, const Vector& start, Index r, const DenseMatrix* locked,
                       const EigOptions& opts, Index max_steps, EigResult& stats) {
  LanczosProcess<Op> proc(op, start, max_steps, locked);
  RunOutcome out;
  std::vector<double> values;
  std::vector<std::vector<double>> ys;
  double prev_theta = std::numeric_limits<double>::quiet_NaN();
  double best_resid = std::numeric_limits<double>::infinity();
  int stall = 0;
  bool estimates_ok = false;

  while (true) {
    const bool advanced = proc.step();
    const Index j = proc.steps();
    const bool last = !advanced || proc.done();
    const bool check = last || j <= 30 || j % 3 == 0;
    if (!check || j == 0) {
      if (last) break;
      continue;
    }
    values = select_ritz_values(proc.tridiagonal(), r, opts.which);
    ys = tridiagonal_eigenvectors(proc.tridiagonal(), values);
    const double scale = std::abs(values.front());
    double worst = 0.0;
    for (const auto& y : ys) worst = std::max(worst, std::abs(proc.beta_last() * y.back()));
    if (proc.breakdown()) worst = 0.0;
    const bool enough = static_cast<Index>(values.size()) >= std::min<Index>(r, proc.max_steps());
    estimates_ok = enough && worst <= opts.tol * scale;
    if (estimates_ok || last) break;

    // Stagnation: theta_1 frozen while the residual stops improving.
    const double theta = values.front();
    const bool frozen = std::isfinite(prev_theta) &&
                        std::abs(theta - prev_theta) <= 0.1 * opts.tol * std::max(std::abs(theta), 1e-300);
    if (worst < 0.5 * best_resid) {
      best_resid = worst;
      stall = 0;
    } else if (frozen) {
      ++stall;
    }
    prev_theta = theta;
    if (stall >= 5) {
      out.stagnated = true;
      break;
    }
  }

  stats.iterations += proc.steps();
  stats.matvecs += proc.matvecs();
  stats.entries += proc.entries();

  const auto basis = proc.basis();
  const Index n = op.dim();
  Vector xv(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RitzPair p;
    p.value = values[i];
    const Eigen::Map<const Vector> y(ys[i].data(), static_cast<Index>(ys[i].size()));
    p.vector = basis * y;
    p.vector.normalize();
    op.apply(p.vector, xv);
    ++stats.matvecs;
    stats.entries += op.entries_per_apply();
    p.residual = (xv - p.value * p.vector).norm();
    scale = std::max(scale, std::abs(p.value));
    out.pairs.push_back(std::move(p));
  }
  out.converged = !out.pairs.empty();
  for (const auto& p : out.pairs) {
    if (p.residual > opts.tol * scale) out.converged = false;
  }
  return out;
}

inline Vector random_unit(Index n, RngStream& rng) {
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = rng.normal();
  return u / u.norm();
}

inline DenseMatrix stack_vectors(const std::vector<RitzPair>& pairs, Index n) {
  DenseMatrix m(n, static_cast<Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) m.col(static_cast<Index>(i)) = pairs[i].vector;
  return m;
}

// Restarted search for the r leading pairs in the complement of `locked`.
template <SymmetricOperator Op>
RunOutcome restarted_search(const Op& op, Index r, const DenseMatrix* locked, const EigOptions& opts,
                            RngStream& rng, EigResult& stats) {
  const Index n = op.dim();
  const Index room = n - (locked ? locked->cols() : 0);
  const Index max_steps = std::min(room, opts.max_steps > 0 ? opts.max_steps : Index{300});
  Vector start = random_unit(n, rng);
  RunOutcome best;
  for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
    RunOutcome run = lanczos_run(op, start, std::min(r, room), locked, opts, max_steps, stats);
    if (run.converged) return run;
    best = std::move(run);
    if (attempt == opts.max_restarts) break;
    ++stats.restarts;
    if (best.stagnated || best.pairs.empty()) {
      start = random_unit(n, rng);
    } else {
      // Out of room: restart from the current Ritz vectors, keeping their progress.
      start.setZero(n);
      for (const auto& p : best.pairs) start += p.vector;
      start += 1e-6 * random_unit(n, rng);
    }
  }
  return best;
}

}  // namespace detail

// The r leading eigenpairs of a symmetric operator (by value or by magnitude).
template <SymmetricOperator Op>
EigResult leading_eigpairs(const Op& op, Index r, const EigOptions& opts, RngStream& rng) {
  require(opts.tol > 0.0, "leading_eigpairs: tol must be positive");
  const Index n = op.dim();
  require(r >= 1 && r <= n, "leading_eigpairs: need 1 <= r <= dim");
  EigResult result;

  detail::RunOutcome first = detail::restarted_search(op, r, nullptr, opts, rng, result);
  std::vector<RitzPair> found = std::move(first.pairs);
  bool converged = first.converged;

  if (r > 1 && (opts.verify_multiplicity || static_cast<Index>(found.size()) < r)) {
    // Lanczos sees one copy of each repeated eigenvalue; look for more in the complement.
    for (int round = 0; round < 2 * r + 2 && static_cast<Index>(found.size()) < n; ++round) {
      const DenseMatrix locked = detail::stack_vectors(found, n);
      detail::RunOutcome extra = detail::restarted_search(op, r, &locked, opts, rng, result);
      if (extra.pairs.empty()) break;
      const bool full = static_cast<Index>(found.size()) >= r;
      const double worst_kept = detail::criterion_value(found.back().value, opts.which);
      const double best_new = detail::criterion_value(extra.pairs.front().value, opts.which);
      const double slack = opts.tol * std::abs(found.front().value);
      if (full && best_new <= worst_kept + slack) break;
      converged = converged && extra.converged;
      for (auto& p : extra.pairs) found.push_back(std::move(p));
      std::stable_sort(found.begin(), found.end(), [&](const RitzPair& a, const RitzPair& b) {
        return detail::ranks_before(a.value, b.value, opts.which);
      });
      if (static_cast<Index>(found.size()) > r) found.resize(static_cast<std::size_t>(r));
    }
  }
  result.pairs = std::move(found);
  result.converged = converged;
  return result;
}

// Leading pair with residual <= tol * |theta|; throws NotConverged otherwise.
template <SymmetricOperator Op>
RitzPair leading_eigpair(const Op& op, double tol, int max_restarts, RngStream& rng,
                         Which which = Which::largest_algebraic) {
  EigOptions opts;
  opts.tol = tol;
  opts.max_restarts = max_restarts;
  opts.which = which;
  EigResult res = leading_eigpairs(op, 1, opts, rng);
  if (!res.converged) throw Error(Errc::not_converged, "leading_eigpair: residual above tolerance");
  return std::move(res.pairs.front());
}

struct SingularTriplet {
  double sigma = 0.0;
  Vector left;   // in R^m
  Vector right;  // in R^s, S^T left / sigma (zero when sigma == 0)
  double residual = 0.0;  // Gram-operator residual
};

struct SingularResult {
  std::vector<SingularTriplet> triplets;
  bool converged = false;
  std::uint64_t matvecs = 0;
  std::uint64_t entries = 0;
  Index iterations = 0;
};

// k leading singular triplets of S via Lanczos on u -> S (S^T u).
inline SingularResult leading_singular(const DenseMatrix& s, Index k, double tol, RngStream& rng,
                                       bool verify_multiplicity = true, int max_restarts = 5) {
  require(k >= 1 && k <= std::min(s.rows(), s.cols()), "leading_singular: need 1 <= k <= min(m, s)");
  GramOperator gram(s);
  EigOptions opts;
  opts.tol = tol;
  opts.max_restarts = max_restarts;
  opts.verify_multiplicity = verify_multiplicity;
  EigResult res = leading_eigpairs(gram, k, opts, rng);
  SingularResult out;
  out.converged = res.converged;
  out.matvecs = res.matvecs;
  out.entries = res.entries;
  out.iterations = res.iterations;
  for (auto& p : res.pairs) {
    SingularTriplet t;
    t.sigma = std::sqrt(std::max(p.value, 0.0));
    t.left = std::move(p.vector);
    t.right = t.sigma > 0.0 ? Vector(s.transpose() * t.left / t.sigma) : Vector::Zero(s.cols());
    t.residual = p.residual;
    out.triplets.push_back(std::move(t));
  }
  return out;
}

// Same triplets from a dense eigensolve of the s x s matrix S^T S. Cheaper than
// Lanczos when s is small next to the row count.
inline SingularResult leading_singular_dense(const DenseMatrix& s, Index k) {
  require(k >= 1 && k <= std::min(s.rows(), s.cols()), "leading_singular: need 1 <= k <= min(m, s)");
  const DenseMatrix gram = s.transpose() * s;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram);
  SingularResult out;
  out.converged = true;
  const Index c = gram.rows();
  for (Index i = 0; i < k; ++i) {
    const double lam = std::max(es.eigenvalues()[c - 1 - i], 0.0);
    SingularTriplet t;
    t.sigma = std::sqrt(lam);
    t.right = es.eigenvectors().col(c - 1 - i);
    if (t.sigma > 0.0) {
      t.left = s * t.right;
      t.left.normalize();
      t.residual = (s * (s.transpose() * t.left) - lam * t.left).norm();
    } else {
      t.left = Vector::Zero(s.rows());
      t.right.setZero();
    }
    out.triplets.push_back(std::move(t));
  }
  return out;
}

// Dense S^T S route when a rough timing model says it beats Lanczos.
inline SingularResult leading_singular_auto(const DenseMatrix& s, Index k, double tol, RngStream& rng,
                                            bool verify_multiplicity = true) {
  const double m = static_cast<double>(s.rows()), c = static_cast<double>(s.cols());
  const double dense = 10.0 * c * c * c + m * c * c;
  const double krylov = (k > 1 ? 3.0 : 1.0) * (7.5e5 + 45.0 * m * c);
  if (dense <= krylov) return leading_singular_dense(s, k);
  return leading_singular(s, k, tol, rng, verify_multiplicity);
}

// ||X||_2 of a general matrix (Gram route) to relative tolerance tol.
inline double spectral_norm(const DenseMatrix& x, double tol = 1e-10, std::uint64_t seed = 0x6e6f726d) {
  if (x.size() == 0) return 0.0;
  RngStream rng(seed);
  // Run on the smaller Gram matrix.
  const bool wide = x.cols() >= x.rows();
  const DenseMatrix xt = wide ? DenseMatrix() : DenseMatrix(x.transpose());
  GramOperator gram(wide ? x : xt);
  EigOptions opts;
  opts.tol = tol;
  EigResult res = leading_eigpairs(gram, 1, opts, rng);
  return std::sqrt(std::max(res.pairs.front().value, 0.0));
}

// ||X||_2 = max |lambda| for symmetric X.
inline double spectral_norm(const SymMatrix& x, double tol = 1e-10, std::uint64_t seed = 0x6e6f726d) {
  if (x.dim() == 0) return 0.0;
  RngStream rng(seed);
  DenseSymOperator op(x);
  EigOptions opts;
  opts.tol = tol;
  opts.which = Which::largest_magnitude;
  EigResult res = leading_eigpairs(op, 1, opts, rng);
  return std::abs(res.pairs.front().value);
}

}  // namespace specsub
