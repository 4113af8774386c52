#pragma once

#include <cmath>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/linalg/rates.hpp"
#include "specsub/sa/geometry.hpp"
#include "specsub/sa/problem.hpp"

namespace specsub {

// M*^2 = 2 ||A||_F^2 / s2 + 2 ||b||^2
inline double m_star_sq(double stacked_frobenius_sq, double b_norm_sq, Index s2) {
  require(s2 >= 1, "m_star: s2 must be >= 1");
  return 2.0 * stacked_frobenius_sq / static_cast<double>(s2) + 2.0 * b_norm_sq;
}

inline double m_star_sq(const AffineSpectralProblem& prob, Index s2) {
  return m_star_sq(prob.family->frobenius_sq(), prob.b.squaredNorm(), s2);
}

// gamma = D / (delta*^2 M*^2) * sqrt(2 / (alpha N))
inline double step_size(double diameter, double delta_star, double m_star_sq_value, double alpha, Index n_iter) {
  require(diameter >= 0.0 && delta_star > 0.0 && m_star_sq_value > 0.0 && alpha > 0.0 && n_iter >= 1,
          "step_size: inputs must be positive");
  return diameter / (delta_star * delta_star * m_star_sq_value) * std::sqrt(2.0 / (alpha * static_cast<double>(n_iter)));
}

inline double step_size(const ProxGeometry& q, double m_star_sq_value, Index n_iter) {
  return step_size(q.diameter(), q.delta_star(), m_star_sq_value, q.alpha(), n_iter);
}

// N = 2 D^2 delta*^2 M*^2 / (alpha eps^2 beta^2)
inline RateResult iteration_budget(double diameter_sq, double delta_star, double m_star_sq_value, double alpha,
                                   double eps, double beta, Index cap = kDefaultRateCap) {
  require(eps > 0.0 && beta > 0.0 && alpha > 0.0, "iteration_budget: eps, beta, alpha must be positive");
  const double v = 2.0 * diameter_sq * delta_star * delta_star * m_star_sq_value / (alpha * eps * eps * beta * beta);
  return detail::finish_rate(v, cap);
}

inline RateResult iteration_budget(const ProxGeometry& q, double m_star_sq_value, double eps, double beta,
                                   Index cap = kDefaultRateCap) {
  return iteration_budget(q.diameter_sq(), q.delta_star(), m_star_sq_value, q.alpha(), eps, beta, cap);
}

// Expected-suboptimality bound after N steps: D delta*^2 M*^2 sqrt(2 / (alpha N)).
inline double expected_gap_bound(const ProxGeometry& q, double m_star_sq_value, Index n_iter) {
  return q.diameter() * q.delta_star() * q.delta_star() * m_star_sq_value *
         std::sqrt(2.0 / (q.alpha() * static_cast<double>(n_iter)));
}

}  // namespace specsub
