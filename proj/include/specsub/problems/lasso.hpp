#pragma once

#include <memory>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/problems/instance.hpp"

namespace specsub {

struct LassoInstance {
  Vector design;    // diagonal of the design matrix
  Vector response;
  double sigma = 0.0;
};

// minimize ||y||_1 subject to ||diag(d) y - r||_2 <= sigma, posed as the trace
// norm of diag(y) over an ellipsoid.
inline ProblemInstance build_lasso(const Vector& design, const Vector& response, double sigma) {
  require(design.size() == response.size() && design.size() > 0, "lasso: design and response sizes differ");
  require(design.minCoeff() > 0.0, "lasso: design entries must be positive");
  const Index n = design.size();
  ProblemInstance inst;
  inst.problem.family = std::make_shared<DiagonalBasis>(n);
  inst.problem.C = SymMatrix::zero(n);
  inst.problem.b = Vector::Zero(n);
  inst.problem.kind = ObjectiveKind::trace;
  inst.problem.k = n;
  inst.problem.name = "lasso";
  inst.geometry = std::make_shared<EllipsoidGeometry>(design, response, sigma);
  return inst;
}

inline ProblemInstance build_lasso(const LassoInstance& l) { return build_lasso(l.design, l.response, l.sigma); }

}  // namespace specsub
