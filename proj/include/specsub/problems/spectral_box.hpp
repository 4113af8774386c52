#pragma once

#include <memory>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/problems/instance.hpp"

namespace specsub {

struct SpectralBoxInstance {
  SymMatrix A;
  double rho = 0.0;
};

// minimize ||A + U||_2 subject to |U_ij| <= rho, U symmetric, one variable per
// upper-triangle entry.
inline ProblemInstance build_spectral_box(const SymMatrix& a, double rho) {
  require(rho > 0.0, "spectral box: rho must be positive");
  const Index n = a.dim();
  ProblemInstance inst;
  auto fam = std::make_shared<SymmetricUnitBasis>(n, SymmetricUnitBasis::all_cells(n));
  inst.problem.family = fam;
  inst.problem.C = a;
  inst.problem.b = Vector::Zero(fam->size());
  inst.problem.kind = ObjectiveKind::spectral;
  inst.problem.k = 1;
  inst.problem.name = "spectral-box";
  inst.geometry = std::make_shared<BoxGeometry>(fam->size(), rho);
  return inst;
}

inline ProblemInstance build_spectral_box(const SpectralBoxInstance& s) { return build_spectral_box(s.A, s.rho); }

// U = unvec(y), symmetric.
inline SymMatrix box_perturbation(const ProblemInstance& inst, const Vector& y) {
  DenseMatrix u = DenseMatrix::Zero(inst.problem.n(), inst.problem.n());
  inst.problem.family->accumulate(y, u);
  return SymMatrix(std::move(u));
}

}  // namespace specsub
