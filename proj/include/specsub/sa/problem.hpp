#pragma once

#include <memory>
#include <string>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"
#include "specsub/sa/family.hpp"

namespace specsub {

enum class ObjectiveKind { spectral, ksum, trace };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::spectral: return "spectral";
    case ObjectiveKind::ksum: return "ksum";
    case ObjectiveKind::trace: return "trace";
  }
  return "?";
}

// minimize  ||sum_j y_j A_j + C||  -  b^T y   over y in Q, where the norm is the
// spectral norm, the sum of the k largest singular values, or the trace norm.
struct AffineSpectralProblem {
  std::shared_ptr<const OperatorFamily> family;
  SymMatrix C;
  Vector b;
  ObjectiveKind kind = ObjectiveKind::spectral;
  Index k = 1;
  std::string name;

  Index n() const { return C.dim(); }
  Index p() const { return family->size(); }

  // Number of singular values in the objective.
  Index terms() const {
    switch (kind) {
      case ObjectiveKind::spectral: return 1;
      case ObjectiveKind::ksum: return std::min(k, n());
      case ObjectiveKind::trace: return n();
    }
    return 1;
  }

  void validate() const {
    require(family != nullptr, "problem: missing operator family");
    require(family->dim() == C.dim(), "problem: operator and C dimensions differ");
    require(b.size() == family->size(), "problem: b has wrong length");
    require(kind != ObjectiveKind::ksum || k >= 1, "problem: k must be >= 1");
  }

  // Writes X(y) = sum_j y_j A_j + C into x.
  void materialize_into(const Vector& y, DenseMatrix& x) const {
    require(y.size() == p(), "materialize: y has wrong length");
    family->assign(C.dense(), y, x);
  }

  SymMatrix materialize(const Vector& y) const {
    DenseMatrix x;
    materialize_into(y, x);
    return SymMatrix(std::move(x));
  }
};

}  // namespace specsub
