#pragma once

#include <memory>

#include "specsub/sa/geometry.hpp"
#include "specsub/sa/problem.hpp"

namespace specsub {

// A problem together with its feasible set.
struct ProblemInstance {
  AffineSpectralProblem problem;
  std::shared_ptr<const ProxGeometry> geometry;

  const ProxGeometry& q() const { return *geometry; }
};

}  // namespace specsub
