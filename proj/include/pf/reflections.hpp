#pragma once

#include <span>
#include <string>
#include <vector>

#include "pf/geometry.hpp"

namespace pf {

struct ReflectionConstraint {
  Point2 scene_point;
  Point2 reflection_point;
  std::string label;

  friend bool operator==(const ReflectionConstraint&, const ReflectionConstraint&) = default;
};

struct MirrorConsistencyResult {
  // Image of the mirror-normal direction.
  ProjectivePoint intersection;
  PointClass classification = PointClass::finite;
  double rms_residual = 0.0;
  ConsistencyVerdict verdict;
  std::vector<double> per_constraint_residuals;
  double condition_number = 1.0;
  // Two pairs always meet somewhere.
  bool weakly_constrained = false;

  friend bool operator==(const MirrorConsistencyResult&,
                         const MirrorConsistencyResult&) = default;
};

/// Lines joining scene points to their reflections must share one image
/// intersection. Full lines are used; there is no ray-side condition.
MirrorConsistencyResult analyze_reflections(std::span<const ReflectionConstraint> constraints,
                                            double tolerance = kDefaultTolerancePx);

}  // namespace pf
