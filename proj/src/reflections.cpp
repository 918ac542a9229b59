#include "pf/reflections.hpp"

#include "pf/errors.hpp"

namespace pf {

MirrorConsistencyResult analyze_reflections(std::span<const ReflectionConstraint> constraints,
                                            double tolerance) {
  if (constraints.size() < 2) throw InsufficientConstraints(constraints.size(), 2);

  std::vector<LineSegment> lines;
  lines.reserve(constraints.size());
  for (const auto& c : constraints) {
    if (!(distance(c.scene_point, c.reflection_point) > kSegmentEpsilon)) {
      throw DegenerateConstraint("reflection constraint '" + c.label +
                                 "': scene and reflection points coincide");
    }
    lines.push_back({c.scene_point, c.reflection_point});
  }

  const auto estimate = estimate_vanishing_point(lines);

  MirrorConsistencyResult r;
  r.condition_number = estimate.condition_number;
  r.weakly_constrained = lines.size() == 2;

  if (estimate.classification != PointClass::at_infinity && lines.size() > 2 &&
      mutually_parallel(lines)) {
    const Point2 dir = dominant_direction(lines);
    r.intersection = ProjectivePoint::at_infinity(dir);
    r.classification = PointClass::at_infinity;
    for (const auto& l : lines) r.per_constraint_residuals.push_back(direction_residual(l, dir));
    r.rms_residual = rms(r.per_constraint_residuals);
  } else {
    r.intersection = estimate.location;
    r.classification = estimate.classification;
    r.per_constraint_residuals = estimate.per_line_residuals;
    r.rms_residual = estimate.rms_residual;
  }

  if (r.classification == PointClass::degenerate) {
    r.verdict = make_indeterminate(tolerance, r.per_constraint_residuals);
  } else {
    r.verdict = make_verdict(r.rms_residual, tolerance, r.per_constraint_residuals);
  }
  if (r.weakly_constrained) r.verdict.metrics["weakly_constrained"] = 1.0;
  return r;
}

}  // namespace pf
