#include "pf/shadows.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "pf/errors.hpp"

namespace pf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LineSegment shadow_to_object(const ShadowConstraint& c) {
  if (!(distance(c.object_point, c.shadow_point) > kSegmentEpsilon)) {
    throw DegenerateConstraint("shadow constraint '" + c.label +
                               "': object and shadow points coincide");
  }
  return {c.shadow_point, c.object_point};
}

}  // namespace

const char* to_string(LightHypothesis h) {
  switch (h) {
    case LightHypothesis::front_of_camera: return "front-of-camera";
    case LightHypothesis::behind_camera: return "behind-camera";
    case LightHypothesis::at_infinity: return "at-infinity";
  }
  return "at-infinity";
}

LightHypothesis light_hypothesis_from_string(const std::string& s) {
  if (s == "front-of-camera") return LightHypothesis::front_of_camera;
  if (s == "behind-camera") return LightHypothesis::behind_camera;
  if (s == "at-infinity") return LightHypothesis::at_infinity;
  throw Error("unknown light hypothesis '" + s + "'");
}

LineNormalForm constraint_line(const ShadowConstraint& c) {
  return segment_to_normal_form(shadow_to_object(c));
}

LightSourceEstimate analyze_shadows(std::span<const ShadowConstraint> constraints,
                                    double tolerance, std::optional<double> image_height) {
  if (constraints.size() < 2) throw InsufficientConstraints(constraints.size(), 2);

  std::vector<LineSegment> rays;
  rays.reserve(constraints.size());
  for (const auto& c : constraints) rays.push_back(shadow_to_object(c));
  const std::size_t m = rays.size();

  const auto common = estimate_vanishing_point(rays);

  HypothesisDetail front{LightHypothesis::front_of_camera, false, kInf, m};
  HypothesisDetail behind{LightHypothesis::behind_camera, false, kInf, m};
  if (common.classification == PointClass::finite) {
    const Point2 light = common.location.point();
    front.side_violations = 0;
    behind.side_violations = 0;
    for (const auto& ray : rays) {
      const Point2 d = ray.q - ray.p;
      const double t = dot(light - ray.p, d) / dot(d, d);
      if (t < 1.0 - kRaySideSlack) ++front.side_violations;
      if (t > kRaySideSlack) ++behind.side_violations;
    }
    front.rms_residual = behind.rms_residual = common.rms_residual;
    front.admissible = front.side_violations == 0;
    behind.admissible = behind.side_violations == 0;
  }

  // Parallel bundle: every shadow->object vector must point the same way
  // along the common direction.
  const Point2 direction = dominant_direction(rays);
  HypothesisDetail infinity{LightHypothesis::at_infinity, false, kInf, 0};
  std::vector<double> direction_residuals;
  {
    std::size_t positive = 0;
    for (const auto& ray : rays) {
      direction_residuals.push_back(direction_residual(ray, direction));
      if (dot(ray.q - ray.p, direction) > 0.0) ++positive;
    }
    infinity.side_violations = std::min(positive, m - positive);
    infinity.rms_residual = rms(direction_residuals);
    infinity.admissible = infinity.side_violations == 0 && mutually_parallel(rays);
  }

  // Tie-break: front before behind; at-infinity first when the finite
  // estimate is ill-conditioned.
  const bool prefer_infinity = common.condition_number > kMaxConditionNumber;
  std::array<HypothesisDetail, 3> details{front, behind, infinity};
  auto rank = [&](const HypothesisDetail& h) {
    int priority = static_cast<int>(h.hypothesis);
    if (prefer_infinity && h.hypothesis == LightHypothesis::at_infinity) priority = -1;
    return std::make_tuple(!h.admissible, h.admissible ? 0 : h.side_violations,
                           h.rms_residual, priority);
  };
  const auto best = *std::min_element(details.begin(), details.end(),
                                      [&](const auto& a, const auto& b) { return rank(a) < rank(b); });

  LightSourceEstimate est;
  est.hypothesis = best.hypothesis;
  est.rms_residual = best.rms_residual;
  est.side_violations = best.side_violations;
  est.condition_number = common.condition_number;
  est.per_hypothesis_detail.assign(details.begin(), details.end());

  if (best.hypothesis == LightHypothesis::at_infinity) {
    est.light_projection = ProjectivePoint::at_infinity(direction);
    est.per_constraint_residuals = direction_residuals;
  } else {
    est.light_projection = common.location;
    est.per_constraint_residuals = common.per_line_residuals;
    if (image_height && common.location.is_finite()) {
      est.image_half = common.location.point().y < 0.5 * *image_height ? "upper" : "lower";
    }
  }

  if (common.classification == PointClass::degenerate && !infinity.admissible) {
    est.verdict = make_indeterminate(tolerance, est.per_constraint_residuals);
  } else if (!best.admissible) {
    // No hypothesis anchors the constraints; the residual alone cannot rescue it.
    est.verdict = make_verdict(kInf, tolerance, est.per_constraint_residuals);
  } else {
    est.verdict = make_verdict(best.rms_residual, tolerance, est.per_constraint_residuals);
  }
  est.verdict.metrics["side_violations"] = static_cast<double>(best.side_violations);
  return est;
}

}  // namespace pf
