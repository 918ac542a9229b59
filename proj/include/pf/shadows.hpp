#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pf/geometry.hpp"

namespace pf {

/// Ray-side slack on the shadow->object parameter (shadow at 0, object at 1).
inline constexpr double kRaySideSlack = 0.02;

struct ShadowConstraint {
  Point2 object_point;
  Point2 shadow_point;
  std::string label;

  friend bool operator==(const ShadowConstraint&, const ShadowConstraint&) = default;
};

enum class LightHypothesis { front_of_camera, behind_camera, at_infinity };

const char* to_string(LightHypothesis h);
LightHypothesis light_hypothesis_from_string(const std::string& s);

struct HypothesisDetail {
  LightHypothesis hypothesis = LightHypothesis::front_of_camera;
  bool admissible = false;
  double rms_residual = 0.0;
  std::size_t side_violations = 0;

  friend bool operator==(const HypothesisDetail&, const HypothesisDetail&) = default;
};

struct LightSourceEstimate {
  LightHypothesis hypothesis = LightHypothesis::front_of_camera;
  ProjectivePoint light_projection;
  double rms_residual = 0.0;
  std::size_t side_violations = 0;
  ConsistencyVerdict verdict;
  std::vector<double> per_constraint_residuals;
  double condition_number = 1.0;
  // Front, behind, at-infinity; always all three.
  std::vector<HypothesisDetail> per_hypothesis_detail;
  // "upper" or "lower" half of the image (raster rows grow downward);
  // empty when the light projection is at infinity or no height is known.
  std::string image_half;

  friend bool operator==(const LightSourceEstimate&, const LightSourceEstimate&) = default;
};

/// Infinite line through the shadow point and the object point.
LineNormalForm constraint_line(const ShadowConstraint& c);

/// Tests the constraints against the three light-position hypotheses and
/// returns the best admissible one. Front-of-camera needs the common
/// intersection beyond every object on its shadow->object ray; behind-camera
/// needs it beyond every shadow on the object->shadow ray; at-infinity needs
/// mutually parallel constraints that all point the same way.
LightSourceEstimate analyze_shadows(std::span<const ShadowConstraint> constraints,
                                    double tolerance = kDefaultTolerancePx,
                                    std::optional<double> image_height = std::nullopt);

}  // namespace pf
