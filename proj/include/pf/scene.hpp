#pragma once

// Synthetic pinhole-camera scenes with analytically known vanishing points,
// light projections and mirror-normal vanishing points. This is the ground
// truth the analyses are validated against.
//
// World convention: right-handed, ground plane y = 0 with +y up, camera
// looking toward +z by default. The camera frame is x right, y down, z
// forward, so image rows grow downward.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pf/annotations.hpp"
#include "pf/geometry.hpp"
#include "pf/shadows.hpp"

namespace pf {

using ScenePoint = Eigen::Vector3d;

inline constexpr double kMinDepth = 1e-9;

struct CameraModel {
  double focal_length = 800.0;  // px
  Point2 principal_point{512.0, 384.0};
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();  // world -> camera
  ScenePoint position = ScenePoint::Zero();
  ImageSize image_size{1024, 768};

  /// Camera at `position` looking at `target`; `up` fixes the roll.
  static CameraModel look_at(double focal_length, ImageSize image_size,
                             const ScenePoint& position, const ScenePoint& target,
                             const Eigen::Vector3d& up = Eigen::Vector3d::UnitY());

  Eigen::Vector3d to_camera(const ScenePoint& p) const { return orientation * (p - position); }

  /// Throws InvalidSceneSpec unless f > 0 and the orientation is a rotation.
  void validate() const;
};

struct PointLight {
  enum class Kind { positional, directional };
  Kind kind = Kind::positional;
  // Position for positional lights; direction of travel of the light rays
  // for directional ones.
  Eigen::Vector3d vector = Eigen::Vector3d::Zero();
};

struct Plane {
  ScenePoint origin = ScenePoint::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();  // unit
};

using MirrorPlane = Plane;

/// Pinhole projection (f X/Z, f Y/Z) + principal point, in the camera frame.
Point2 project(const CameraModel& camera, const ScenePoint& p);

/// Projection that also accepts points behind the camera, returned in
/// homogeneous form.
ProjectivePoint project_homogeneous(const CameraModel& camera, const ScenePoint& p);

/// Limit of `project(camera, p + t d)` as t grows.
ProjectivePoint vanishing_point_of_direction(const CameraModel& camera,
                                             const Eigen::Vector3d& direction);

/// Vanishing line of all planes with the given normal.
HomogeneousLine vanishing_line_of_plane(const CameraModel& camera,
                                        const Eigen::Vector3d& normal);

ScenePoint cast_shadow_point(const PointLight& light, const ScenePoint& p, const Plane& ground);

ScenePoint reflect_point(const MirrorPlane& mirror, const ScenePoint& p);

/// Seedable generator with a fixed, documented algorithm so scenes
/// regenerate identically on any standard library: std::mt19937_64, 53-bit
/// uniform doubles from the top bits, Box-Muller normals.
class SceneRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+uniform53+box-muller";

  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // standard normal
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class SceneTemplate { tiled_floor, cubes_shadows, mirror_boxes };
enum class LightPlacement { random, front, behind, overhead };

const char* to_string(SceneTemplate t);
SceneTemplate scene_template_from_string(const std::string& s);  // throws InvalidSceneSpec
const char* to_string(LightPlacement p);

struct SceneSpec {
  SceneTemplate scene_template = SceneTemplate::tiled_floor;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;      // px, isotropic Gaussian on annotation endpoints
  double inject_yaw_deg = 0.0;   // tiled-floor: counter-top edge misalignment
  double inject_shift_px = 0.0;  // cubes-shadows / mirror-boxes: first pair displacement
  LightPlacement light = LightPlacement::random;  // cubes-shadows only
  double focal_length = 800.0;
  ImageSize image_size{1024, 768};
};

struct GroundTruth {
  std::map<std::string, ProjectivePoint> vanishing_points;  // by line-group id
  std::optional<HomogeneousLine> vanishing_line;            // ground plane horizon
  std::optional<ProjectivePoint> light_projection;
  std::optional<LightHypothesis> light_hypothesis;
  std::optional<ProjectivePoint> mirror_vanishing_point;
  std::vector<std::string> injected;  // ids/labels carrying an injected inconsistency
};

struct SyntheticScene {
  SceneSpec spec;
  CameraModel camera;
  AnnotationDocument annotations;
  GroundTruth ground_truth;
  std::string rng_algorithm = SceneRng::kAlgorithm;
  // 3-D data kept for oracle checks.
  std::optional<PointLight> light;
  std::optional<MirrorPlane> mirror;
};

/// Deterministic for a fixed SceneSpec (including seed). Throws InvalidSceneSpec
/// when the parameters put annotated points behind the camera.
SyntheticScene generate_scene(const SceneSpec& spec);

/// Ground-truth sidecar document (canonical JSON).
std::string serialize_ground_truth(const SyntheticScene& scene);

/// Projected segments of `count` parallel scene lines with the given 3-D
/// direction, placed in front of the camera. Used by the recovery tests.
std::vector<LineSegment> generate_line_family(const CameraModel& camera,
                                              const Eigen::Vector3d& direction,
                                              std::size_t count, SceneRng& rng,
                                              double noise_sigma = 0.0);

/// Camera at `height` above the ground plane, turned by `yaw_deg` about
/// the vertical and pitched down by `pitch_deg`.
CameraModel ground_camera(double focal_length, ImageSize image_size, double height,
                          double yaw_deg, double pitch_deg);

}  // namespace pf
