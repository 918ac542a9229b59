#include "pf/scene.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Geometry>

#include "pf/canonical_json.hpp"
#include "pf/errors.hpp"

namespace pf {

namespace {

using Eigen::Vector3d;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr int kMaxPlacementAttempts = 200;
// Scene content must sit this far in front of the camera (world units).
constexpr double kMinSceneDepth = 0.3;
// Minimum image length of an annotated pair or segment.
constexpr double kMinImageLength = 3.0;

Vector3d horizontal(const Vector3d& v) {
  Vector3d h(v.x(), 0.0, v.z());
  return h.normalized();
}

Vector3d rotate_about_y(const Vector3d& v, double radians) {
  return Eigen::AngleAxisd(radians, Vector3d::UnitY()) * v;
}

Json projective_json(const ProjectivePoint& p) { return Json::array({p.hx(), p.hy(), p.hw()}); }

// Local axes on the ground around the point the optical axis hits.
struct GroundFrame {
  Vector3d center;   // on y = 0
  Vector3d forward;  // horizontal
  Vector3d right;    // horizontal, camera x
  double distance;   // camera to center along the ground
};

GroundFrame ground_frame(const CameraModel& camera) {
  const Vector3d forward_axis = camera.orientation.row(2).transpose();
  const Vector3d right_axis = camera.orientation.row(0).transpose();
  const double height = camera.position.y();
  const double tan_pitch = -forward_axis.y() / std::hypot(forward_axis.x(), forward_axis.z());
  const double dist = height / tan_pitch;
  const Vector3d fwd = horizontal(forward_axis);
  Vector3d base = camera.position;
  base.y() = 0.0;
  return {base + dist * fwd, fwd, horizontal(right_axis), dist};
}

bool in_front(const CameraModel& camera, const ScenePoint& p) {
  return camera.to_camera(p).z() > kMinSceneDepth;
}

// Top corners on the diagonal of a box resting on the ground, axes `u`, `v`.
std::array<ScenePoint, 2> box_top_corners(const ScenePoint& base_center, const Vector3d& u,
                                          const Vector3d& v, double size) {
  const Vector3d up = size * Vector3d::UnitY();
  const double h = 0.5 * size;
  return {base_center + up - h * u - h * v, base_center + up + h * u + h * v};
}

Point2 shifted_perpendicular(Point2 anchor, Point2 moving, double shift) {
  const Point2 d = moving - anchor;
  return moving + shift * (perp(d) / norm(d));
}

void add_noise(AnnotationDocument& doc, SceneRng& rng, double sigma) {
  if (sigma <= 0.0) return;
  auto jitter = [&](Point2& p) {
    p.x += sigma * rng.normal();
    p.y += sigma * rng.normal();
  };
  for (auto& g : doc.line_groups) {
    for (auto& s : g.segments) {
      jitter(s.p);
      jitter(s.q);
    }
  }
  for (auto& c : doc.shadow_pairs) {
    jitter(c.object_point);
    jitter(c.shadow_point);
  }
  for (auto& c : doc.reflection_pairs) {
    jitter(c.scene_point);
    jitter(c.reflection_point);
  }
}

LineSegment project_segment(const CameraModel& camera, const ScenePoint& a, const ScenePoint& b) {
  if (!in_front(camera, a) || !in_front(camera, b)) {
    throw InvalidSceneSpec("scene segment is not in front of the camera");
  }
  return {project(camera, a), project(camera, b)};
}

// Retries a randomized placement until it is valid.
template <typename Attempt>
auto place(const char* what, Attempt&& attempt) {
  for (int i = 0; i < kMaxPlacementAttempts; ++i) {
    if (auto result = attempt()) return *result;
  }
  throw InvalidSceneSpec(std::string("could not place ") + what + " in front of the camera");
}

double signed_unit(SceneRng& rng) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }

void generate_tiled_floor(const SceneSpec& spec, SceneRng& rng, SyntheticScene& scene) {
  const double yaw = signed_unit(rng) * rng.uniform(25.0, 65.0);
  const double pitch = rng.uniform(12.0, 30.0);
  const double height = rng.uniform(1.4, 1.8);
  scene.camera = ground_camera(spec.focal_length, spec.image_size, height, yaw, pitch);
  const auto& cam = scene.camera;
  const GroundFrame g = ground_frame(cam);
  const double extent = 0.35 * g.distance;

  const Vector3d ex = Vector3d::UnitX();
  const Vector3d ez = Vector3d::UnitZ();
  auto& doc = scene.annotations;

  LineGroup tile_x{"tile-x", {}, "floor", GroupRole::reference, ""};
  LineGroup tile_z{"tile-z", {}, "floor", GroupRole::reference, ""};
  constexpr int kTileLines = 5;
  for (int k = 0; k < kTileLines; ++k) {
    const double offset = extent * (-1.0 + 2.0 * k / (kTileLines - 1));
    tile_x.segments.push_back(project_segment(cam, g.center + offset * ez - extent * ex,
                                              g.center + offset * ez + extent * ex));
    tile_z.segments.push_back(project_segment(cam, g.center + offset * ex - extent * ez,
                                              g.center + offset * ex + extent * ez));
  }

  // A box aligned with the tiles: its edges lie on the floor and on the
  // parallel plane of its top face.
  const double size = rng.uniform(0.3, 0.5) * extent;
  const Vector3d box = g.center + rng.uniform(-0.2, 0.2) * extent * ex +
                       rng.uniform(-0.2, 0.2) * extent * ez;
  LineGroup box_x{"box-x", {}, "floor", GroupRole::reference, "tile-x"};
  LineGroup box_z{"box-z", {}, "floor", GroupRole::reference, "tile-z"};
  const double h = 0.5 * size;
  for (double y : {0.0, size}) {
    for (double s : {-h, h}) {
      const Vector3d lift(0.0, y, 0.0);
      box_x.segments.push_back(project_segment(cam, box + lift + s * ez - h * ex,
                                               box + lift + s * ez + h * ex));
      box_z.segments.push_back(project_segment(cam, box + lift + s * ex - h * ez,
                                               box + lift + s * ex + h * ez));
    }
  }

  // Counter-top edges nominally parallel to the x tiles. The injected
  // misalignment turns them out of the floor plane, which moves their
  // vanishing point off both the tile vanishing point and the horizon.
  const Vector3d counter_dir =
      Eigen::AngleAxisd(spec.inject_yaw_deg * kDegToRad, ez) * ex;
  const double counter_height = rng.uniform(0.8, 1.0);
  const Vector3d counter_start = g.center + Vector3d(0.0, counter_height, 0.0) -
                                 0.5 * extent * ex + 0.6 * extent * ez;
  LineGroup counter{"counter", {}, "floor", GroupRole::test, "tile-x"};
  // Edges stacked down the counter's front face. The face lies in a plane
  // z = const away from the camera, so their images never coincide.
  for (int k = 0; k < 3; ++k) {
    const Vector3d start = counter_start - (0.35 * k * counter_height) * Vector3d::UnitY();
    counter.segments.push_back(project_segment(cam, start, start + extent * counter_dir));
  }

  doc.line_groups = {tile_x, tile_z, box_x, box_z, counter};

  auto& truth = scene.ground_truth;
  truth.vanishing_points["tile-x"] = vanishing_point_of_direction(cam, ex);
  truth.vanishing_points["box-x"] = truth.vanishing_points["tile-x"];
  truth.vanishing_points["tile-z"] = vanishing_point_of_direction(cam, ez);
  truth.vanishing_points["box-z"] = truth.vanishing_points["tile-z"];
  truth.vanishing_points["counter"] = vanishing_point_of_direction(cam, counter_dir);
  truth.vanishing_line = vanishing_line_of_plane(cam, Vector3d::UnitY());
  if (spec.inject_yaw_deg != 0.0) truth.injected.push_back("counter");
}

struct PairPoints {
  ScenePoint first;
  ScenePoint second;
};

void generate_cubes_shadows(const SceneSpec& spec, SceneRng& rng, SyntheticScene& scene) {
  const double yaw = rng.uniform(-20.0, 20.0);
  const double pitch = rng.uniform(10.0, 25.0);
  const double height = rng.uniform(1.4, 1.8);
  scene.camera = ground_camera(spec.focal_length, spec.image_size, height, yaw, pitch);
  const auto& cam = scene.camera;
  const GroundFrame g = ground_frame(cam);

  LightPlacement placement = spec.light;
  if (placement == LightPlacement::random) {
    const double u = rng.uniform();
    placement = u < 1.0 / 3.0   ? LightPlacement::front
                : u < 2.0 / 3.0 ? LightPlacement::behind
                                : LightPlacement::overhead;
  }

  const Plane ground{};
  const Vector3d optical_axis = cam.orientation.row(2).transpose();

  struct Placement {
    PointLight light;
    std::vector<PairPoints> pairs;
  };
  const Placement placed = place("cubes and light", [&]() -> std::optional<Placement> {
    Placement p;
    switch (placement) {
      case LightPlacement::front:
        p.light = {PointLight::Kind::positional,
                   g.center + rng.uniform(2.0, 10.0) * g.forward +
                       rng.uniform(-4.0, 4.0) * g.right +
                       Vector3d(0.0, rng.uniform(3.0, 7.0), 0.0)};
        if (cam.to_camera(p.light.vector).z() <= kMinSceneDepth) return std::nullopt;
        break;
      case LightPlacement::behind: {
        Vector3d at = cam.position - rng.uniform(1.0, 6.0) * g.forward +
                      rng.uniform(-4.0, 4.0) * g.right;
        at.y() = rng.uniform(3.0, 7.0);
        p.light = {PointLight::Kind::positional, at};
        if (cam.to_camera(at).z() >= -kMinSceneDepth) return std::nullopt;
        break;
      }
      default: {
        // Source direction perpendicular to the optical axis, tilted upward.
        const Vector3d up = Vector3d::UnitY();
        const Vector3d up_in_plane = (up - up.dot(optical_axis) * optical_axis).normalized();
        const double alpha = rng.uniform(-40.0, 40.0) * kDegToRad;
        const Vector3d toward_source =
            (std::cos(alpha) * up_in_plane + std::sin(alpha) * g.right).normalized();
        p.light = {PointLight::Kind::directional, -toward_source};
        break;
      }
    }

    const double spread = 0.25 * g.distance;
    for (int i = 0; i < 3; ++i) {
      const double size = rng.uniform(0.3, 0.6);
      const Vector3d base = g.center + ((i - 1) * spread + rng.uniform(-0.1, 0.1) * spread) * g.right +
                            rng.uniform(-0.2, 0.2) * g.distance * g.forward;
      for (const auto& corner : box_top_corners(base, g.right, g.forward, size)) {
        if (p.light.kind == PointLight::Kind::positional && p.light.vector.y() < size + 0.5) {
          return std::nullopt;
        }
        const ScenePoint shadow = cast_shadow_point(p.light, corner, ground);
        if (!in_front(cam, corner) || !in_front(cam, shadow)) return std::nullopt;
        if (distance(project(cam, corner), project(cam, shadow)) < kMinImageLength) {
          return std::nullopt;
        }
        p.pairs.push_back({corner, shadow});
      }
    }
    return p;
  });

  auto& doc = scene.annotations;
  for (std::size_t i = 0; i < placed.pairs.size(); ++i) {
    const std::string label =
        "cube" + std::to_string(i / 2 + 1) + (i % 2 == 0 ? "-a" : "-b");
    doc.shadow_pairs.push_back(
        {project(cam, placed.pairs[i].first), project(cam, placed.pairs[i].second), label});
  }
  if (spec.inject_shift_px != 0.0) {
    auto& c = doc.shadow_pairs.front();
    c.shadow_point = shifted_perpendicular(c.object_point, c.shadow_point, spec.inject_shift_px);
    scene.ground_truth.injected.push_back(c.label);
  }

  scene.light = placed.light;
  auto& truth = scene.ground_truth;
  if (placed.light.kind == PointLight::Kind::positional) {
    truth.light_projection = project_homogeneous(cam, placed.light.vector);
    truth.light_hypothesis = cam.to_camera(placed.light.vector).z() > 0.0
                                 ? LightHypothesis::front_of_camera
                                 : LightHypothesis::behind_camera;
  } else {
    const Vector3d toward_source = -placed.light.vector;
    truth.light_projection = vanishing_point_of_direction(cam, toward_source);
    if (truth.light_projection->is_at_infinity()) {
      truth.light_hypothesis = LightHypothesis::at_infinity;
    } else {
      truth.light_hypothesis = cam.to_camera(cam.position + toward_source).z() > 0.0
                                   ? LightHypothesis::front_of_camera
                                   : LightHypothesis::behind_camera;
    }
  }
}

void generate_mirror_boxes(const SceneSpec& spec, SceneRng& rng, SyntheticScene& scene) {
  const double yaw = rng.uniform(-15.0, 15.0);
  const double pitch = rng.uniform(5.0, 20.0);
  const double height = rng.uniform(1.4, 1.8);
  scene.camera = ground_camera(spec.focal_length, spec.image_size, height, yaw, pitch);
  const auto& cam = scene.camera;
  const GroundFrame g = ground_frame(cam);

  Vector3d base = cam.position;
  base.y() = 0.0;

  struct Placement {
    MirrorPlane mirror;
    std::vector<PairPoints> pairs;
  };
  const Placement placed = place("boxes and mirror", [&]() -> std::optional<Placement> {
    Placement p;
    const double turn = signed_unit(rng) * rng.uniform(20.0, 55.0) * kDegToRad;
    p.mirror.normal = rotate_about_y(-g.forward, turn);
    p.mirror.origin = base + rng.uniform(6.0, 9.0) * g.forward;
    const Vector3d tangent = p.mirror.normal.cross(Vector3d::UnitY()).normalized();
    for (int i = 0; i < 3; ++i) {
      const double size = rng.uniform(0.3, 0.6);
      const Vector3d center = p.mirror.origin + rng.uniform(1.0, 2.5) * p.mirror.normal +
                              rng.uniform(-1.5, 1.5) * tangent;
      for (const auto& corner : box_top_corners(center, tangent, p.mirror.normal, size)) {
        const ScenePoint image = reflect_point(p.mirror, corner);
        if (!in_front(cam, corner) || !in_front(cam, image)) return std::nullopt;
        if (distance(project(cam, corner), project(cam, image)) < kMinImageLength) {
          return std::nullopt;
        }
        p.pairs.push_back({corner, image});
      }
    }
    // A pencil this narrow reads as parallel lines, so its finite
    // intersection would not be recoverable from the image.
    std::vector<LineSegment> lines;
    for (const auto& [corner, image] : p.pairs) {
      lines.push_back({project(cam, corner), project(cam, image)});
    }
    if (mutually_parallel(lines, 4.0 * kDefaultAngleToleranceDeg)) return std::nullopt;
    return p;
  });

  auto& doc = scene.annotations;
  for (std::size_t i = 0; i < placed.pairs.size(); ++i) {
    const std::string label = "box" + std::to_string(i / 2 + 1) + (i % 2 == 0 ? "-a" : "-b");
    doc.reflection_pairs.push_back(
        {project(cam, placed.pairs[i].first), project(cam, placed.pairs[i].second), label});
  }
  if (spec.inject_shift_px != 0.0) {
    auto& c = doc.reflection_pairs.front();
    c.reflection_point =
        shifted_perpendicular(c.scene_point, c.reflection_point, spec.inject_shift_px);
    scene.ground_truth.injected.push_back(c.label);
  }
  scene.mirror = placed.mirror;
  scene.ground_truth.mirror_vanishing_point =
      vanishing_point_of_direction(cam, placed.mirror.normal);
}

}  // namespace

CameraModel CameraModel::look_at(double focal_length, ImageSize image_size,
                                 const ScenePoint& position, const ScenePoint& target,
                                 const Eigen::Vector3d& up) {
  const Vector3d z = (target - position).normalized();
  const Vector3d x_raw = z.cross(up);
  if (!(x_raw.norm() > 1e-12)) throw InvalidSceneSpec("viewing direction parallel to up");
  const Vector3d x = x_raw.normalized();
  const Vector3d y = z.cross(x);
  CameraModel cam;
  cam.focal_length = focal_length;
  cam.image_size = image_size;
  cam.principal_point = {0.5 * image_size.width, 0.5 * image_size.height};
  cam.position = position;
  cam.orientation.row(0) = x.transpose();
  cam.orientation.row(1) = y.transpose();
  cam.orientation.row(2) = z.transpose();
  cam.validate();
  return cam;
}

void CameraModel::validate() const {
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) {
    throw InvalidSceneSpec("focal length must be positive");
  }
  const double ortho = (orientation * orientation.transpose() - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho <= 1e-9) || !(std::abs(orientation.determinant() - 1.0) <= 1e-9)) {
    throw InvalidSceneSpec("camera orientation must be a rotation");
  }
}

CameraModel ground_camera(double focal_length, ImageSize image_size, double height,
                          double yaw_deg, double pitch_deg) {
  const double yaw = yaw_deg * kDegToRad;
  const double pitch = pitch_deg * kDegToRad;
  const Vector3d forward(std::sin(yaw) * std::cos(pitch), -std::sin(pitch),
                         std::cos(yaw) * std::cos(pitch));
  const ScenePoint position(0.0, height, 0.0);
  return CameraModel::look_at(focal_length, image_size, position, position + forward);
}

Point2 project(const CameraModel& camera, const ScenePoint& p) {
  const Vector3d c = camera.to_camera(p);
  if (!(c.z() > kMinDepth)) throw BehindCamera("point is not in front of the camera");
  return {camera.focal_length * c.x() / c.z() + camera.principal_point.x,
          camera.focal_length * c.y() / c.z() + camera.principal_point.y};
}

ProjectivePoint project_homogeneous(const CameraModel& camera, const ScenePoint& p) {
  const Vector3d c = camera.to_camera(p);
  const double f = camera.focal_length;
  const auto pp = camera.principal_point;
  return {f * c.x() + pp.x * c.z(), f * c.y() + pp.y * c.z(), c.z()};
}

ProjectivePoint vanishing_point_of_direction(const CameraModel& camera,
                                             const Eigen::Vector3d& direction) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateDirection("zero direction");
  const Vector3d d = camera.orientation * (direction / n);
  if (std::abs(d.z()) <= kMinDepth) return ProjectivePoint::at_infinity({d.x(), d.y()});
  return ProjectivePoint::finite(
      {camera.focal_length * d.x() / d.z() + camera.principal_point.x,
       camera.focal_length * d.y() / d.z() + camera.principal_point.y});
}

HomogeneousLine vanishing_line_of_plane(const CameraModel& camera,
                                        const Eigen::Vector3d& normal) {
  const Vector3d n = camera.orientation * normal.normalized();
  if (std::hypot(n.x(), n.y()) <= kMinDepth) {
    throw DegenerateDirection("plane is parallel to the image plane");
  }
  const auto pp = camera.principal_point;
  return canonical_line({n.x(), n.y()},
                        camera.focal_length * n.z() - n.x() * pp.x - n.y() * pp.y);
}

ScenePoint cast_shadow_point(const PointLight& light, const ScenePoint& p, const Plane& ground) {
  Vector3d ray;
  if (light.kind == PointLight::Kind::positional) {
    ray = p - light.vector;
    if (!(ray.norm() > 0.0)) throw DegenerateLight("point coincides with the light");
  } else {
    ray = light.vector;
    if (!(ray.norm() > 0.0)) throw DegenerateLight("directional light has zero direction");
  }
  const double denom = ray.dot(ground.normal);
  if (std::abs(denom) <= 1e-12 * ray.norm()) throw NoShadow("light ray parallel to ground");
  return p + ((ground.origin - p).dot(ground.normal) / denom) * ray;
}

ScenePoint reflect_point(const MirrorPlane& mirror, const ScenePoint& p) {
  return p - 2.0 * (p - mirror.origin).dot(mirror.normal) * mirror.normal;
}

double SceneRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SceneRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

const char* to_string(SceneTemplate t) {
  switch (t) {
    case SceneTemplate::tiled_floor: return "tiled-floor";
    case SceneTemplate::cubes_shadows: return "cubes-shadows";
    case SceneTemplate::mirror_boxes: return "mirror-boxes";
  }
  return "tiled-floor";
}

SceneTemplate scene_template_from_string(const std::string& s) {
  if (s == "tiled-floor") return SceneTemplate::tiled_floor;
  if (s == "cubes-shadows") return SceneTemplate::cubes_shadows;
  if (s == "mirror-boxes") return SceneTemplate::mirror_boxes;
  throw InvalidSceneSpec("unknown scene template '" + s + "'");
}

const char* to_string(LightPlacement p) {
  switch (p) {
    case LightPlacement::random: return "random";
    case LightPlacement::front: return "front";
    case LightPlacement::behind: return "behind";
    case LightPlacement::overhead: return "overhead";
  }
  return "random";
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw InvalidSceneSpec("noise sigma must be a non-negative number");
  }
  if (!std::isfinite(spec.inject_yaw_deg) || std::abs(spec.inject_yaw_deg) >= 45.0) {
    throw InvalidSceneSpec("injected yaw must lie in (-45, 45) degrees");
  }
  if (!std::isfinite(spec.inject_shift_px)) {
    throw InvalidSceneSpec("injected shift must be finite");
  }
  if (spec.image_size.width <= 0 || spec.image_size.height <= 0) {
    throw InvalidSceneSpec("image size must be positive");
  }

  SyntheticScene scene;
  scene.spec = spec;
  SceneRng rng(spec.seed);
  switch (spec.scene_template) {
    case SceneTemplate::tiled_floor: generate_tiled_floor(spec, rng, scene); break;
    case SceneTemplate::cubes_shadows: generate_cubes_shadows(spec, rng, scene); break;
    case SceneTemplate::mirror_boxes: generate_mirror_boxes(spec, rng, scene); break;
  }
  auto& doc = scene.annotations;
  doc.image_ref = std::string("synthetic:") + to_string(spec.scene_template) + "/seed-" +
                  std::to_string(spec.seed);
  doc.image_size = spec.image_size;

  // Noise is drawn after all geometry so it never moves the ground truth.
  SceneRng noise_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  add_noise(doc, noise_rng, spec.noise_sigma);
  validate_annotations(doc);
  return scene;
}

std::string serialize_ground_truth(const SyntheticScene& scene) {
  const auto& spec = scene.spec;
  const auto& cam = scene.camera;
  const auto& truth = scene.ground_truth;

  Json generator = {{"template", to_string(spec.scene_template)},
                    {"seed", spec.seed},
                    {"noise_sigma", spec.noise_sigma},
                    {"inject_yaw_deg", spec.inject_yaw_deg},
                    {"inject_shift_px", spec.inject_shift_px},
                    {"rng", scene.rng_algorithm}};
  if (spec.scene_template == SceneTemplate::cubes_shadows) {
    generator["light_placement"] = to_string(spec.light);
  }

  Json orientation = Json::array();
  for (int r = 0; r < 3; ++r) {
    orientation.push_back(
        {cam.orientation(r, 0), cam.orientation(r, 1), cam.orientation(r, 2)});
  }
  Json camera = {{"focal_length", cam.focal_length},
                 {"principal_point", {cam.principal_point.x, cam.principal_point.y}},
                 {"orientation", orientation},
                 {"position", {cam.position.x(), cam.position.y(), cam.position.z()}},
                 {"image_size", {{"width", cam.image_size.width},
                                 {"height", cam.image_size.height}}}};

  Json vps = Json::object();
  for (const auto& [id, vp] : truth.vanishing_points) vps[id] = projective_json(vp);

  Json j = {{"schema_version", kSchemaVersion},
            {"generator", generator},
            {"camera", camera},
            {"vanishing_points", vps},
            {"injected", truth.injected}};
  j["vanishing_line"] = truth.vanishing_line
                            ? Json::array({truth.vanishing_line->a, truth.vanishing_line->b,
                                           truth.vanishing_line->c})
                            : Json();
  j["light_projection"] =
      truth.light_projection ? projective_json(*truth.light_projection) : Json();
  j["light_hypothesis"] =
      truth.light_hypothesis ? Json(to_string(*truth.light_hypothesis)) : Json();
  j["mirror_vanishing_point"] =
      truth.mirror_vanishing_point ? projective_json(*truth.mirror_vanishing_point) : Json();
  return write_canonical(j, NumberFormat::exact);
}

std::vector<LineSegment> generate_line_family(const CameraModel& camera,
                                              const Eigen::Vector3d& direction,
                                              std::size_t count, SceneRng& rng,
                                              double noise_sigma) {
  if (!(direction.norm() > 0.0)) throw DegenerateDirection("zero direction");
  const Vector3d d = direction.normalized();
  const Vector3d right = camera.orientation.row(0).transpose();
  const Vector3d down = camera.orientation.row(1).transpose();
  const Vector3d forward = camera.orientation.row(2).transpose();

  std::vector<LineSegment> lines;
  while (lines.size() < count) {
    const LineSegment seg = place("line family member", [&]() -> std::optional<LineSegment> {
      const ScenePoint a = camera.position + rng.uniform(3.0, 15.0) * forward +
                           rng.uniform(-3.0, 3.0) * right + rng.uniform(-2.0, 2.0) * down;
      const ScenePoint b = a + rng.uniform(2.0, 6.0) * d;
      if (!in_front(camera, a) || !in_front(camera, b)) return std::nullopt;
      LineSegment s{project(camera, a), project(camera, b)};
      if (s.length() < 5.0 * kMinImageLength) return std::nullopt;
      return s;
    });
    lines.push_back(seg);
  }
  if (noise_sigma > 0.0) {
    for (auto& s : lines) {
      s.p.x += noise_sigma * rng.normal();
      s.p.y += noise_sigma * rng.normal();
      s.q.x += noise_sigma * rng.normal();
      s.q.y += noise_sigma * rng.normal();
    }
  }
  return lines;
}

}  // namespace pf
