#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pf/analysis.hpp"
#include "pf/errors.hpp"
#include "pf/overlay.hpp"
#include "pf/scene.hpp"

namespace py = pybind11;

namespace {

using Segment = std::array<double, 4>;
using Pair = std::array<double, 4>;  // first x, y, second x, y

pf::LineSegment to_segment(const Segment& s) { return {{s[0], s[1]}, {s[2], s[3]}}; }

std::vector<pf::LineSegment> to_segments(const std::vector<Segment>& segs) {
  std::vector<pf::LineSegment> out;
  for (const auto& s : segs) out.push_back(to_segment(s));
  return out;
}

std::tuple<double, double, double> to_tuple(const pf::ProjectivePoint& p) {
  return {p.hx(), p.hy(), p.hw()};
}

std::string dump(const pf::Json& j) { return pf::write_canonical(j); }

pf::CameraModel make_camera(double f, std::pair<double, double> pp,
                            const Eigen::Matrix3d& orientation, const Eigen::Vector3d& position) {
  pf::CameraModel cam;
  cam.focal_length = f;
  cam.principal_point = {pp.first, pp.second};
  cam.orientation = orientation;
  cam.position = position;
  cam.validate();
  return cam;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric consistency analysis of annotated images";
  m.attr("__version__") = pf::tool_version();

  auto error = py::register_exception<pf::Error>(m, "Error", PyExc_ValueError);
  py::register_exception<pf::ParseError>(m, "ParseError", error.ptr());
  py::register_exception<pf::SchemaError>(m, "SchemaError", error.ptr());
  py::register_exception<pf::ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<pf::InsufficientConstraints>(m, "InsufficientConstraints", error.ptr());

  m.def(
      "intersect_two_lines",
      [](const Segment& a, const Segment& b) {
        return to_tuple(pf::intersect_two_lines(to_segment(a), to_segment(b)));
      },
      "Homogeneous intersection (hx, hy, hw) of the lines through two segments.");

  m.def(
      "estimate_vanishing_point",
      [](const std::vector<Segment>& segs) {
        return dump(pf::to_json(pf::estimate_vanishing_point(to_segments(segs))));
      },
      py::arg("segments"));

  m.def(
      "fit_vanishing_line",
      [](const std::vector<std::tuple<double, double, double>>& points) {
        std::vector<pf::ProjectivePoint> pts;
        for (const auto& [x, y, w] : points) pts.emplace_back(x, y, w);
        return dump(pf::to_json(pf::fit_vanishing_line(pts)));
      },
      py::arg("points"));

  m.def(
      "analyze_shadows",
      [](const std::vector<Pair>& pairs, double tolerance) {
        std::vector<pf::ShadowConstraint> cs;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto& p = pairs[i];
          cs.push_back({{p[0], p[1]}, {p[2], p[3]}, "pair-" + std::to_string(i)});
        }
        return dump(pf::to_json(pf::analyze_shadows(cs, tolerance)));
      },
      py::arg("pairs"), py::arg("tolerance") = pf::kDefaultTolerancePx,
      "Pairs are (object_x, object_y, shadow_x, shadow_y).");

  m.def(
      "analyze_reflections",
      [](const std::vector<Pair>& pairs, double tolerance) {
        std::vector<pf::ReflectionConstraint> cs;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto& p = pairs[i];
          cs.push_back({{p[0], p[1]}, {p[2], p[3]}, "pair-" + std::to_string(i)});
        }
        return dump(pf::to_json(pf::analyze_reflections(cs, tolerance)));
      },
      py::arg("pairs"), py::arg("tolerance") = pf::kDefaultTolerancePx,
      "Pairs are (scene_x, scene_y, reflection_x, reflection_y).");

  m.def(
      "project",
      [](double f, std::pair<double, double> pp, const Eigen::Matrix3d& orientation,
         const Eigen::Vector3d& position, const Eigen::Vector3d& point) {
        const auto p = pf::project(make_camera(f, pp, orientation, position), point);
        return std::make_pair(p.x, p.y);
      },
      py::arg("focal_length"), py::arg("principal_point"), py::arg("orientation"),
      py::arg("position"), py::arg("point"));

  m.def(
      "vanishing_point_of_direction",
      [](double f, std::pair<double, double> pp, const Eigen::Matrix3d& orientation,
         const Eigen::Vector3d& direction) {
        return to_tuple(pf::vanishing_point_of_direction(
            make_camera(f, pp, orientation, Eigen::Vector3d::Zero()), direction));
      },
      py::arg("focal_length"), py::arg("principal_point"), py::arg("orientation"),
      py::arg("direction"));

  m.def(
      "analyze",
      [](const std::string& document, std::optional<double> tolerance) {
        py::gil_scoped_release release;
        return pf::write_report(pf::analyze_document(pf::parse_annotations(document), tolerance));
      },
      py::arg("document"), py::arg("tolerance_px") = py::none(),
      "Canonical JSON report for an annotation document.");

  m.def(
      "render_overlay",
      [](const std::string& document, std::optional<double> tolerance) {
        py::gil_scoped_release release;
        const auto doc = pf::parse_annotations(document);
        return pf::render_overlay(doc, pf::analyze_document(doc, tolerance));
      },
      py::arg("document"), py::arg("tolerance_px") = py::none());

  m.def(
      "synthesize",
      [](const std::string& scene_template, std::uint64_t seed, double noise_px,
         double inject_yaw_deg, double inject_shift_px) {
        pf::SceneSpec spec;
        spec.scene_template = pf::scene_template_from_string(scene_template);
        spec.seed = seed;
        spec.noise_sigma = noise_px;
        spec.inject_yaw_deg = inject_yaw_deg;
        spec.inject_shift_px = inject_shift_px;
        const auto scene = pf::generate_scene(spec);
        return std::make_pair(pf::serialize_annotations(scene.annotations),
                              pf::serialize_ground_truth(scene));
      },
      py::arg("template"), py::arg("seed"), py::arg("noise_px") = 0.0,
      py::arg("inject_yaw_deg") = 0.0, py::arg("inject_shift_px") = 0.0,
      "Returns (annotation document, ground-truth document) as JSON text.");
}
