#pragma once

// Planar projective-geometry kernel: line parameterizations, intersections,
// least-squares vanishing points and vanishing lines, and tolerance-based
// consistency verdicts. Everything here is a pure function over values.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pf {

inline constexpr double kSegmentEpsilon = 1e-6;      // px
inline constexpr double kDeterminantEpsilon = 1e-10;  // |sin| between two lines
inline constexpr double kMaxConditionNumber = 1e8;
inline constexpr double kHomogeneousEpsilon = 1e-12;  // relative |hw|
inline constexpr double kDefaultTolerancePx = 3.0;
inline constexpr double kDefaultAngleToleranceDeg = 0.5;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Rotates a vector by +90 degrees.
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }

/// Unit direction with a fixed sign: the first component that is not
/// negligible is positive. Used wherever only the undirected line matters.
Point2 canonical_direction(Point2 d);

/// Homogeneous 2-D point. Finite points and points at infinity (pure
/// directions) are represented uniformly. The stored components are always
/// the canonical form: (x, y, 1) when finite, otherwise a unit direction
/// (dx, dy, 0) whose first non-negligible component is positive.
class ProjectivePoint {
 public:
  ProjectivePoint() = default;  // the origin
  ProjectivePoint(double hx, double hy, double hw);

  static ProjectivePoint finite(Point2 p) { return {p.x, p.y, 1.0}; }
  static ProjectivePoint at_infinity(Point2 direction) {
    return {direction.x, direction.y, 0.0};
  }

  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double hw() const { return hw_; }

  bool is_finite() const { return hw_ != 0.0; }
  bool is_at_infinity() const { return hw_ == 0.0; }

  /// Image location; only meaningful when finite.
  Point2 point() const { return {hx_, hy_}; }
  /// Unit direction; only meaningful at infinity.
  Point2 direction() const { return {hx_, hy_}; }

  /// Finite points compare by distance relative to their magnitude;
  /// points at infinity compare by direction.
  bool approx_equal(const ProjectivePoint& other, double tol = 1e-9) const;

  friend bool operator==(const ProjectivePoint&, const ProjectivePoint&) = default;

 private:
  double hx_ = 0.0;
  double hy_ = 0.0;
  double hw_ = 1.0;
};

struct LineSegment {
  Point2 p;
  Point2 q;

  double length() const { return distance(p, q); }
  Point2 direction() const { return (q - p) / length(); }
  Point2 midpoint() const { return 0.5 * (p + q); }

  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Unit normal plus an anchor point on the line.
struct LineNormalForm {
  Point2 normal;
  Point2 anchor;
};

/// a*x + b*y + c = 0 with (a, b) of unit length.
struct HomogeneousLine {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  double signed_distance(Point2 p) const { return a * p.x + b * p.y + c; }
  Point2 normal() const { return {a, b}; }
  Point2 direction() const { return {-b, a}; }

  friend bool operator==(const HomogeneousLine&, const HomogeneousLine&) = default;
};

/// Line n.x + offset = 0, scaled to a unit normal with canonical sign.
HomogeneousLine canonical_line(Point2 normal, double offset);

enum class PointClass { finite, at_infinity, degenerate };

struct VanishingPointEstimate {
  ProjectivePoint location;
  double rms_residual = 0.0;
  std::vector<double> per_line_residuals;
  double condition_number = 1.0;
  PointClass classification = PointClass::finite;

  friend bool operator==(const VanishingPointEstimate&,
                         const VanishingPointEstimate&) = default;
};

struct VanishingLineEstimate {
  HomogeneousLine line;
  std::vector<double> per_point_residuals;
  double rms_residual = 0.0;

  friend bool operator==(const VanishingLineEstimate&,
                         const VanishingLineEstimate&) = default;
};

enum class Verdict { consistent, inconsistent, indeterminate };

struct ConsistencyVerdict {
  Verdict verdict = Verdict::indeterminate;
  double score = 0.0;      // px
  double tolerance = 0.0;  // px
  std::vector<double> detail;             // per-constraint residuals, px
  std::map<std::string, double> metrics;  // named auxiliary quantities

  friend bool operator==(const ConsistencyVerdict&,
                         const ConsistencyVerdict&) = default;
};

/// consistent iff score <= tolerance.
ConsistencyVerdict make_verdict(double score, double tolerance,
                                std::vector<double> detail = {});
ConsistencyVerdict make_indeterminate(double tolerance, std::vector<double> detail = {});

const char* to_string(PointClass c);
const char* to_string(Verdict v);
PointClass point_class_from_string(const std::string& s);
Verdict verdict_from_string(const std::string& s);

LineNormalForm segment_to_normal_form(const LineSegment& seg);

/// Intersection of the infinite lines through two segments. Parallel lines
/// yield the point at infinity in their common direction.
ProjectivePoint intersect_two_lines(const LineSegment& l1, const LineSegment& l2);

double perpendicular_distance(Point2 v, const LineNormalForm& line);

/// How far a segment is from pointing at a direction at infinity: the
/// offset of its endpoints from the line through its midpoint along `dir`.
double direction_residual(const LineSegment& seg, Point2 dir);

/// Least-squares point closest to all lines (perpendicular distance). Two
/// lines reduce to their exact intersection.
VanishingPointEstimate estimate_vanishing_point(std::span<const LineSegment> lines);

/// Line through a set of vanishing points; total least squares for three or
/// more finite points. A point at infinity pins the line's direction.
VanishingLineEstimate fit_vanishing_line(std::span<const ProjectivePoint> points);

ConsistencyVerdict check_point_on_line(
    const ProjectivePoint& vp, const VanishingLineEstimate& vline, double tolerance,
    double angle_tolerance_deg = kDefaultAngleToleranceDeg);

struct SharedVanishingPointResult {
  ConsistencyVerdict verdict;  // score: joint rms residual
  VanishingPointEstimate joint;
  VanishingPointEstimate first;
  VanishingPointEstimate second;

  friend bool operator==(const SharedVanishingPointResult&,
                         const SharedVanishingPointResult&) = default;
};

/// Do two groups of lines converge to one vanishing point? The joint refit
/// residual is the score; the per-group estimates and their separation
/// (`separation_px` or `angular_separation_deg`) are reported as metrics.
SharedVanishingPointResult check_shared_vanishing_point(
    std::span<const LineSegment> group_a, std::span<const LineSegment> group_b,
    double tolerance);

/// Verdict for a single line family. Three or more lines are judged by rms
/// residual; two lines always intersect and are flagged weakly constrained.
ConsistencyVerdict vanishing_point_verdict(const VanishingPointEstimate& estimate,
                                           double tolerance);

/// Common direction of a bundle of lines: perpendicular to the dominant
/// eigenvector of the summed normal outer products. Canonical sign.
Point2 dominant_direction(std::span<const LineSegment> lines);

/// True when every pair of lines is parallel within `angle_tolerance_deg`.
bool mutually_parallel(std::span<const LineSegment> lines,
                       double angle_tolerance_deg = kDefaultAngleToleranceDeg);

/// Unsigned angle between two undirected lines, in degrees.
double line_angle_deg(Point2 u, Point2 v);

double rms(std::span<const double> values);

}  // namespace pf
