#include "pf/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>

#include "pf/errors.hpp"

namespace pf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_non_degenerate(const LineSegment& seg) {
  if (!(seg.length() > kSegmentEpsilon)) {
    throw DegenerateSegment("segment endpoints coincide");
  }
}

// Eigen-decomposition of the symmetric matrix [a b; b c].
struct SymmetricEigen2 {
  double largest;
  double smallest;
  Point2 largest_vector;  // unit
};

SymmetricEigen2 symmetric_eigen(double a, double b, double c, double det) {
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double largest = mean + radius;
  // det / largest avoids the cancellation in mean - radius.
  const double smallest = largest > 0.0 ? std::max(0.0, det / largest) : 0.0;

  Point2 v1{largest - c, b};
  Point2 v2{b, largest - a};
  Point2 v = norm(v1) >= norm(v2) ? v1 : v2;
  const double n = norm(v);
  if (n == 0.0) {
    v = a >= c ? Point2{1.0, 0.0} : Point2{0.0, 1.0};
  } else {
    v = v / n;
  }
  return {largest, smallest, v};
}

// Index order that does not depend on input order, so sums are
// accumulated identically for any permutation.
std::vector<std::size_t> canonical_order(std::span<const LineSegment> lines) {
  std::vector<std::size_t> order(lines.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = lines[i];
    const auto& b = lines[j];
    return std::tie(a.p.x, a.p.y, a.q.x, a.q.y) < std::tie(b.p.x, b.p.y, b.q.x, b.q.y);
  });
  return order;
}

}  // namespace

double line_angle_deg(Point2 u, Point2 v) {
  const double c = std::abs(dot(u, v)) / (norm(u) * norm(v));
  const double s = std::abs(cross(u, v)) / (norm(u) * norm(v));
  return std::atan2(s, c) * kRadToDeg;
}

Point2 dominant_direction(std::span<const LineSegment> lines) {
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i : canonical_order(lines)) {
    require_non_degenerate(lines[i]);
    const Point2 n = perp(lines[i].direction());
    sxx += n.x * n.x;
    sxy += n.x * n.y;
    syy += n.y * n.y;
  }
  const auto eig = symmetric_eigen(sxx, sxy, syy, sxx * syy - sxy * sxy);
  return canonical_direction(perp(eig.largest_vector));
}

bool mutually_parallel(std::span<const LineSegment> lines, double angle_tolerance_deg) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (line_angle_deg(lines[i].q - lines[i].p, lines[j].q - lines[j].p) >
          angle_tolerance_deg) {
        return false;
      }
    }
  }
  return true;
}

Point2 canonical_direction(Point2 d) {
  const double n = norm(d);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateConfiguration("direction has zero length");
  }
  d = d / n;
  const bool flip = std::abs(d.x) > 1e-12 ? d.x < 0.0 : d.y < 0.0;
  return flip ? -d : d;
}

ProjectivePoint::ProjectivePoint(double hx, double hy, double hw) {
  const double scale = std::max({std::abs(hx), std::abs(hy), std::abs(hw)});
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DegenerateConfiguration("homogeneous point must be finite and non-zero");
  }
  if (std::abs(hw) > kHomogeneousEpsilon * scale) {
    hx_ = hx / hw;
    hy_ = hy / hw;
    hw_ = 1.0;
  } else {
    const Point2 d = canonical_direction({hx, hy});
    hx_ = d.x;
    hy_ = d.y;
    hw_ = 0.0;
  }
}

bool ProjectivePoint::approx_equal(const ProjectivePoint& other, double tol) const {
  if (is_finite() != other.is_finite()) return false;
  if (is_finite()) {
    const double scale = 1.0 + std::max(norm(point()), norm(other.point()));
    return distance(point(), other.point()) <= tol * scale;
  }
  return distance(direction(), other.direction()) <= tol;
}

ConsistencyVerdict make_verdict(double score, double tolerance, std::vector<double> detail) {
  ConsistencyVerdict v;
  v.verdict = score <= tolerance ? Verdict::consistent : Verdict::inconsistent;
  v.score = score;
  v.tolerance = tolerance;
  v.detail = std::move(detail);
  return v;
}

ConsistencyVerdict make_indeterminate(double tolerance, std::vector<double> detail) {
  ConsistencyVerdict v;
  v.verdict = Verdict::indeterminate;
  v.score = kInf;
  v.tolerance = tolerance;
  v.detail = std::move(detail);
  return v;
}

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::finite: return "finite";
    case PointClass::at_infinity: return "at-infinity";
    case PointClass::degenerate: return "degenerate";
  }
  return "degenerate";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

PointClass point_class_from_string(const std::string& s) {
  if (s == "finite") return PointClass::finite;
  if (s == "at-infinity") return PointClass::at_infinity;
  if (s == "degenerate") return PointClass::degenerate;
  throw Error("unknown point classification '" + s + "'");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "consistent") return Verdict::consistent;
  if (s == "inconsistent") return Verdict::inconsistent;
  if (s == "indeterminate") return Verdict::indeterminate;
  throw Error("unknown verdict '" + s + "'");
}

double rms(std::span<const double> values) {
  if (values.empty()) return 0.0;
  // Sorted accumulation keeps the result independent of input order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v * v;
  return std::sqrt(sum / static_cast<double>(values.size()));
}

LineNormalForm segment_to_normal_form(const LineSegment& seg) {
  require_non_degenerate(seg);
  return {perp(seg.direction()), seg.p};
}

ProjectivePoint intersect_two_lines(const LineSegment& l1, const LineSegment& l2) {
  require_non_degenerate(l1);
  require_non_degenerate(l2);

  // l_i(t) = (p_i - q_i) t + q_i; solve l1(t1) = l2(t2).
  const Point2 d1 = l1.p - l1.q;
  const Point2 d2 = l2.p - l2.q;
  const Point2 rhs = l2.q - l1.q;
  // Matrix [d1, -d2].
  const double det = -d1.x * d2.y + d2.x * d1.y;
  if (std::abs(det) <= kDeterminantEpsilon * norm(d1) * norm(d2)) {
    return ProjectivePoint::at_infinity(d1);
  }
  const double t1 = (-rhs.x * d2.y + d2.x * rhs.y) / det;
  return ProjectivePoint::finite(l1.q + t1 * d1);
}

double perpendicular_distance(Point2 v, const LineNormalForm& line) {
  return std::abs(dot(line.normal, v - line.anchor));
}

double direction_residual(const LineSegment& seg, Point2 dir) {
  return 0.5 * std::abs(cross(seg.q - seg.p, dir)) / norm(dir);
}

VanishingPointEstimate estimate_vanishing_point(std::span<const LineSegment> lines) {
  if (lines.size() < 2) throw InsufficientConstraints(lines.size(), 2);
  for (const auto& seg : lines) require_non_degenerate(seg);

  std::vector<LineNormalForm> forms;
  forms.reserve(lines.size());
  for (const auto& seg : lines) forms.push_back(segment_to_normal_form(seg));

  // Normal matrix sum n n^T and right-hand side sum n n^T p.
  double sxx = 0.0, sxy = 0.0, syy = 0.0, bx = 0.0, by = 0.0;
  const auto order = canonical_order(lines);
  for (std::size_t i : order) {
    const auto& f = forms[i];
    const double np = dot(f.normal, f.anchor);
    sxx += f.normal.x * f.normal.x;
    sxy += f.normal.x * f.normal.y;
    syy += f.normal.y * f.normal.y;
    bx += f.normal.x * np;
    by += f.normal.y * np;
  }
  // det(sum n n^T) = sum_{i<j} (n_i x n_j)^2, exact for near-parallel bundles.
  double det = 0.0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const double c = cross(forms[order[a]].normal, forms[order[b]].normal);
      det += c * c;
    }
  }
  const auto eig = symmetric_eigen(sxx, sxy, syy, det);
  const double condition = eig.smallest > 0.0 ? eig.largest / eig.smallest : kInf;

  VanishingPointEstimate est;
  est.condition_number = condition;

  if (lines.size() == 2) {
    est.location = intersect_two_lines(lines[0], lines[1]);
    est.classification =
        est.location.is_finite() ? PointClass::finite : PointClass::at_infinity;
    est.per_line_residuals.assign(2, 0.0);
    est.rms_residual = 0.0;
    return est;
  }

  if (condition > kMaxConditionNumber) {
    // All normals share one dominant direction; the lines meet at infinity.
    const Point2 dir = perp(eig.largest_vector);
    est.location = ProjectivePoint::at_infinity(dir);
    est.classification = PointClass::at_infinity;
    for (const auto& seg : lines) {
      est.per_line_residuals.push_back(direction_residual(seg, dir));
    }
    est.rms_residual = rms(est.per_line_residuals);
    return est;
  }

  const Point2 v{(syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det};
  if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
    est.classification = PointClass::degenerate;
    est.location = ProjectivePoint::at_infinity(perp(eig.largest_vector));
    est.per_line_residuals.assign(lines.size(), kInf);
    est.rms_residual = kInf;
    return est;
  }
  est.location = ProjectivePoint::finite(v);
  est.classification = PointClass::finite;
  for (const auto& f : forms) est.per_line_residuals.push_back(perpendicular_distance(v, f));
  est.rms_residual = rms(est.per_line_residuals);
  return est;
}

HomogeneousLine canonical_line(Point2 normal, double offset) {
  const double n = norm(normal);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateConfiguration("line normal has zero length");
  }
  HomogeneousLine l{normal.x / n, normal.y / n, offset / n};
  const bool flip = std::abs(l.a) > 1e-12 ? l.a < 0.0 : l.b < 0.0;
  if (flip) l = {-l.a, -l.b, -l.c};
  return l;
}

VanishingLineEstimate fit_vanishing_line(std::span<const ProjectivePoint> points) {
  if (points.size() < 2) throw InsufficientConstraints(points.size(), 2);

  std::vector<Point2> finite;
  std::vector<Point2> directions;
  for (const auto& p : points) {
    if (p.is_finite()) {
      finite.push_back(p.point());
    } else {
      directions.push_back(p.direction());
    }
  }
  std::sort(finite.begin(), finite.end(),
            [](Point2 a, Point2 b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });

  HomogeneousLine line;
  if (!directions.empty()) {
    std::sort(directions.begin(), directions.end(),
              [](Point2 a, Point2 b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    Point2 sum{0.0, 0.0};
    for (const auto& d : directions) {
      if (line_angle_deg(d, directions.front()) > kDefaultAngleToleranceDeg) {
        throw InconsistentDirections("points at infinity disagree on direction");
      }
      sum = sum + (dot(d, directions.front()) < 0.0 ? -d : d);
    }
    if (finite.empty()) {
      throw DegenerateConfiguration("vanishing line needs a finite point");
    }
    const Point2 normal = perp(sum / norm(sum));
    double offset = 0.0;
    for (const auto& p : finite) offset += dot(normal, p);
    offset /= static_cast<double>(finite.size());
    line = canonical_line(normal, -offset);
  } else if (finite.size() == 2) {
    if (!(distance(finite[0], finite[1]) > kSegmentEpsilon)) {
      throw DegenerateConfiguration("vanishing points coincide");
    }
    const Point2 normal = perp(finite[1] - finite[0]);
    line = canonical_line(normal, -dot(normal, finite[0]));
  } else {
    Point2 centroid{0.0, 0.0};
    for (const auto& p : finite) centroid = centroid + p;
    centroid = centroid / static_cast<double>(finite.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : finite) {
      const Point2 d = p - centroid;
      sxx += d.x * d.x;
      sxy += d.x * d.y;
      syy += d.y * d.y;
    }
    if (!(std::max(sxx, syy) > kSegmentEpsilon * kSegmentEpsilon)) {
      throw DegenerateConfiguration("vanishing points coincide");
    }
    const auto eig = symmetric_eigen(sxx, sxy, syy, sxx * syy - sxy * sxy);
    const Point2 normal = perp(eig.largest_vector);
    line = canonical_line(normal, -dot(normal, centroid));
  }

  // Points at infinity contribute a zero residual; the rms is over finite
  // points, the only ones with a pixel distance.
  VanishingLineEstimate est;
  est.line = line;
  std::vector<double> finite_residuals;
  for (const auto& p : points) {
    if (p.is_finite()) {
      const double r = std::abs(line.signed_distance(p.point()));
      est.per_point_residuals.push_back(r);
      finite_residuals.push_back(r);
    } else {
      est.per_point_residuals.push_back(0.0);
    }
  }
  est.rms_residual = rms(finite_residuals);
  return est;
}

ConsistencyVerdict check_point_on_line(const ProjectivePoint& vp,
                                       const VanishingLineEstimate& vline, double tolerance,
                                       double angle_tolerance_deg) {
  if (vp.is_finite()) {
    const double d = std::abs(vline.line.signed_distance(vp.point()));
    return make_verdict(d, tolerance, {d});
  }
  const double angle = line_angle_deg(vp.direction(), vline.line.direction());
  ConsistencyVerdict v;
  v.tolerance = tolerance;
  if (angle <= angle_tolerance_deg) {
    v.verdict = Verdict::consistent;
    v.score = 0.0;
  } else {
    v.verdict = Verdict::inconsistent;
    v.score = kInf;
  }
  v.detail = {angle};
  v.metrics["angular_deviation_deg"] = angle;
  return v;
}

SharedVanishingPointResult check_shared_vanishing_point(std::span<const LineSegment> group_a,
                                                        std::span<const LineSegment> group_b,
                                                        double tolerance) {
  if (group_a.size() < 2) throw InsufficientConstraints(group_a.size(), 2);
  if (group_b.size() < 2) throw InsufficientConstraints(group_b.size(), 2);

  std::vector<LineSegment> joint(group_a.begin(), group_a.end());
  joint.insert(joint.end(), group_b.begin(), group_b.end());

  SharedVanishingPointResult r;
  r.first = estimate_vanishing_point(group_a);
  r.second = estimate_vanishing_point(group_b);
  r.joint = estimate_vanishing_point(joint);

  if (r.joint.classification == PointClass::degenerate) {
    r.verdict = make_indeterminate(tolerance, r.joint.per_line_residuals);
  } else {
    r.verdict = make_verdict(r.joint.rms_residual, tolerance, r.joint.per_line_residuals);
  }

  const auto& a = r.first.location;
  const auto& b = r.second.location;
  if (a.is_finite() && b.is_finite()) {
    r.verdict.metrics["separation_px"] = distance(a.point(), b.point());
  } else if (a.is_at_infinity() && b.is_at_infinity()) {
    r.verdict.metrics["angular_separation_deg"] =
        line_angle_deg(a.direction(), b.direction());
  } else {
    r.verdict.metrics["separation_px"] = kInf;
  }
  return r;
}

ConsistencyVerdict vanishing_point_verdict(const VanishingPointEstimate& estimate,
                                           double tolerance) {
  if (estimate.classification == PointClass::degenerate) {
    return make_indeterminate(tolerance, estimate.per_line_residuals);
  }
  auto v = make_verdict(estimate.rms_residual, tolerance, estimate.per_line_residuals);
  if (estimate.per_line_residuals.size() < 3) v.metrics["weakly_constrained"] = 1.0;
  return v;
}

}  // namespace pf
