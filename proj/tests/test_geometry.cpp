#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pf/errors.hpp"
#include "pf/geometry.hpp"
#include "support.hpp"

using namespace pf;
using testing_support::Random;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

bool near(Point2 a, Point2 b, double tol) { return distance(a, b) <= tol; }

}  // namespace

TEST_CASE("normal form rotates the direction by +90 degrees") {
  auto f = segment_to_normal_form({{0, 0}, {2, 0}});
  CHECK(f.normal == Point2{0, 1});
  CHECK(f.anchor == Point2{0, 0});

  f = segment_to_normal_form({{0, 0}, {0, 3}});
  CHECK(f.normal.x == doctest::Approx(-1.0));
  CHECK(f.normal.y == doctest::Approx(0.0));

  CHECK_THROWS_AS(segment_to_normal_form({{1, 1}, {1, 1}}), DegenerateSegment);
}

TEST_CASE("two-line intersection") {
  auto p = intersect_two_lines({{0, 0}, {1, 1}}, {{0, 2}, {2, 0}});
  REQUIRE(p.is_finite());
  CHECK(near(p.point(), {1, 1}, 1e-12));

  p = intersect_two_lines({{0, -5}, {0, 5}}, {{-5, 0}, {5, 0}});
  REQUIRE(p.is_finite());
  CHECK(near(p.point(), {0, 0}, 1e-12));

  p = intersect_two_lines({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}});
  REQUIRE(p.is_at_infinity());
  CHECK(near(p.direction(), {1, 0}, 1e-12));
}

TEST_CASE("intersection incidence over random pairs") {
  Random rng(101);
  for (int i = 0; i < 500; ++i) {
    const LineSegment a{rng.point(500), rng.point(500)};
    const LineSegment b{rng.point(500), rng.point(500)};
    if (a.length() < 1 || b.length() < 1) continue;
    const auto p = intersect_two_lines(a, b);
    if (!p.is_finite()) continue;
    const double scale = 1.0 + norm(p.point());
    CHECK(perpendicular_distance(p.point(), segment_to_normal_form(a)) <= 1e-9 * scale);
    CHECK(perpendicular_distance(p.point(), segment_to_normal_form(b)) <= 1e-9 * scale);
  }
}

TEST_CASE("perpendicular distance") {
  CHECK(perpendicular_distance({3, 4}, segment_to_normal_form({{0, 0}, {1, 0}})) == 4.0);
  CHECK(perpendicular_distance({1, 1}, segment_to_normal_form({{0, 0}, {2, 2}})) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(perpendicular_distance({0, 2}, segment_to_normal_form({{0, 0}, {1, 1}})) ==
        doctest::Approx(kSqrt2));
}

TEST_CASE("vanishing point of three concurrent lines") {
  const std::vector<LineSegment> lines{{{0, 0}, {1, 1}}, {{0, 10}, {1, 9}}, {{5, 0}, {5, 1}}};
  const auto est = estimate_vanishing_point(lines);
  CHECK(est.classification == PointClass::finite);
  CHECK(near(est.location.point(), {5, 5}, 1e-12));
  CHECK(est.rms_residual <= 1e-12);
  CHECK(est.per_line_residuals.size() == 3);
}

TEST_CASE("vanishing point errors") {
  const std::vector<LineSegment> one{{{0, 0}, {1, 1}}};
  CHECK_THROWS_AS(estimate_vanishing_point(one), InsufficientConstraints);
  try {
    estimate_vanishing_point(one);
  } catch (const InsufficientConstraints& e) {
    CHECK(e.need() == 2);
    CHECK(e.have() == 1);
  }
  const std::vector<LineSegment> bad{{{0, 0}, {1, 1}}, {{3, 3}, {3, 3}}, {{0, 1}, {1, 0}}};
  CHECK_THROWS_AS(estimate_vanishing_point(bad), DegenerateSegment);
}

TEST_CASE("parallel bundles are at infinity") {
  const std::vector<LineSegment> lines{{{0, 0}, {10, 0}}, {{0, 5}, {7, 5}}, {{3, 9}, {8, 9}}};
  const auto est = estimate_vanishing_point(lines);
  CHECK(est.classification == PointClass::at_infinity);
  CHECK(near(est.location.direction(), {1, 0}, 1e-12));
  CHECK(est.rms_residual <= 1e-12);
}

TEST_CASE("two-line estimate equals the intersection exactly") {
  Random rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::vector<LineSegment> lines{{rng.point(400), rng.point(400)},
                                         {rng.point(400), rng.point(400)}};
    const auto est = estimate_vanishing_point(lines);
    CHECK(est.location == intersect_two_lines(lines[0], lines[1]));
    CHECK(est.rms_residual == 0.0);
    CHECK(est.per_line_residuals == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("noisy pencil near (120, -80) matches the brute-force minimizer") {
  Random rng(2024);
  for (int i = 0; i < 20; ++i) {
    const auto lines = testing_support::jitter(rng, testing_support::pencil(rng, {120, -80}, 5), 0.5);
    const auto est = estimate_vanishing_point(lines);
    REQUIRE(est.classification == PointClass::finite);
    const Point2 ref = oracle::brute_force_vanishing_point(lines);
    CHECK(distance(est.location.point(), ref) <= 1e-3);
  }
}

TEST_CASE("closed-form estimate is a stationary minimum") {
  Random rng(99);
  for (int i = 0; i < 100; ++i) {
    const int m = rng.integer(3, 10);
    const auto lines =
        testing_support::jitter(rng, testing_support::pencil(rng, rng.point(600), m), 0.5);
    const auto est = estimate_vanishing_point(lines);
    REQUIRE(est.classification == PointClass::finite);
    const Point2 v = est.location.point();
    const long double e0 = oracle::line_cost(lines, v.x, v.y);
    for (int k = 0; k < 100; ++k) {
      const double a = rng.uniform(0, 2 * std::numbers::pi);
      const Point2 w = v + Point2{std::cos(a), std::sin(a)};
      CHECK(e0 <= oracle::line_cost(lines, w.x, w.y));
    }
    const long double h = 1e-3L;
    const long double gx =
        (oracle::line_cost(lines, v.x + h, v.y) - oracle::line_cost(lines, v.x - h, v.y)) / (2 * h);
    const long double gy =
        (oracle::line_cost(lines, v.x, v.y + h) - oracle::line_cost(lines, v.x, v.y - h)) / (2 * h);
    const double scale = 1.0 + static_cast<double>(e0);
    CHECK(std::hypot(double(gx), double(gy)) <= 1e-6 * scale);
  }
}

TEST_CASE("exactly concurrent lines have negligible residual") {
  Random rng(5);
  for (int i = 0; i < 100; ++i) {
    const Point2 v = rng.point(2000);
    const auto lines = testing_support::pencil(rng, v, rng.integer(3, 10));
    const auto est = estimate_vanishing_point(lines);
    REQUIRE(est.classification == PointClass::finite);
    CHECK(est.rms_residual <= 1e-9 * (1.0 + norm(v)));
    CHECK(distance(est.location.point(), v) <= 1e-9 * (1.0 + norm(v)));
  }
}

TEST_CASE("vanishing point is translation and rotation equivariant") {
  Random rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto lines =
        testing_support::jitter(rng, testing_support::pencil(rng, rng.point(500), rng.integer(3, 8)), 0.5);
    const auto est = estimate_vanishing_point(lines);
    REQUIRE(est.classification == PointClass::finite);
    const Point2 v = est.location.point();

    const Point2 u = rng.point(300);
    auto moved = lines;
    for (auto& s : moved) s = {s.p + u, s.q + u};
    const auto t = estimate_vanishing_point(moved);
    CHECK(distance(t.location.point(), v + u) <= 1e-9 * (1.0 + norm(v) + norm(u)));

    const double phi = rng.uniform(-3, 3);
    auto turned = lines;
    for (auto& s : turned) s = {testing_support::rotate(s.p, phi), testing_support::rotate(s.q, phi)};
    const auto r = estimate_vanishing_point(turned);
    CHECK(distance(r.location.point(), testing_support::rotate(v, phi)) <= 1e-9 * (1.0 + norm(v)));
  }
}

TEST_CASE("estimates do not depend on input order") {
  Random rng(17);
  for (int i = 0; i < 100; ++i) {
    auto lines = testing_support::jitter(
        rng, testing_support::pencil(rng, rng.point(500), rng.integer(3, 10)), 0.5);
    const auto est = estimate_vanishing_point(lines);
    std::shuffle(lines.begin(), lines.end(), rng.engine());
    const auto shuffled = estimate_vanishing_point(lines);
    CHECK(shuffled.location == est.location);
    CHECK(shuffled.rms_residual == est.rms_residual);
    CHECK(shuffled.condition_number == est.condition_number);

    std::vector<ProjectivePoint> pts;
    for (int k = 0; k < rng.integer(3, 8); ++k) {
      pts.push_back(ProjectivePoint::finite({rng.uniform(-1000, 1000), rng.normal(3.0) + 200}));
    }
    const auto line = fit_vanishing_line(pts);
    std::shuffle(pts.begin(), pts.end(), rng.engine());
    const auto line2 = fit_vanishing_line(pts);
    CHECK(line2.line == line.line);
    CHECK(line2.rms_residual == line.rms_residual);
  }
}

TEST_CASE("homogeneous canonical form is scale invariant") {
  Random rng(23);
  for (int i = 0; i < 200; ++i) {
    const double hx = rng.uniform(-100, 100), hy = rng.uniform(-100, 100);
    const double hw = i % 4 == 0 ? 0.0 : rng.uniform(-2, 2);
    double s = rng.uniform(-1e3, 1e3);
    if (std::abs(s) < 1e-3) s = 1.0;
    const ProjectivePoint a(hx, hy, hw), b(s * hx, s * hy, s * hw);
    CHECK(a.is_finite() == b.is_finite());
    CHECK(a.approx_equal(b, 1e-12));
  }
  const ProjectivePoint inf(-3, 0, 0);
  CHECK(inf.direction() == Point2{1, 0});
  CHECK_THROWS_AS(ProjectivePoint(0, 0, 0), DegenerateConfiguration);
}

TEST_CASE("vanishing line fits") {
  std::vector<ProjectivePoint> two{ProjectivePoint::finite({0, 0}), ProjectivePoint::finite({10, 0})};
  auto l = fit_vanishing_line(two);
  CHECK(std::abs(l.line.a) <= 1e-15);
  CHECK(std::abs(l.line.b) == doctest::Approx(1.0));
  CHECK(std::abs(l.line.c) <= 1e-15);

  std::vector<ProjectivePoint> three{ProjectivePoint::finite({0, 0}), ProjectivePoint::finite({5, 0}),
                                     ProjectivePoint::finite({10, 0})};
  l = fit_vanishing_line(three);
  CHECK(l.rms_residual <= 1e-15);
  CHECK(std::abs(l.line.signed_distance({123, 0})) <= 1e-12);

  std::vector<ProjectivePoint> with_infinity{ProjectivePoint::finite({0, 7}),
                                             ProjectivePoint::at_infinity({1, 0})};
  l = fit_vanishing_line(with_infinity);
  CHECK(std::abs(l.line.signed_distance({-50, 7})) <= 1e-12);

  CHECK_THROWS_AS(fit_vanishing_line(std::vector<ProjectivePoint>{ProjectivePoint::finite({1, 1})}),
                  InsufficientConstraints);
  CHECK_THROWS_AS(fit_vanishing_line(std::vector<ProjectivePoint>{
                      ProjectivePoint::finite({1, 1}), ProjectivePoint::at_infinity({1, 0}),
                      ProjectivePoint::at_infinity({0, 1})}),
                  InconsistentDirections);
  CHECK_THROWS_AS(fit_vanishing_line(std::vector<ProjectivePoint>{
                      ProjectivePoint::finite({1, 1}), ProjectivePoint::finite({1, 1}),
                      ProjectivePoint::finite({1, 1})}),
                  DegenerateConfiguration);
}

TEST_CASE("total least squares matches a search over line parameters") {
  Random rng(31);
  for (int i = 0; i < 100; ++i) {
    const double theta = rng.uniform(0, std::numbers::pi);
    const Point2 dir{std::cos(theta), std::sin(theta)};
    const Point2 base = rng.point(400);
    std::vector<Point2> pts;
    std::vector<ProjectivePoint> hpts;
    for (int k = 0; k < 4; ++k) {
      const Point2 p = base + rng.uniform(-500, 500) * dir + rng.normal(2.0) * perp(dir);
      pts.push_back(p);
      hpts.push_back(ProjectivePoint::finite(p));
    }
    const auto est = fit_vanishing_line(hpts);
    const auto ref = oracle::brute_force_tls_line(pts);
    for (const auto& p : pts) {
      const double d_est = std::abs(est.line.signed_distance(p));
      const double d_ref = std::abs(dot(ref.normal, p) + ref.offset);
      CHECK(std::abs(d_est - d_ref) <= 1e-6);
    }
    CHECK(std::hypot(est.line.a, est.line.b) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("point-on-line checks") {
  VanishingLineEstimate horizon;
  horizon.line = {0.0, 1.0, 0.0};

  auto v = check_point_on_line(ProjectivePoint::finite({5, 0.5}), horizon, 3.0);
  CHECK(v.verdict == Verdict::consistent);
  CHECK(v.score == doctest::Approx(0.5));

  v = check_point_on_line(ProjectivePoint::finite({5, 50}), horizon, 3.0);
  CHECK(v.verdict == Verdict::inconsistent);
  CHECK(v.score == doctest::Approx(50));

  v = check_point_on_line(ProjectivePoint::at_infinity({1, 0}), horizon, 3.0);
  CHECK(v.verdict == Verdict::consistent);
  CHECK(v.score == 0.0);

  v = check_point_on_line(ProjectivePoint::at_infinity({1, 0.1}), horizon, 3.0);
  CHECK(v.verdict == Verdict::inconsistent);
  CHECK(std::isinf(v.score));
  REQUIRE(v.detail.size() == 1);
  CHECK(v.detail[0] == doctest::Approx(std::atan(0.1) * 180 / std::numbers::pi));
}

TEST_CASE("shared vanishing point") {
  Random rng(3);
  const auto a = testing_support::pencil(rng, {5, 5}, 3);
  const auto b = testing_support::pencil(rng, {5, 5}, 4);
  auto r = check_shared_vanishing_point(a, b, 3.0);
  CHECK(r.verdict.verdict == Verdict::consistent);
  CHECK(r.verdict.score <= 1e-9);
  CHECK(r.verdict.metrics.at("separation_px") <= 1e-9);

  const auto c = testing_support::pencil(rng, {0, 0}, 3);
  const auto d = testing_support::pencil(rng, {200, 0}, 3);
  r = check_shared_vanishing_point(c, d, 3.0);
  CHECK(r.verdict.verdict == Verdict::inconsistent);
  CHECK(r.verdict.metrics.at("separation_px") == doctest::Approx(200));

  CHECK_THROWS_AS(check_shared_vanishing_point(std::vector<LineSegment>{a[0]}, b, 3.0),
                  InsufficientConstraints);
}

TEST_CASE("verdict thresholds") {
  CHECK(make_verdict(3.0, 3.0).verdict == Verdict::consistent);
  CHECK(make_verdict(3.0000001, 3.0).verdict == Verdict::inconsistent);
  const auto ind = make_indeterminate(3.0);
  CHECK(ind.verdict == Verdict::indeterminate);
  CHECK(verdict_from_string(to_string(Verdict::inconsistent)) == Verdict::inconsistent);
  CHECK(point_class_from_string("at-infinity") == PointClass::at_infinity);
}

TEST_CASE("two-line verdict is flagged weak") {
  const std::vector<LineSegment> lines{{{0, 0}, {1, 1}}, {{0, 2}, {2, 0}}};
  const auto v = vanishing_point_verdict(estimate_vanishing_point(lines), 3.0);
  CHECK(v.verdict == Verdict::consistent);
  CHECK(v.metrics.at("weakly_constrained") == 1.0);
}
