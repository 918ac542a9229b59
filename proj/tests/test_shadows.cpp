#include <doctest.h>

#include <cmath>

#include "pf/errors.hpp"
#include "pf/shadows.hpp"
#include "support.hpp"

using namespace pf;
using testing_support::Random;

namespace {

// Constraints whose lines all pass through `light`. With `front`, the light
// lies beyond each object on the shadow->object ray; otherwise beyond each
// shadow on the object->shadow ray.
std::vector<ShadowConstraint> converging(Random& rng, Point2 light, int m, bool front) {
  std::vector<ShadowConstraint> out;
  for (int i = 0; i < m; ++i) {
    const double angle = std::numbers::pi * (0.1 + 0.8 * (i + rng.uniform(0.2, 0.8)) / m);
    const Point2 d{std::cos(angle), std::sin(angle)};  // pointing away from the light
    const double near_t = rng.uniform(50, 200), far_t = near_t + rng.uniform(20, 120);
    const Point2 close = light + near_t * d, far = light + far_t * d;
    out.push_back(front ? ShadowConstraint{close, far, "c" + std::to_string(i)}
                        : ShadowConstraint{far, close, "c" + std::to_string(i)});
  }
  return out;
}

}  // namespace

TEST_CASE("constraint lines") {
  auto f = constraint_line({{1, 1}, {0, 0}, "a"});
  CHECK(std::abs(cross(perp(f.normal), Point2{1, 1})) <= 1e-12);
  CHECK(perpendicular_distance({0, 0}, f) <= 1e-12);

  f = constraint_line({{5, 5}, {5, 0}, "b"});
  CHECK(std::abs(f.normal.y) <= 1e-12);
  CHECK(perpendicular_distance({5, 123}, f) <= 1e-12);

  CHECK_THROWS_AS(constraint_line({{0, 0}, {0, 0}, "c"}), DegenerateConstraint);
}

TEST_CASE("vertical parallel constraints put the light at infinity") {
  const std::vector<ShadowConstraint> cs{{{0, 5}, {0, 0}, "a"}, {{10, 5}, {10, 0}, "b"}};
  const auto est = analyze_shadows(cs, 3.0);
  CHECK(est.hypothesis == LightHypothesis::at_infinity);
  CHECK(est.light_projection.is_at_infinity());
  CHECK(std::abs(est.light_projection.direction().x) <= 1e-12);
  CHECK(est.verdict.verdict == Verdict::consistent);
}

TEST_CASE("light in front of the camera") {
  const std::vector<ShadowConstraint> cs{{{1, 1}, {0, 0}, "a"}, {{9, 1}, {10, 0}, "b"}};
  const auto est = analyze_shadows(cs, 3.0, 768.0);
  CHECK(est.hypothesis == LightHypothesis::front_of_camera);
  REQUIRE(est.light_projection.is_finite());
  CHECK(distance(est.light_projection.point(), {5, 5}) <= 1e-12);
  CHECK(est.verdict.verdict == Verdict::consistent);
  CHECK(est.side_violations == 0);
  CHECK(est.image_half == "upper");
}

TEST_CASE("light behind the camera") {
  const std::vector<ShadowConstraint> cs{{{0, 0}, {1, 1}, "a"}, {{10, 0}, {9, 1}, "b"}};
  const auto est = analyze_shadows(cs, 3.0);
  CHECK(est.hypothesis == LightHypothesis::behind_camera);
  CHECK(distance(est.light_projection.point(), {5, 5}) <= 1e-12);
  CHECK(est.verdict.verdict == Verdict::consistent);
}

TEST_CASE("mixed anchoring admits no hypothesis") {
  // One constraint points toward the common point, the other away from it.
  const std::vector<ShadowConstraint> cs{{{1, 1}, {0, 0}, "a"}, {{10, 0}, {9, 1}, "b"}};
  const auto est = analyze_shadows(cs, 3.0);
  CHECK(est.verdict.verdict == Verdict::inconsistent);
  CHECK(est.side_violations > 0);
  CHECK(est.per_hypothesis_detail.size() == 3);
}

TEST_CASE("shadow errors") {
  const std::vector<ShadowConstraint> one{{{1, 1}, {0, 0}, "a"}};
  CHECK_THROWS_AS(analyze_shadows(one), InsufficientConstraints);
  const std::vector<ShadowConstraint> bad{{{1, 1}, {0, 0}, "a"}, {{2, 2}, {2, 2}, "b"}};
  CHECK_THROWS_AS(analyze_shadows(bad), DegenerateConstraint);
}

TEST_CASE("swapping object and shadow swaps front and behind") {
  Random rng(41);
  for (int i = 0; i < 100; ++i) {
    const Point2 light = rng.point(800);
    const bool front = i % 2 == 0;
    auto cs = converging(rng, light, rng.integer(2, 8), front);
    cs = [&] {
      for (auto& c : cs) {
        c.object_point = c.object_point + Point2{rng.normal(0.3), rng.normal(0.3)};
      }
      return cs;
    }();
    const auto est = analyze_shadows(cs, 3.0);
    auto swapped = cs;
    for (auto& c : swapped) std::swap(c.object_point, c.shadow_point);
    const auto est2 = analyze_shadows(swapped, 3.0);

    REQUIRE(est.per_hypothesis_detail.size() == 3);
    REQUIRE(est2.per_hypothesis_detail.size() == 3);
    CHECK(est.per_hypothesis_detail[0].admissible == est2.per_hypothesis_detail[1].admissible);
    CHECK(est.per_hypothesis_detail[1].admissible == est2.per_hypothesis_detail[0].admissible);
    CHECK(est.per_hypothesis_detail[0].side_violations ==
          est2.per_hypothesis_detail[1].side_violations);
    CHECK(est2.light_projection.approx_equal(est.light_projection, 1e-12));
    CHECK(est.hypothesis ==
          (front ? LightHypothesis::front_of_camera : LightHypothesis::behind_camera));
    CHECK(est2.hypothesis ==
          (front ? LightHypothesis::behind_camera : LightHypothesis::front_of_camera));
  }
}

TEST_CASE("light estimate is translation equivariant") {
  Random rng(43);
  for (int i = 0; i < 100; ++i) {
    const Point2 light = rng.point(600);
    auto cs = converging(rng, light, rng.integer(3, 8), i % 3 != 0);
    for (auto& c : cs) c.shadow_point = c.shadow_point + Point2{rng.normal(0.5), rng.normal(0.5)};
    const auto est = analyze_shadows(cs, 3.0);
    const Point2 u = rng.point(400);
    auto moved = cs;
    for (auto& c : moved) {
      c.object_point = c.object_point + u;
      c.shadow_point = c.shadow_point + u;
    }
    const auto est2 = analyze_shadows(moved, 3.0);
    CHECK(est2.hypothesis == est.hypothesis);
    REQUIRE(est.light_projection.is_finite());
    CHECK(distance(est2.light_projection.point(), est.light_projection.point() + u) <=
          1e-9 * (1.0 + norm(light) + norm(u)));
  }
}

TEST_CASE("a 20 px perpendicular shadow shift is detected") {
  Random rng(47);
  for (int i = 0; i < 100; ++i) {
    auto cs = converging(rng, rng.point(600), rng.integer(3, 8), i % 2 == 0);
    REQUIRE(analyze_shadows(cs, 3.0).verdict.verdict == Verdict::consistent);
    auto& c = cs[static_cast<std::size_t>(rng.integer(0, static_cast<int>(cs.size()) - 1))];
    const Point2 d = c.object_point - c.shadow_point;
    c.shadow_point = c.shadow_point + 20.0 * perp(d) / norm(d);
    const auto est = analyze_shadows(cs, 3.0);
    CHECK(est.verdict.verdict == Verdict::inconsistent);
    CHECK(est.per_hypothesis_detail.size() == 3);
  }
}

TEST_CASE("hypothesis names round-trip") {
  for (auto h : {LightHypothesis::front_of_camera, LightHypothesis::behind_camera,
                 LightHypothesis::at_infinity}) {
    CHECK(light_hypothesis_from_string(to_string(h)) == h);
  }
  CHECK_THROWS_AS(light_hypothesis_from_string("sideways"), Error);
}
