#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pf/geometry.hpp"

namespace testing_support {

using pf::LineSegment;
using pf::Point2;

/// Randomness for test-case generation, independent of the scene generator.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Point2 point(double extent) { return {uniform(-extent, extent), uniform(-extent, extent)}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// `m` segments whose lines pass exactly through `v`, with well-spread
/// directions and endpoints at a distance from it.
inline std::vector<LineSegment> pencil(Random& rng, Point2 v, int m) {
  std::vector<LineSegment> out;
  for (int i = 0; i < m; ++i) {
    const double angle = std::numbers::pi * (i + rng.uniform(0.1, 0.9)) / m;
    const Point2 d{std::cos(angle), std::sin(angle)};
    const double t0 = rng.uniform(20.0, 200.0) * (rng.uniform(0, 1) < 0.5 ? -1 : 1);
    const double len = rng.uniform(30.0, 150.0);
    out.push_back({v + t0 * d, v + (t0 + len) * d});
  }
  return out;
}

inline std::vector<LineSegment> jitter(Random& rng, std::vector<LineSegment> lines, double sigma) {
  for (auto& s : lines) {
    s.p = s.p + Point2{rng.normal(sigma), rng.normal(sigma)};
    s.q = s.q + Point2{rng.normal(sigma), rng.normal(sigma)};
  }
  return lines;
}

inline Point2 rotate(Point2 p, double phi) {
  return {std::cos(phi) * p.x - std::sin(phi) * p.y, std::sin(phi) * p.x + std::cos(phi) * p.y};
}

inline long double cost(const std::vector<LineSegment>& lines, Point2 v) {
  long double e = 0.0L;
  for (const auto& s : lines) {
    const auto f = pf::segment_to_normal_form(s);
    const long double r = pf::perpendicular_distance(v, f);
    e += r * r;
  }
  return e;
}

}  // namespace testing_support
