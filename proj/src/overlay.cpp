#include "pf/overlay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

namespace pf {

namespace {

struct Box {
  double x0, y0, x1, y1;

  void include(Point2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* verdict_color(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "#2b8a3e";
    case Verdict::inconsistent: return "#c92a2a";
    case Verdict::indeterminate: return "#868e96";
  }
  return "#868e96";
}

class Svg {
 public:
  void line(Point2 a, Point2 b, const std::string& cls, const char* color, double width,
            bool dashed = false) {
    body_ += "    <line class=\"" + cls + "\" x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) +
             "\" x2=\"" + num(b.x) + "\" y2=\"" + num(b.y) + "\" stroke=\"" + color +
             "\" stroke-width=\"" + num(width) + "\"" +
             (dashed ? " stroke-dasharray=\"6 4\"" : "") +
             " vector-effect=\"non-scaling-stroke\"/>\n";
  }

  void circle(Point2 c, double r, const std::string& cls, const char* color) {
    body_ += "    <circle class=\"" + cls + "\" cx=\"" + num(c.x) + "\" cy=\"" + num(c.y) +
             "\" r=\"" + num(r) + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>\n";
  }

  void text(Point2 at, double size, const std::string& content, const char* color) {
    body_ += "    <text x=\"" + num(at.x) + "\" y=\"" + num(at.y) + "\" font-size=\"" +
             num(size) + "\" font-family=\"sans-serif\" fill=\"" + color + "\">" +
             escape(content) + "</text>\n";
  }

  void open_group(const std::string& cls, const std::string& label = {}) {
    body_ += "  <g class=\"" + cls + "\"";
    if (!label.empty()) body_ += " data-id=\"" + escape(label) + "\"";
    body_ += ">\n";
  }
  void close_group() { body_ += "  </g>\n"; }

  std::string& body() { return body_; }

 private:
  std::string body_;
};

// Clip the infinite line a x + b y + c = 0 to the box.
std::optional<std::pair<Point2, Point2>> clip_line(const HomogeneousLine& l, const Box& box) {
  std::vector<Point2> hits;
  auto add = [&](Point2 p) {
    constexpr double slack = 1e-9;
    if (p.x < box.x0 - slack || p.x > box.x1 + slack || p.y < box.y0 - slack ||
        p.y > box.y1 + slack) {
      return;
    }
    for (const auto& h : hits) {
      if (distance(h, p) < 1e-9) return;
    }
    hits.push_back(p);
  };
  if (std::abs(l.b) > 1e-15) {
    add({box.x0, -(l.a * box.x0 + l.c) / l.b});
    add({box.x1, -(l.a * box.x1 + l.c) / l.b});
  }
  if (std::abs(l.a) > 1e-15) {
    add({-(l.b * box.y0 + l.c) / l.a, box.y0});
    add({-(l.b * box.y1 + l.c) / l.a, box.y1});
  }
  if (hits.size() < 2) return std::nullopt;
  return std::make_pair(hits[0], hits[1]);
}

// Segment from `p` to `q`, lengthened to reach `target` when it lies along
// the line beyond either end.
std::pair<Point2, Point2> extend_to(Point2 p, Point2 q, Point2 target) {
  const Point2 d = q - p;
  const double t = dot(target - p, d) / dot(d, d);
  if (t > 1.0) return {q, p + t * d};
  if (t < 0.0) return {p, p + t * d};
  return {p, q};
}

}  // namespace

std::string render_overlay(const AnnotationDocument& doc, const AnalysisReport& report) {
  const double w = doc.image_size.width;
  const double h = doc.image_size.height;
  Box box{0.0, 0.0, w, h};

  auto finite = [](const std::optional<ProjectivePoint>& p) -> std::optional<Point2> {
    if (p && p->is_finite()) return p->point();
    return std::nullopt;
  };

  std::vector<std::optional<Point2>> group_vp;
  for (const auto& g : doc.line_groups) {
    const auto* vp = report.find_vanishing_point(g.id);
    std::optional<Point2> p;
    if (vp && vp->estimate && vp->estimate->classification != PointClass::degenerate) {
      p = finite(vp->estimate->location);
    }
    if (p) box.include(*p);
    group_vp.push_back(p);
  }
  std::optional<Point2> light;
  if (report.shadows && report.shadows->estimate) {
    light = finite(report.shadows->estimate->light_projection);
  }
  std::optional<Point2> mirror;
  if (report.reflections && report.reflections->result &&
      report.reflections->result->classification != PointClass::degenerate) {
    mirror = finite(report.reflections->result->intersection);
  }
  if (light) box.include(*light);
  if (mirror) box.include(*mirror);

  const double pad = 0.05 * std::max({w, h, box.x1 - box.x0, box.y1 - box.y0});
  box = {box.x0 - pad, box.y0 - pad, box.x1 + pad, box.y1 + pad};
  const double span = std::max(box.x1 - box.x0, box.y1 - box.y0);
  const double marker = std::max(6.0, 0.008 * span);
  const double font = std::max(12.0, 0.015 * span);

  Svg svg;
  svg.body() += "  <rect class=\"image\" x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" +
                num(h) +
                "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\" "
                "vector-effect=\"non-scaling-stroke\"/>\n";

  for (const auto& line : report.vanishing_lines) {
    if (!line.estimate) continue;
    if (const auto seg = clip_line(line.estimate->line, box)) {
      svg.open_group("vanishing-line", line.plane_group);
      svg.line(seg->first, seg->second, "vanishing-line", "#1c7ed6", 2.0, true);
      svg.close_group();
    }
  }

  for (std::size_t i = 0; i < doc.line_groups.size(); ++i) {
    const auto& g = doc.line_groups[i];
    const auto* vp = report.find_vanishing_point(g.id);
    const Verdict verdict = vp ? vp->verdict.verdict : Verdict::indeterminate;
    bool off_line = false;
    for (const auto& o : report.on_line) {
      if (o.group == g.id && o.verdict.verdict == Verdict::inconsistent) off_line = true;
    }
    const char* color = verdict_color(off_line ? Verdict::inconsistent : verdict);

    svg.open_group("line-group", g.id);
    for (const auto& s : g.segments) {
      if (group_vp[i]) {
        const auto [from, to] = extend_to(s.p, s.q, *group_vp[i]);
        svg.line(from, to, "extension", color, 1.0, true);
      }
      svg.line(s.p, s.q, "segment", color, 2.0);
    }
    if (group_vp[i]) {
      std::string cls = "vp";
      if (off_line) cls += " off-line";
      cls += std::string(" ") + to_string(verdict);
      svg.circle(*group_vp[i], marker, cls, color);
      svg.text(*group_vp[i] + Point2{marker, -marker}, font, g.id, color);
    }
    svg.close_group();
  }

  auto constraint_lines = [&](const char* group_cls, const auto& pairs, auto endpoints,
                              const std::optional<Point2>& meet, const char* marker_cls,
                              Verdict verdict) {
    const char* color = verdict_color(verdict);
    svg.open_group(group_cls);
    for (const auto& c : pairs) {
      const auto [a, b] = endpoints(c);
      if (meet) {
        const auto [from, to] = extend_to(a, b, *meet);
        svg.line(from, to, "extension", color, 1.0, true);
      }
      svg.line(a, b, "constraint", color, 2.0);
      svg.circle(a, 0.5 * marker, "anchor", color);
    }
    if (meet) {
      svg.circle(*meet, marker, std::string(marker_cls) + " " + to_string(verdict), color);
    }
    svg.close_group();
  };

  if (report.shadows && !doc.shadow_pairs.empty()) {
    constraint_lines(
        "shadows", doc.shadow_pairs,
        [](const ShadowConstraint& c) { return std::make_pair(c.object_point, c.shadow_point); },
        light, "light", report.shadows->verdict.verdict);
  }
  if (report.reflections && !doc.reflection_pairs.empty()) {
    constraint_lines(
        "reflections", doc.reflection_pairs,
        [](const ReflectionConstraint& c) {
          return std::make_pair(c.scene_point, c.reflection_point);
        },
        mirror, "mirror-vp", report.reflections->verdict.verdict);
  }

  const double vw = box.x1 - box.x0;
  const double vh = box.y1 - box.y0;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + num(box.x0) +
         " " + num(box.y0) + " " + num(vw) + " " + num(vh) + "\" width=\"" + num(vw) +
         "\" height=\"" + num(vh) + "\">\n";
  out += svg.body();
  out += "</svg>\n";
  return out;
}

}  // namespace pf
