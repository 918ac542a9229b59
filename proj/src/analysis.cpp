#include "pf/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <openssl/evp.h>

#include "pf/errors.hpp"

#ifndef PF_VERSION
#define PF_VERSION "0.0.0"
#endif

namespace pf {

namespace {

constexpr const char* kReportSchema = "v1";

std::string insufficient_note(std::size_t have, std::size_t need) {
  return "insufficient constraints: need >= " + std::to_string(need) + ", have " +
         std::to_string(have);
}

CheckSummary summarize(std::string id, const ConsistencyVerdict& v, std::string note = {}) {
  return {std::move(id), v.verdict, v.score, v.tolerance, std::move(note)};
}

Json numbers_json(const std::vector<double>& values) {
  Json a = Json::array();
  for (double v : values) a.push_back(number_to_json(v));
  return a;
}

// ---- reading ----------------------------------------------------------

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "expected an object");
  }

  std::string member(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

  const Json& at(const std::string& key) const {
    if (!has(key)) throw SchemaError(member(key), "missing required field");
    return j_[key];
  }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw SchemaError(member(key), "expected a string");
    return v.get<std::string>();
  }

  std::string string_or_empty(const std::string& key) const {
    return has(key) ? string(key) : std::string();
  }

  double number(const std::string& key) const {
    try {
      return number_from_json(at(key));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error&) {
      throw SchemaError(member(key), "expected a number");
    }
  }

  std::size_t count(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_unsigned()) throw SchemaError(member(key), "expected a count");
    return v.get<std::size_t>();
  }

  bool boolean(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) throw SchemaError(member(key), "expected a boolean");
    return v.get<bool>();
  }

  const Json& array(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw SchemaError(member(key), "expected an array");
    return v;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    const auto& a = array(key);
    for (std::size_t i = 0; i < a.size(); ++i) {
      try {
        out.push_back(number_from_json(a[i]));
      } catch (const Error&) {
        throw SchemaError(member(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
    }
    return out;
  }

  Reader object(const std::string& key) const { return Reader(at(key), member(key)); }

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
};

template <typename F>
auto translate(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

ProjectivePoint projective_from(const Reader& r, const std::string& key) {
  const auto v = r.numbers(key);
  if (v.size() != 3) throw SchemaError(r.member(key), "expected [hx, hy, hw]");
  return translate(r.member(key), [&] { return ProjectivePoint(v[0], v[1], v[2]); });
}

ConsistencyVerdict verdict_from(const Reader& r) {
  ConsistencyVerdict v;
  v.verdict = translate(r.member("verdict"), [&] { return verdict_from_string(r.string("verdict")); });
  v.score = r.number("score");
  v.tolerance = r.number("tolerance");
  v.detail = r.numbers("residuals");
  const Reader metrics = r.object("metrics");
  for (auto it = metrics.json().begin(); it != metrics.json().end(); ++it) {
    v.metrics[it.key()] = metrics.number(it.key());
  }
  return v;
}

VanishingPointEstimate vp_estimate_from(const Reader& r) {
  VanishingPointEstimate e;
  e.classification = translate(r.member("classification"), [&] {
    return point_class_from_string(r.string("classification"));
  });
  e.location = projective_from(r, "location");
  e.rms_residual = r.number("rms_residual");
  e.per_line_residuals = r.numbers("residuals");
  e.condition_number = r.number("condition_number");
  return e;
}

VanishingLineEstimate vline_estimate_from(const Reader& r) {
  VanishingLineEstimate e;
  const auto l = r.numbers("line");
  if (l.size() != 3) throw SchemaError(r.member("line"), "expected [a, b, c]");
  e.line = {l[0], l[1], l[2]};
  e.rms_residual = r.number("rms_residual");
  e.per_point_residuals = r.numbers("residuals");
  return e;
}

LightSourceEstimate light_from(const Reader& r) {
  LightSourceEstimate e;
  auto hypothesis = [&](const Reader& x) {
    return translate(x.member("hypothesis"),
                     [&] { return light_hypothesis_from_string(x.string("hypothesis")); });
  };
  e.hypothesis = hypothesis(r);
  e.light_projection = projective_from(r, "light_projection");
  e.rms_residual = r.number("rms_residual");
  e.side_violations = r.count("side_violations");
  e.per_constraint_residuals = r.numbers("residuals");
  e.condition_number = r.number("condition_number");
  e.image_half = r.string_or_empty("image_half");
  e.verdict = verdict_from(r.object("verdict"));
  const auto& details = r.array("hypotheses");
  for (std::size_t i = 0; i < details.size(); ++i) {
    const Reader d(details[i], r.member("hypotheses") + "[" + std::to_string(i) + "]");
    e.per_hypothesis_detail.push_back(
        {hypothesis(d), d.boolean("admissible"), d.number("rms_residual"), d.count("side_violations")});
  }
  return e;
}

MirrorConsistencyResult mirror_from(const Reader& r) {
  MirrorConsistencyResult m;
  m.classification = translate(r.member("classification"), [&] {
    return point_class_from_string(r.string("classification"));
  });
  m.intersection = projective_from(r, "intersection");
  m.rms_residual = r.number("rms_residual");
  m.per_constraint_residuals = r.numbers("residuals");
  m.condition_number = r.number("condition_number");
  m.weakly_constrained = r.boolean("weakly_constrained");
  m.verdict = verdict_from(r.object("verdict"));
  return m;
}

// ---- analysis ---------------------------------------------------------

struct GroupResult {
  const LineGroup* group = nullptr;
  std::optional<VanishingPointEstimate> estimate;
};

bool usable(const std::optional<VanishingPointEstimate>& e) {
  return e && e->classification != PointClass::degenerate;
}

}  // namespace

const char* tool_version() { return PF_VERSION; }

const GroupVanishingPoint* AnalysisReport::find_vanishing_point(std::string_view group) const {
  for (const auto& v : vanishing_points) {
    if (v.group == group) return &v;
  }
  return nullptr;
}

const CheckSummary* AnalysisReport::find_check(std::string_view id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

Verdict overall_verdict(const std::vector<CheckSummary>& checks) {
  if (checks.empty()) return Verdict::indeterminate;
  bool all_consistent = true;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::inconsistent) return Verdict::inconsistent;
    if (c.verdict != Verdict::consistent) all_consistent = false;
  }
  return all_consistent ? Verdict::consistent : Verdict::indeterminate;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

AnalysisReport analyze_document(const AnnotationDocument& doc,
                                std::optional<double> tolerance_override) {
  validate_annotations(doc);
  const double tol = tolerance_override ? *tolerance_override
                     : doc.tolerance_px ? *doc.tolerance_px
                                        : kDefaultTolerancePx;
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw ValidationError("tolerance_px", "must be a positive number");
  }

  AnalysisReport report;
  report.tool_version = tool_version();
  report.input_digest = "sha256:" + sha256_hex(serialize_annotations(doc));
  report.image_ref = doc.image_ref;
  report.tolerance_px = tol;

  // Per-group vanishing points.
  std::map<std::string, GroupResult> groups;
  for (const auto& g : doc.line_groups) {
    GroupVanishingPoint out{g.id, std::nullopt, make_indeterminate(tol)};
    std::string note;
    if (g.segments.size() < 2) {
      note = insufficient_note(g.segments.size(), 2);
    } else {
      out.estimate = estimate_vanishing_point(g.segments);
      out.verdict = vanishing_point_verdict(*out.estimate, tol);
      if (out.estimate->classification == PointClass::degenerate) {
        note = "lines do not determine a vanishing point";
      } else if (out.verdict.metrics.contains("weakly_constrained")) {
        note = "two lines always intersect";
      }
    }
    groups[g.id] = {&g, out.estimate};
    report.checks.push_back(summarize("vp:" + g.id, out.verdict, note));
    report.vanishing_points.push_back(std::move(out));
  }

  // Groups expected to share a vanishing point.
  for (const auto& g : doc.line_groups) {
    if (g.aligned_with.empty()) continue;
    const LineGroup& other = *doc.find_group(g.aligned_with);
    SharedVanishingPoint out{g.id, other.id, std::nullopt, make_indeterminate(tol)};
    std::string note;
    if (g.segments.size() < 2 || other.segments.size() < 2) {
      note = insufficient_note(std::min(g.segments.size(), other.segments.size()), 2);
    } else {
      const auto shared = check_shared_vanishing_point(g.segments, other.segments, tol);
      out.verdict = shared.verdict;
      if (shared.joint.classification != PointClass::degenerate) out.joint = shared.joint.location;
    }
    report.checks.push_back(summarize("shared:" + g.id + "~" + other.id, out.verdict, note));
    report.shared_vanishing_points.push_back(std::move(out));
  }

  // Vanishing line per plane group from its reference groups, then each test
  // group's vanishing point against it.
  std::map<std::string, std::vector<const LineGroup*>> planes;
  for (const auto& g : doc.line_groups) {
    if (!g.plane_group.empty()) planes[g.plane_group].push_back(&g);
  }
  for (const auto& [plane, members] : planes) {
    if (members.size() < 2) continue;
    PlaneVanishingLine line{plane, {}, std::nullopt, make_indeterminate(tol)};
    std::vector<ProjectivePoint> points;
    for (const auto* g : members) {
      if (g->role != GroupRole::reference || !usable(groups[g->id].estimate)) continue;
      line.groups.push_back(g->id);
      points.push_back(groups[g->id].estimate->location);
    }
    std::string note;
    if (points.size() < 2) {
      note = insufficient_note(points.size(), 2) + " reference vanishing points";
    } else {
      try {
        line.estimate = fit_vanishing_line(points);
        line.verdict = make_verdict(line.estimate->rms_residual, tol,
                                    line.estimate->per_point_residuals);
        if (points.size() == 2) {
          line.verdict.metrics["weakly_constrained"] = 1.0;
          note = "two points always define a line";
        }
      } catch (const InconsistentDirections& e) {
        line.verdict = make_verdict(std::numeric_limits<double>::infinity(), tol);
        note = e.what();
      } catch (const DegenerateConfiguration& e) {
        note = e.what();
      }
    }
    report.checks.push_back(summarize("vline:" + plane, line.verdict, note));

    for (const auto* g : members) {
      if (g->role != GroupRole::test) continue;
      PointOnLine on{g->id, plane, make_indeterminate(tol)};
      std::string on_note;
      if (!line.estimate) {
        on_note = "no vanishing line for plane group '" + plane + "'";
      } else if (!usable(groups[g->id].estimate)) {
        on_note = "no vanishing point for group '" + g->id + "'";
      } else {
        on.verdict = check_point_on_line(groups[g->id].estimate->location, *line.estimate, tol);
      }
      report.checks.push_back(summarize("on-line:" + g->id, on.verdict, on_note));
      report.on_line.push_back(std::move(on));
    }
    report.vanishing_lines.push_back(std::move(line));
  }

  if (!doc.shadow_pairs.empty()) {
    ShadowSection s{std::nullopt, make_indeterminate(tol)};
    std::string note;
    if (doc.shadow_pairs.size() < 2) {
      note = insufficient_note(doc.shadow_pairs.size(), 2);
    } else {
      s.estimate = analyze_shadows(doc.shadow_pairs, tol, doc.image_size.height);
      s.verdict = s.estimate->verdict;
      note = std::string("hypothesis ") + to_string(s.estimate->hypothesis);
    }
    report.checks.push_back(summarize("shadows", s.verdict, note));
    report.shadows = std::move(s);
  }

  if (!doc.reflection_pairs.empty()) {
    ReflectionSection r{std::nullopt, make_indeterminate(tol)};
    std::string note;
    if (doc.reflection_pairs.size() < 2) {
      note = insufficient_note(doc.reflection_pairs.size(), 2);
    } else {
      r.result = analyze_reflections(doc.reflection_pairs, tol);
      r.verdict = r.result->verdict;
      if (r.result->weakly_constrained) note = "two lines always intersect";
    }
    report.checks.push_back(summarize("reflections", r.verdict, note));
    report.reflections = std::move(r);
  }

  report.overall = overall_verdict(report.checks);
  return report;
}

Json to_json(const ProjectivePoint& p) {
  return Json::array({number_to_json(p.hx()), number_to_json(p.hy()), number_to_json(p.hw())});
}

Json to_json(const ConsistencyVerdict& v) {
  Json metrics = Json::object();
  for (const auto& [k, x] : v.metrics) metrics[k] = number_to_json(x);
  return {{"verdict", to_string(v.verdict)},
          {"score", number_to_json(v.score)},
          {"tolerance", number_to_json(v.tolerance)},
          {"residuals", numbers_json(v.detail)},
          {"metrics", metrics}};
}

Json to_json(const VanishingPointEstimate& e) {
  return {{"classification", to_string(e.classification)},
          {"location", to_json(e.location)},
          {"rms_residual", number_to_json(e.rms_residual)},
          {"residuals", numbers_json(e.per_line_residuals)},
          {"condition_number", number_to_json(e.condition_number)}};
}

Json to_json(const VanishingLineEstimate& e) {
  return {{"line", Json::array({number_to_json(e.line.a), number_to_json(e.line.b),
                                number_to_json(e.line.c)})},
          {"rms_residual", number_to_json(e.rms_residual)},
          {"residuals", numbers_json(e.per_point_residuals)}};
}

Json to_json(const LightSourceEstimate& e) {
  Json details = Json::array();
  for (const auto& d : e.per_hypothesis_detail) {
    details.push_back({{"hypothesis", to_string(d.hypothesis)},
                       {"admissible", d.admissible},
                       {"rms_residual", number_to_json(d.rms_residual)},
                       {"side_violations", d.side_violations}});
  }
  Json j = {{"hypothesis", to_string(e.hypothesis)},
            {"light_projection", to_json(e.light_projection)},
            {"rms_residual", number_to_json(e.rms_residual)},
            {"side_violations", e.side_violations},
            {"residuals", numbers_json(e.per_constraint_residuals)},
            {"condition_number", number_to_json(e.condition_number)},
            {"verdict", to_json(e.verdict)},
            {"hypotheses", details}};
  if (!e.image_half.empty()) j["image_half"] = e.image_half;
  return j;
}

Json to_json(const MirrorConsistencyResult& r) {
  return {{"classification", to_string(r.classification)},
          {"intersection", to_json(r.intersection)},
          {"rms_residual", number_to_json(r.rms_residual)},
          {"residuals", numbers_json(r.per_constraint_residuals)},
          {"condition_number", number_to_json(r.condition_number)},
          {"weakly_constrained", r.weakly_constrained},
          {"verdict", to_json(r.verdict)}};
}

Json report_to_json(const AnalysisReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json j = {{"id", c.id},
              {"verdict", to_string(c.verdict)},
              {"score", number_to_json(c.score)},
              {"tolerance", number_to_json(c.tolerance)}};
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }

  Json vps = Json::array();
  for (const auto& v : report.vanishing_points) {
    vps.push_back({{"group", v.group},
                   {"estimate", v.estimate ? to_json(*v.estimate) : Json()},
                   {"verdict", to_json(v.verdict)}});
  }
  Json shared = Json::array();
  for (const auto& s : report.shared_vanishing_points) {
    shared.push_back({{"group", s.group},
                      {"aligned_with", s.aligned_with},
                      {"joint", s.joint ? to_json(*s.joint) : Json()},
                      {"verdict", to_json(s.verdict)}});
  }
  Json lines = Json::array();
  for (const auto& l : report.vanishing_lines) {
    lines.push_back({{"plane_group", l.plane_group},
                     {"groups", l.groups},
                     {"estimate", l.estimate ? to_json(*l.estimate) : Json()},
                     {"verdict", to_json(l.verdict)}});
  }
  Json on_line = Json::array();
  for (const auto& o : report.on_line) {
    on_line.push_back(
        {{"group", o.group}, {"plane_group", o.plane_group}, {"verdict", to_json(o.verdict)}});
  }

  Json j = {{"schema_version", kReportSchema},
            {"tool_version", report.tool_version},
            {"input_digest", report.input_digest},
            {"image_ref", report.image_ref},
            {"tolerance_px", number_to_json(report.tolerance_px)},
            {"overall_verdict", to_string(report.overall)},
            {"checks", checks},
            {"vanishing_points", vps},
            {"shared_vanishing_points", shared},
            {"vanishing_lines", lines},
            {"on_line", on_line}};
  j["shadows"] = report.shadows
                     ? Json{{"estimate", report.shadows->estimate
                                             ? to_json(*report.shadows->estimate)
                                             : Json()},
                            {"verdict", to_json(report.shadows->verdict)}}
                     : Json();
  j["reflections"] = report.reflections
                         ? Json{{"result", report.reflections->result
                                               ? to_json(*report.reflections->result)
                                               : Json()},
                                {"verdict", to_json(report.reflections->verdict)}}
                         : Json();
  return j;
}

AnalysisReport report_from_json(const Json& j) {
  const Reader root(j, "$");
  if (root.string("schema_version") != kReportSchema) {
    throw SchemaError("schema_version", "unsupported report version");
  }
  AnalysisReport r;
  r.tool_version = root.string("tool_version");
  r.input_digest = root.string("input_digest");
  r.image_ref = root.string("image_ref");
  r.tolerance_px = root.number("tolerance_px");
  r.overall = translate("overall_verdict",
                        [&] { return verdict_from_string(root.string("overall_verdict")); });

  auto each = [&](const std::string& key, auto&& fn) {
    const auto& a = root.array(key);
    for (std::size_t i = 0; i < a.size(); ++i) fn(Reader(a[i], key + "[" + std::to_string(i) + "]"));
  };
  each("checks", [&](const Reader& c) {
    r.checks.push_back(
        {c.string("id"),
         translate(c.member("verdict"), [&] { return verdict_from_string(c.string("verdict")); }),
         c.number("score"), c.number("tolerance"), c.string_or_empty("note")});
  });
  each("vanishing_points", [&](const Reader& v) {
    GroupVanishingPoint g{v.string("group"), std::nullopt, verdict_from(v.object("verdict"))};
    if (v.has("estimate")) g.estimate = vp_estimate_from(v.object("estimate"));
    r.vanishing_points.push_back(std::move(g));
  });
  each("shared_vanishing_points", [&](const Reader& v) {
    SharedVanishingPoint s{v.string("group"), v.string("aligned_with"), std::nullopt,
                           verdict_from(v.object("verdict"))};
    if (v.has("joint")) s.joint = projective_from(v, "joint");
    r.shared_vanishing_points.push_back(std::move(s));
  });
  each("vanishing_lines", [&](const Reader& v) {
    PlaneVanishingLine l{v.string("plane_group"), {}, std::nullopt,
                         verdict_from(v.object("verdict"))};
    const auto& names = v.array("groups");
    for (const auto& n : names) {
      if (!n.is_string()) throw SchemaError(v.member("groups"), "expected strings");
      l.groups.push_back(n.get<std::string>());
    }
    if (v.has("estimate")) l.estimate = vline_estimate_from(v.object("estimate"));
    r.vanishing_lines.push_back(std::move(l));
  });
  each("on_line", [&](const Reader& v) {
    r.on_line.push_back(
        {v.string("group"), v.string("plane_group"), verdict_from(v.object("verdict"))});
  });
  if (root.has("shadows")) {
    const Reader s = root.object("shadows");
    ShadowSection section{std::nullopt, verdict_from(s.object("verdict"))};
    if (s.has("estimate")) section.estimate = light_from(s.object("estimate"));
    r.shadows = std::move(section);
  }
  if (root.has("reflections")) {
    const Reader s = root.object("reflections");
    ReflectionSection section{std::nullopt, verdict_from(s.object("verdict"))};
    if (s.has("result")) section.result = mirror_from(s.object("result"));
    r.reflections = std::move(section);
  }
  return r;
}

std::string write_report(const AnalysisReport& report) {
  return write_canonical(report_to_json(report));
}

AnalysisReport parse_report(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0, e.byte);
  }
  return report_from_json(j);
}

std::string summary_line(const CheckSummary& check) {
  std::string score = format_number(check.score);
  std::string tol = format_number(check.tolerance);
  auto unquote = [](std::string& s) {
    if (!s.empty() && s.front() == '"') s = s.substr(1, s.size() - 2);
  };
  unquote(score);
  unquote(tol);
  return "CHECK " + check.id + " " + to_string(check.verdict) + " score=" + score + " tol=" + tol;
}

int exit_status(Verdict overall) {
  switch (overall) {
    case Verdict::consistent: return 0;
    case Verdict::inconsistent: return 1;
    case Verdict::indeterminate: return 2;
  }
  return 2;
}

}  // namespace pf
