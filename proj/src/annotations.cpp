#include "pf/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pf/canonical_json.hpp"
#include "pf/errors.hpp"

namespace pf {

namespace {

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Object reader that tracks its JSON path and rejects unknown members.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "$" : path_, "expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed.contains(it.key())) throw SchemaError(member(it.key()), "unknown field");
    }
  }

  std::string member(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

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

  std::string string_or(const std::string& key, std::string fallback) const {
    return has(key) ? string(key) : fallback;
  }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw SchemaError(member(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(member(key), "expected an integer");
    return v.get<int>();
  }

  const Json& array_or_empty(const std::string& key) const {
    static const Json empty = Json::array();
    if (!has(key)) return empty;
    const auto& v = j_[key];
    if (!v.is_array()) throw SchemaError(member(key), "expected an array");
    return v;
  }

 private:
  const Json& j_;
  std::string path_;
};

std::vector<double> numbers(const Json& j, const std::string& path, std::size_t count) {
  if (!j.is_array() || j.size() != count) {
    throw SchemaError(path, "expected an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!j[i].is_number()) throw SchemaError(index_path(path, i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Point2 point_from(const Json& j, const std::string& path) {
  const auto v = numbers(j, path, 2);
  return {v[0], v[1]};
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

GroupRole role_from(const std::string& s, const std::string& path) {
  if (s == "reference") return GroupRole::reference;
  if (s == "test") return GroupRole::test;
  throw SchemaError(path, "expected \"reference\" or \"test\"");
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

const char* to_string(GroupRole r) { return r == GroupRole::test ? "test" : "reference"; }

const LineGroup* AnnotationDocument::find_group(std::string_view id) const {
  for (const auto& g : line_groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

AnnotationDocument parse_annotations(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }

  ObjectReader root(j, "",
                    {"schema_version", "image_ref", "image_size", "tolerance_px", "line_groups",
                     "shadow_pairs", "reflection_pairs"});
  const std::string version = root.string("schema_version");
  if (version != kSchemaVersion) {
    throw SchemaError("schema_version", "unsupported schema version '" + version + "'");
  }

  AnnotationDocument doc;
  doc.image_ref = root.string_or("image_ref", "");
  {
    ObjectReader size(root.at("image_size"), "image_size", {"width", "height"});
    doc.image_size = {size.integer("width"), size.integer("height")};
  }
  if (root.has("tolerance_px")) doc.tolerance_px = root.number("tolerance_px");

  const auto& groups = root.array_or_empty("line_groups");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string path = index_path("line_groups", i);
    ObjectReader g(groups[i], path, {"id", "segments", "plane_group", "role", "aligned_with"});
    LineGroup group;
    group.id = g.string("id");
    group.plane_group = g.string_or("plane_group", "");
    group.role = role_from(g.string_or("role", "reference"), g.member("role"));
    group.aligned_with = g.string_or("aligned_with", "");
    const auto& segs = g.at("segments");
    if (!segs.is_array()) throw SchemaError(g.member("segments"), "expected an array");
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto v = numbers(segs[k], index_path(g.member("segments"), k), 4);
      group.segments.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
    doc.line_groups.push_back(std::move(group));
  }

  const auto& shadows = root.array_or_empty("shadow_pairs");
  for (std::size_t i = 0; i < shadows.size(); ++i) {
    const std::string path = index_path("shadow_pairs", i);
    ObjectReader s(shadows[i], path, {"label", "object_point", "shadow_point"});
    doc.shadow_pairs.push_back({point_from(s.at("object_point"), s.member("object_point")),
                                point_from(s.at("shadow_point"), s.member("shadow_point")),
                                s.string("label")});
  }

  const auto& reflections = root.array_or_empty("reflection_pairs");
  for (std::size_t i = 0; i < reflections.size(); ++i) {
    const std::string path = index_path("reflection_pairs", i);
    ObjectReader r(reflections[i], path, {"label", "scene_point", "reflection_point"});
    doc.reflection_pairs.push_back(
        {point_from(r.at("scene_point"), r.member("scene_point")),
         point_from(r.at("reflection_point"), r.member("reflection_point")), r.string("label")});
  }

  validate_annotations(doc);
  return doc;
}

void validate_annotations(const AnnotationDocument& doc) {
  // Identifier uniqueness is structural.
  {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.line_groups.size(); ++i) {
      const auto& id = doc.line_groups[i].id;
      if (id.empty()) throw SchemaError(index_path("line_groups", i) + ".id", "must not be empty");
      if (!seen.insert(id).second) {
        throw SchemaError(index_path("line_groups", i) + ".id", "duplicate group id '" + id + "'");
      }
    }
  }
  auto unique_labels = [](const auto& pairs, const std::string& base) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!seen.insert(pairs[i].label).second) {
        throw SchemaError(index_path(base, i) + ".label",
                          "duplicate label '" + pairs[i].label + "'");
      }
    }
  };
  unique_labels(doc.shadow_pairs, "shadow_pairs");
  unique_labels(doc.reflection_pairs, "reflection_pairs");

  const auto& size = doc.image_size;
  if (size.width <= 0 || size.height <= 0) {
    throw ValidationError("image_size", "width and height must be positive");
  }
  if (doc.tolerance_px && !(std::isfinite(*doc.tolerance_px) && *doc.tolerance_px > 0.0)) {
    throw ValidationError("tolerance_px", "must be a positive number");
  }

  // Annotations may extend past the image, but not arbitrarily far.
  const double reach = 10.0 * std::max(size.width, size.height);
  auto check_point = [&](Point2 p, const std::string& path) {
    const bool inside = std::isfinite(p.x) && std::isfinite(p.y) && p.x >= -reach &&
                        p.x <= size.width + reach && p.y >= -reach &&
                        p.y <= size.height + reach;
    if (!inside) throw ValidationError(path, "coordinate outside the annotated region");
  };

  for (std::size_t i = 0; i < doc.line_groups.size(); ++i) {
    const auto& g = doc.line_groups[i];
    const std::string path = index_path("line_groups", i);
    for (std::size_t k = 0; k < g.segments.size(); ++k) {
      const std::string seg_path = index_path(path + ".segments", k);
      check_point(g.segments[k].p, seg_path);
      check_point(g.segments[k].q, seg_path);
      if (!(g.segments[k].length() > kSegmentEpsilon)) {
        throw ValidationError(seg_path, "degenerate segment");
      }
    }
    if (!g.aligned_with.empty()) {
      if (g.aligned_with == g.id || doc.find_group(g.aligned_with) == nullptr) {
        throw ValidationError(path + ".aligned_with",
                              "must name another existing group, got '" + g.aligned_with + "'");
      }
    }
  }
  for (std::size_t i = 0; i < doc.shadow_pairs.size(); ++i) {
    const auto& c = doc.shadow_pairs[i];
    const std::string path = index_path("shadow_pairs", i);
    check_point(c.object_point, path + ".object_point");
    check_point(c.shadow_point, path + ".shadow_point");
    if (!(distance(c.object_point, c.shadow_point) > kSegmentEpsilon)) {
      throw ValidationError(path, "object and shadow points coincide");
    }
  }
  for (std::size_t i = 0; i < doc.reflection_pairs.size(); ++i) {
    const auto& c = doc.reflection_pairs[i];
    const std::string path = index_path("reflection_pairs", i);
    check_point(c.scene_point, path + ".scene_point");
    check_point(c.reflection_point, path + ".reflection_point");
    if (!(distance(c.scene_point, c.reflection_point) > kSegmentEpsilon)) {
      throw ValidationError(path, "scene and reflection points coincide");
    }
  }
}

std::string serialize_annotations(const AnnotationDocument& doc) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["image_ref"] = doc.image_ref;
  j["image_size"] = {{"width", doc.image_size.width}, {"height", doc.image_size.height}};
  if (doc.tolerance_px) j["tolerance_px"] = *doc.tolerance_px;

  Json groups = Json::array();
  for (const auto& g : doc.line_groups) {
    Json segs = Json::array();
    for (const auto& s : g.segments) segs.push_back({s.p.x, s.p.y, s.q.x, s.q.y});
    Json group = {{"id", g.id}, {"role", to_string(g.role)}, {"segments", segs}};
    if (!g.plane_group.empty()) group["plane_group"] = g.plane_group;
    if (!g.aligned_with.empty()) group["aligned_with"] = g.aligned_with;
    groups.push_back(std::move(group));
  }
  j["line_groups"] = std::move(groups);

  Json shadows = Json::array();
  for (const auto& c : doc.shadow_pairs) {
    shadows.push_back({{"label", c.label},
                       {"object_point", point_json(c.object_point)},
                       {"shadow_point", point_json(c.shadow_point)}});
  }
  j["shadow_pairs"] = std::move(shadows);

  Json reflections = Json::array();
  for (const auto& c : doc.reflection_pairs) {
    reflections.push_back({{"label", c.label},
                           {"reflection_point", point_json(c.reflection_point)},
                           {"scene_point", point_json(c.scene_point)}});
  }
  j["reflection_pairs"] = std::move(reflections);
  return write_canonical(j, NumberFormat::exact);
}

}  // namespace pf
