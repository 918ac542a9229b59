#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pf/geometry.hpp"
#include "pf/reflections.hpp"
#include "pf/shadows.hpp"

namespace pf {

inline constexpr const char* kSchemaVersion = "v1";

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Reference groups define their plane group's vanishing line; test groups
/// are checked against it.
enum class GroupRole { reference, test };

const char* to_string(GroupRole r);

struct LineGroup {
  std::string id;
  std::vector<LineSegment> segments;
  std::string plane_group;   // empty: not part of any plane group
  GroupRole role = GroupRole::reference;
  std::string aligned_with;  // group expected to share this group's vanishing point

  friend bool operator==(const LineGroup&, const LineGroup&) = default;
};

struct AnnotationDocument {
  std::string image_ref;
  ImageSize image_size;
  std::vector<LineGroup> line_groups;
  std::vector<ShadowConstraint> shadow_pairs;
  std::vector<ReflectionConstraint> reflection_pairs;
  std::optional<double> tolerance_px;

  const LineGroup* find_group(std::string_view id) const;

  friend bool operator==(const AnnotationDocument&, const AnnotationDocument&) = default;
};

/// Parses and validates an annotation document (JSON, schema "v1").
/// Throws ParseError for malformed text, SchemaError for structural
/// problems (unknown or missing fields, wrong types, duplicate ids) and
/// ValidationError for geometric invariant violations.
AnnotationDocument parse_annotations(std::string_view text);

/// Checks the document invariants; throws SchemaError / ValidationError.
void validate_annotations(const AnnotationDocument& doc);

std::string serialize_annotations(const AnnotationDocument& doc);

}  // namespace pf
