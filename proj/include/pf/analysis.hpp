#pragma once

// Runs every check an annotation document supplies constraints for and
// collects the results into a report with a canonical text form.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pf/annotations.hpp"
#include "pf/canonical_json.hpp"
#include "pf/geometry.hpp"
#include "pf/reflections.hpp"
#include "pf/shadows.hpp"

namespace pf {

const char* tool_version();

struct CheckSummary {
  std::string id;  // "vp:<group>", "shared:<a>~<b>", "vline:<plane>", "on-line:<group>", ...
  Verdict verdict = Verdict::indeterminate;
  double score = 0.0;
  double tolerance = 0.0;
  std::string note;

  friend bool operator==(const CheckSummary&, const CheckSummary&) = default;
};

struct GroupVanishingPoint {
  std::string group;
  std::optional<VanishingPointEstimate> estimate;  // absent when it could not be computed
  ConsistencyVerdict verdict;

  friend bool operator==(const GroupVanishingPoint&, const GroupVanishingPoint&) = default;
};

struct SharedVanishingPoint {
  std::string group;
  std::string aligned_with;
  std::optional<ProjectivePoint> joint;
  ConsistencyVerdict verdict;

  friend bool operator==(const SharedVanishingPoint&, const SharedVanishingPoint&) = default;
};

struct PlaneVanishingLine {
  std::string plane_group;
  std::vector<std::string> groups;  // reference groups whose points were fitted
  std::optional<VanishingLineEstimate> estimate;
  ConsistencyVerdict verdict;

  friend bool operator==(const PlaneVanishingLine&, const PlaneVanishingLine&) = default;
};

struct PointOnLine {
  std::string group;
  std::string plane_group;
  ConsistencyVerdict verdict;

  friend bool operator==(const PointOnLine&, const PointOnLine&) = default;
};

struct ShadowSection {
  std::optional<LightSourceEstimate> estimate;
  ConsistencyVerdict verdict;

  friend bool operator==(const ShadowSection&, const ShadowSection&) = default;
};

struct ReflectionSection {
  std::optional<MirrorConsistencyResult> result;
  ConsistencyVerdict verdict;

  friend bool operator==(const ReflectionSection&, const ReflectionSection&) = default;
};

struct AnalysisReport {
  std::string tool_version;
  std::string input_digest;  // "sha256:<hex>" of the canonical document
  std::string image_ref;
  double tolerance_px = kDefaultTolerancePx;
  Verdict overall = Verdict::indeterminate;
  std::vector<CheckSummary> checks;
  std::vector<GroupVanishingPoint> vanishing_points;
  std::vector<SharedVanishingPoint> shared_vanishing_points;
  std::vector<PlaneVanishingLine> vanishing_lines;
  std::vector<PointOnLine> on_line;
  std::optional<ShadowSection> shadows;
  std::optional<ReflectionSection> reflections;

  const GroupVanishingPoint* find_vanishing_point(std::string_view group) const;
  const CheckSummary* find_check(std::string_view id) const;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// Consistent iff every check is consistent; inconsistent if any is;
/// otherwise (including no checks at all) indeterminate.
Verdict overall_verdict(const std::vector<CheckSummary>& checks);

/// Tolerance precedence: explicit override, then the document, then 3 px.
AnalysisReport analyze_document(const AnnotationDocument& doc,
                                std::optional<double> tolerance_override = std::nullopt);

std::string sha256_hex(std::string_view data);

Json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const Json& j);  // throws SchemaError

std::string write_report(const AnalysisReport& report);
AnalysisReport parse_report(std::string_view text);  // throws ParseError / SchemaError

/// Section writers shared with the partial-analysis endpoint.
Json to_json(const ConsistencyVerdict& v);
Json to_json(const VanishingPointEstimate& e);
Json to_json(const VanishingLineEstimate& e);
Json to_json(const LightSourceEstimate& e);
Json to_json(const MirrorConsistencyResult& r);
Json to_json(const ProjectivePoint& p);

/// Stable one-line summary: "CHECK <id> <verdict> score=<px> tol=<px>".
std::string summary_line(const CheckSummary& check);

/// Process exit status for a verdict: 0 consistent, 1 inconsistent, 2 otherwise.
int exit_status(Verdict overall);

}  // namespace pf
