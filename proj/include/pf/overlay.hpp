#pragma once

#include <string>

#include "pf/analysis.hpp"
#include "pf/annotations.hpp"

namespace pf {

/// SVG 1.1 drawing of the annotations and the analysis results: segments
/// extended to their finite vanishing points, vanishing points as circles,
/// vanishing lines, and shadow/reflection constraint lines extended to their
/// estimated intersection. The canvas grows to include every finite
/// estimated point; the image rectangle is always drawn first.
///
/// Marker classes: "vp" (plus "off-line" when the group failed its
/// vanishing-line check), "light", "mirror-vp"; each also carries its
/// verdict ("consistent", "inconsistent", "indeterminate").
std::string render_overlay(const AnnotationDocument& doc, const AnalysisReport& report);

}  // namespace pf
