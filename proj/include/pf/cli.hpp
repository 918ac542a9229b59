#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace pf::cli {

struct AnalyzeOptions {
  std::string input;
  std::optional<double> tolerance_px;
  std::string report_path;   // empty: no report file
  std::string overlay_path;  // empty: no overlay
};

struct SynthOptions {
  std::string scene_template;
  std::uint64_t seed = 0;
  double noise_px = 0.0;
  double inject_yaw_deg = 0.0;
  double inject_shift_px = 0.0;
  std::string out_dir;
};

/// Prints one "CHECK ..." line per check to `out`, diagnostics to `err`.
/// Returns 0 (consistent), 1 (inconsistent) or 2 (indeterminate / error).
int run_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

/// Writes annotations.json and ground_truth.json into the output directory.
int run_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

/// Full command line: `analyze ...` or `synth ...`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pf::cli
