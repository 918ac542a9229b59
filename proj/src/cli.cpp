#include "pf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "pf/analysis.hpp"
#include "pf/errors.hpp"
#include "pf/overlay.hpp"
#include "pf/scene.hpp"

namespace pf::cli {

namespace {

constexpr int kStatusError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

int run_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.tolerance_px && !(*options.tolerance_px > 0.0)) {
      throw ValidationError("--tolerance-px", "must be positive");
    }
    const auto doc = parse_annotations(read_file(options.input));
    const auto report = analyze_document(doc, options.tolerance_px);
    if (!options.report_path.empty()) write_file(options.report_path, write_report(report));
    if (!options.overlay_path.empty()) {
      write_file(options.overlay_path, render_overlay(doc, report));
    }
    for (const auto& check : report.checks) out << summary_line(check) << '\n';
    for (const auto& check : report.checks) {
      if (check.verdict == Verdict::inconsistent) err << "inconsistent: " << check.id << '\n';
    }
    return exit_status(report.overall);
  } catch (const std::exception& e) {
    err << "pf analyze: " << e.what() << '\n';
    return kStatusError;
  }
}

int run_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  try {
    SceneSpec spec;
    spec.scene_template = scene_template_from_string(options.scene_template);
    spec.seed = options.seed;
    spec.noise_sigma = options.noise_px;
    spec.inject_yaw_deg = options.inject_yaw_deg;
    spec.inject_shift_px = options.inject_shift_px;
    const auto scene = generate_scene(spec);

    const std::filesystem::path dir(options.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "annotations.json", serialize_annotations(scene.annotations));
    write_file(dir / "ground_truth.json", serialize_ground_truth(scene));
    (void)out;
    return 0;
  } catch (const std::exception& e) {
    err << "pf synth: " << e.what() << '\n';
    return kStatusError;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric consistency checks for annotated images", "pf"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  double tolerance = 0.0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze an annotation document");
  analyze_cmd->add_option("file", analyze.input, "Annotation document (JSON)")->required();
  auto* tol_opt = analyze_cmd->add_option("--tolerance-px", tolerance, "Tolerance in pixels");
  analyze_cmd->add_option("--report", analyze.report_path, "Write the JSON report here");
  analyze_cmd->add_option("--overlay", analyze.overlay_path, "Write an SVG overlay here");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic annotated scene");
  synth_cmd->add_option("--template", synth.scene_template,
                        "tiled-floor, cubes-shadows or mirror-boxes")
      ->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--noise-px", synth.noise_px, "Endpoint noise sigma in pixels");
  synth_cmd->add_option("--inject-yaw-deg", synth.inject_yaw_deg,
                        "Counter-top misalignment (tiled-floor)");
  synth_cmd->add_option("--inject-shift-px", synth.inject_shift_px,
                        "Shift of the first shadow or reflection pair");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink;
    app.exit(e, sink, err);
    return kStatusError;
  }

  if (analyze_cmd->parsed()) {
    if (tol_opt->count() > 0) analyze.tolerance_px = tolerance;
    return run_analyze(analyze, out, err);
  }
  return run_synth(synth, out, err);
}

}  // namespace pf::cli
