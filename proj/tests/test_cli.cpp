#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "pf/analysis.hpp"
#include "pf/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run pf_main(std::vector<std::string> args) {
  args.insert(args.begin(), "pf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = pf::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pf-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("synth then analyze: clean scenes exit 0") {
  const auto dir = scratch("clean");
  for (const char* t : {"tiled-floor", "cubes-shadows", "mirror-boxes"}) {
    const auto out = dir / t;
    auto r = pf_main({"synth", "--template", t, "--seed", "11", "--out", out.string()});
    REQUIRE(r.status == 0);
    CHECK(fs::exists(out / "annotations.json"));
    CHECK(fs::exists(out / "ground_truth.json"));

    r = pf_main({"analyze", (out / "annotations.json").string(), "--report",
                 (out / "report.json").string(), "--overlay", (out / "overlay.svg").string()});
    CHECK(r.status == 0);
    CHECK(r.err.empty());
    CHECK(r.out.rfind("CHECK ", 0) == 0);
    CHECK(r.out.find(" inconsistent ") == std::string::npos);
    CHECK(pf::parse_report(slurp(out / "report.json")).overall == pf::Verdict::consistent);
    CHECK(slurp(out / "overlay.svg").rfind("<?xml", 0) == 0);
  }
}

TEST_CASE("injected inconsistencies exit 1 and are named") {
  const auto dir = scratch("injected");
  auto r = pf_main({"synth", "--template", "tiled-floor", "--seed", "3", "--inject-yaw-deg", "8",
                    "--out", (dir / "yaw").string()});
  REQUIRE(r.status == 0);
  r = pf_main({"analyze", (dir / "yaw" / "annotations.json").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("inconsistent: on-line:counter") != std::string::npos);
  CHECK(r.out.find("CHECK on-line:counter inconsistent") != std::string::npos);

  r = pf_main({"synth", "--template", "cubes-shadows", "--seed", "3", "--inject-shift-px", "20",
               "--out", (dir / "shift").string()});
  REQUIRE(r.status == 0);
  r = pf_main({"analyze", (dir / "shift" / "annotations.json").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("inconsistent: shadows") != std::string::npos);
}

TEST_CASE("tolerance flag overrides the document") {
  const auto dir = scratch("tolerance");
  pf_main({"synth", "--template", "mirror-boxes", "--seed", "2", "--inject-shift-px", "20",
           "--out", dir.string()});
  const auto doc = (dir / "annotations.json").string();
  CHECK(pf_main({"analyze", doc}).status == 1);
  const auto r = pf_main({"analyze", doc, "--tolerance-px", "1000"});
  CHECK(r.status == 0);
  CHECK(r.out.find("tol=1000") != std::string::npos);
  CHECK(pf_main({"analyze", doc, "--tolerance-px", "0"}).status == 2);
  CHECK(pf_main({"analyze", doc, "--tolerance-px", "-3"}).status == 2);
}

TEST_CASE("input errors exit 2") {
  const auto dir = scratch("errors");
  auto r = pf_main({"analyze", (dir / "missing.json").string()});
  CHECK(r.status == 2);
  CHECK(r.err.rfind("pf analyze: ", 0) == 0);

  std::ofstream(dir / "bad.json") << "{ not json";
  r = pf_main({"analyze", (dir / "bad.json").string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("line 1") != std::string::npos);

  std::ofstream(dir / "v2.json") << R"({"schema_version": "v2", "image_size": {"width": 1, "height": 1}})";
  CHECK(pf_main({"analyze", (dir / "v2.json").string()}).status == 2);

  r = pf_main({"synth", "--template", "teapots", "--seed", "1", "--out", dir.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("teapots") != std::string::npos);

  CHECK(pf_main({}).status == 2);
  CHECK(pf_main({"frobnicate"}).status == 2);
  CHECK(pf_main({"synth", "--seed", "1"}).status == 2);
  CHECK(pf_main({"analyze", "x.json", "--tolerance-px", "abc"}).status == 2);
  CHECK(pf_main({"--help"}).status == 0);
}

TEST_CASE("indeterminate documents exit 2") {
  const auto dir = scratch("indeterminate");
  std::ofstream(dir / "empty.json") << R"({"schema_version": "v1", "image_size": {"width": 10, "height": 10}})";
  const auto r = pf_main({"analyze", (dir / "empty.json").string()});
  CHECK(r.status == 2);
  CHECK(r.out.empty());
}

TEST_CASE("synth is deterministic") {
  const auto dir = scratch("determinism");
  for (const char* t : {"tiled-floor", "cubes-shadows", "mirror-boxes"}) {
    for (const char* sub : {"a", "b"}) {
      REQUIRE(pf_main({"synth", "--template", t, "--seed", "99", "--noise-px", "0.5", "--out",
                       (dir / t / sub).string()})
                  .status == 0);
      pf_main({"analyze", (dir / t / sub / "annotations.json").string(), "--report",
               (dir / t / sub / "report.json").string(), "--overlay",
               (dir / t / sub / "overlay.svg").string()});
    }
    for (const char* file : {"annotations.json", "ground_truth.json", "report.json", "overlay.svg"}) {
      CHECK_MESSAGE(slurp(dir / t / "a" / file) == slurp(dir / t / "b" / file), t, "/", file);
    }
  }
}

TEST_CASE("fixtures reproduce through the command line") {
  const auto dir = scratch("fixtures");
  std::ifstream list(std::string(PF_FIXTURES_DIR) + "/index.txt");
  std::string name;
  int n = 0;
  while (std::getline(list, name)) {
    if (name.empty()) continue;
    const fs::path fixture = fs::path(PF_FIXTURES_DIR) / name;
    const auto r = pf_main({"analyze", (fixture / "annotations.json").string(), "--report",
                            (dir / "report.json").string(), "--overlay",
                            (dir / "overlay.svg").string()});
    CHECK(r.status == pf::exit_status(pf::parse_report(slurp(fixture / "expected_report.json")).overall));
    CHECK_MESSAGE(slurp(dir / "report.json") == slurp(fixture / "expected_report.json"), name);
    CHECK_MESSAGE(slurp(dir / "overlay.svg") == slurp(fixture / "overlay.svg"), name);
    CHECK_MESSAGE(r.out == slurp(fixture / "summary.txt"), name);
    ++n;
  }
  CHECK(n >= 3);
}
