#include <doctest.h>

#include <string>

#include "pf/annotations.hpp"
#include "pf/errors.hpp"
#include "pf/scene.hpp"
#include "support.hpp"

using namespace pf;

namespace {

const char* kMinimal = R"({
  "schema_version": "v1",
  "image_ref": "kitchen.jpg",
  "image_size": {"width": 640, "height": 480},
  "line_groups": [
    {"id": "floor-x", "segments": [[10, 400, 200, 300], [30, 460, 260, 330]]}
  ]
})";

std::string with_groups(const std::string& groups) {
  return R"({"schema_version": "v1", "image_size": {"width": 640, "height": 480},
             "line_groups": )" +
         groups + "}";
}

template <typename E>
std::string field_of(const std::string& text) {
  try {
    parse_annotations(text);
  } catch (const E& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("minimal document") {
  const auto doc = parse_annotations(kMinimal);
  CHECK(doc.image_ref == "kitchen.jpg");
  CHECK(doc.image_size == ImageSize{640, 480});
  REQUIRE(doc.line_groups.size() == 1);
  const auto& g = doc.line_groups[0];
  CHECK(g.id == "floor-x");
  CHECK(g.role == GroupRole::reference);
  CHECK(g.plane_group.empty());
  REQUIRE(g.segments.size() == 2);
  CHECK(g.segments[1].q == Point2{260, 330});
  CHECK(doc.shadow_pairs.empty());
  CHECK(doc.reflection_pairs.empty());
  CHECK_FALSE(doc.tolerance_px.has_value());
  CHECK(doc.find_group("floor-x") == &g);
  CHECK(doc.find_group("nope") == nullptr);
}

TEST_CASE("duplicate group ids name the second occurrence") {
  const auto text = with_groups(R"([
    {"id": "a", "segments": [[0, 0, 10, 10]]},
    {"id": "a", "segments": [[0, 5, 10, 15]]}])");
  CHECK(field_of<SchemaError>(text) == "line_groups[1].id");
}

TEST_CASE("schema violations name the field") {
  CHECK(field_of<SchemaError>(R"({"schema_version": "v2", "image_size": {"width": 1, "height": 1}})") ==
        "schema_version");
  CHECK(field_of<SchemaError>(R"({"image_size": {"width": 1, "height": 1}})") == "schema_version");
  CHECK(field_of<SchemaError>(R"({"schema_version": "v1"})") == "image_size");
  CHECK(field_of<SchemaError>(
            R"({"schema_version": "v1", "image_size": {"width": 1, "height": 1}, "colour": 3})") ==
        "colour");
  CHECK(field_of<SchemaError>(with_groups(R"([{"id": "a", "segments": [[0, 0, 10]]}])")) ==
        "line_groups[0].segments[0]");
  CHECK(field_of<SchemaError>(with_groups(R"([{"id": "a", "segments": [[0, 0, 10, "x"]]}])")) ==
        "line_groups[0].segments[0][3]");
  CHECK(field_of<SchemaError>(
            with_groups(R"([{"id": "a", "segments": [], "role": "judge"}])")) ==
        "line_groups[0].role");
  CHECK(field_of<SchemaError>(
            with_groups(R"([{"id": "a", "segments": [], "extra": 1}])")) ==
        "line_groups[0].extra");
  CHECK(field_of<SchemaError>(R"({"schema_version": "v1", "image_size": {"width": 1, "height": 1},
      "shadow_pairs": [{"label": "s", "object_point": [0, 0]}]})") ==
        "shadow_pairs[0].shadow_point");
  CHECK(field_of<SchemaError>(R"({"schema_version": "v1", "image_size": {"width": 9, "height": 9},
      "reflection_pairs": [{"label": "r", "scene_point": [0, 0], "reflection_point": [1, 1]},
                           {"label": "r", "scene_point": [2, 0], "reflection_point": [3, 1]}]})") ==
        "reflection_pairs[1].label");
  CHECK(field_of<SchemaError>(R"([1, 2])") == "$");
}

TEST_CASE("malformed text reports a position") {
  const std::string text = "{\n  \"schema_version\": \"v1\",\n  \"image_size\": {\"width\": 1,,}\n}";
  try {
    parse_annotations(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_annotations(""), ParseError);
  CHECK_THROWS_AS(parse_annotations("{\"schema_version\": \"v1\""), ParseError);
}

TEST_CASE("geometric invariants") {
  CHECK(field_of<ValidationError>(
            R"({"schema_version": "v1", "image_size": {"width": 0, "height": 480}})") ==
        "image_size");
  CHECK(field_of<ValidationError>(
            R"({"schema_version": "v1", "image_size": {"width": 9, "height": 9}, "tolerance_px": -1})") ==
        "tolerance_px");
  // Far outside the image is rejected; moderately outside is allowed.
  CHECK_NOTHROW(parse_annotations(with_groups(R"([{"id": "a", "segments": [[-6000, 0, 10, 10]]}])")));
  CHECK(field_of<ValidationError>(
            with_groups(R"([{"id": "a", "segments": [[-7000, 0, 10, 10]]}])")) ==
        "line_groups[0].segments[0]");
  CHECK(field_of<ValidationError>(with_groups(R"([{"id": "a", "segments": [[5, 5, 5, 5]]}])")) ==
        "line_groups[0].segments[0]");
  CHECK(field_of<ValidationError>(
            with_groups(R"([{"id": "a", "segments": [], "aligned_with": "b"}])")) ==
        "line_groups[0].aligned_with");
  CHECK(field_of<ValidationError>(R"({"schema_version": "v1", "image_size": {"width": 9, "height": 9},
      "shadow_pairs": [{"label": "s", "object_point": [1, 1], "shadow_point": [1, 1]}]})") ==
        "shadow_pairs[0]");
}

TEST_CASE("oracle documents round-trip") {
  for (auto t : {SceneTemplate::tiled_floor, SceneTemplate::cubes_shadows,
                 SceneTemplate::mirror_boxes}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      SceneSpec spec;
      spec.scene_template = t;
      spec.seed = seed;
      spec.noise_sigma = seed % 2 ? 0.5 : 0.0;
      const auto doc = generate_scene(spec).annotations;
      const auto text = serialize_annotations(doc);
      const auto back = parse_annotations(text);
      CHECK(back == doc);
      CHECK(serialize_annotations(back) == text);
    }
  }
}

TEST_CASE("random documents round-trip") {
  testing_support::Random rng(71);
  for (int i = 0; i < 100; ++i) {
    AnnotationDocument doc;
    doc.image_ref = "img-" + std::to_string(i);
    doc.image_size = {rng.integer(300, 4000), rng.integer(300, 4000)};
    if (i % 3 == 0) doc.tolerance_px = rng.uniform(0.5, 10);
    const int groups = rng.integer(0, 4);
    for (int g = 0; g < groups; ++g) {
      LineGroup group;
      group.id = "g" + std::to_string(g);
      group.plane_group = g % 2 ? "wall" : "";
      group.role = g == 3 ? GroupRole::test : GroupRole::reference;
      if (g > 0 && i % 2) group.aligned_with = "g0";
      for (int k = 0; k < rng.integer(0, 5); ++k) {
        group.segments.push_back({rng.point(2000), rng.point(2000)});
      }
      doc.line_groups.push_back(group);
    }
    for (int k = 0; k < rng.integer(0, 4); ++k) {
      doc.shadow_pairs.push_back({rng.point(900), rng.point(900), "s" + std::to_string(k)});
      doc.reflection_pairs.push_back({rng.point(900), rng.point(900), "r" + std::to_string(k)});
    }
    const auto back = parse_annotations(serialize_annotations(doc));
    CHECK(back == doc);
  }
}

TEST_CASE("serialization is canonical") {
  const auto a = parse_annotations(kMinimal);
  const auto text = serialize_annotations(a);
  CHECK(text == serialize_annotations(parse_annotations(text)));
  // Key order in the input does not matter.
  const auto shuffled = parse_annotations(R"({
    "line_groups": [{"segments": [[10, 400, 200, 300], [30, 460, 260, 330]], "id": "floor-x"}],
    "image_size": {"height": 480, "width": 640},
    "image_ref": "kitchen.jpg",
    "schema_version": "v1"})");
  CHECK(serialize_annotations(shuffled) == text);
  CHECK(text.find("\"schema_version\": \"v1\"") != std::string::npos);
}
