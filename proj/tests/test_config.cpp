#include <fstream>
#include <set>

#include "doctest.h"
#include "dentsynth/config.hpp"
#include "dentsynth/error.hpp"
#include "support.hpp"

using namespace dentsynth;

namespace {

std::string error_of(const std::string& json) {
  try {
    config_from_json(json);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: empty object gives the defaults") {
  const Config c = config_from_json("{}");
  CHECK(c.seed == 7);
  CHECK(c.camera.theta[0] == Range{20.0, 70.0});
  CHECK(c.camera.theta[3] == Range{290.0, 340.0});
  CHECK(c.camera.phi == Range{50.0, 70.0});
  CHECK(c.camera.r == Range{0.3, 0.45});
  CHECK(c.morphology.close_radius == 2);
  CHECK(c.vertical_fov == 40.0);
  CHECK(config_hash(c) == config_hash(Config{}));
}

TEST_CASE("config: JSON round trip preserves the hash") {
  Config c;
  c.seed = 99;
  c.camera.r = {0.31, 0.4};
  c.displacements[1].scale = 61.5;
  const Config back = config_from_json(config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.seed == 99);
  CHECK(back.displacements[1].scale == 61.5);
  CHECK(config_hash(c) != config_hash(Config{}));
}

TEST_CASE("config: unknown keys and wrong types name the key") {
  CHECK(error_of(R"({"camera": {"rr": [0.3, 0.4]}})").find("camera.rr") != std::string::npos);
  CHECK(error_of(R"({"bogus": 1})").find("bogus") != std::string::npos);
  CHECK(error_of(R"({"seed": "seven"})").find("seed") != std::string::npos);
  CHECK(error_of(R"({"camera": {"image_size": 1.5}})").find("camera.image_size") != std::string::npos);
  CHECK(error_of("{not json").find("JSON") != std::string::npos);
}

TEST_CASE("config: invalid values name the key") {
  CHECK(error_of(R"({"camera": {"phi": [70, 50]}})").find("camera.phi") != std::string::npos);
  CHECK(error_of(R"({"can": {"radial_segments": 7}})").find("can") != std::string::npos);
  CHECK(error_of(R"({"dataset": {"views_per_scene": 2}})").find("views_per_scene") != std::string::npos);
  CHECK(error_of(R"({"light": {"diffuse": [0.5, 1.0], "ambient": [0.1, 0.3]}})").find("1.2") != std::string::npos);
  CHECK(error_of(R"({"train": {"split_fraction": 1.0}})").find("split_fraction") != std::string::npos);
  CHECK(error_of(R"({"displacements": [{"noise_seed": 1, "scale": 0, "strength": 0.001, "bias": 0, "group": "side"}]})")
            .find("displacements[0]") != std::string::npos);
}

TEST_CASE("config: overlay applies on top of an existing config") {
  Config base;
  base.seed = 3;
  const Config c = config_overlay(base, R"({"train": {"epochs": 12}})");
  CHECK(c.seed == 3);
  CHECK(c.train.epochs == 12);
  CHECK_THROWS_AS(config_overlay(base, R"({"train": {"epoch": 12}})"), Error);
}

TEST_CASE("config: key listing covers every leaf with its default") {
  const auto listing = config_key_listing();
  std::set<std::string> keys;
  for (const auto& [k, v] : listing) keys.insert(k);
  for (const char* k : {"seed", "camera.theta_q1", "camera.phi", "camera.r", "camera.vertical_fov", "can.radius",
                        "composite.close_radius", "composite.open_radius", "composite.erode_radius",
                        "weights.lattice", "weights.displace", "lattice.crush_count", "displacements",
                        "train.epochs", "dataset.views_per_scene", "light.diffuse", "hinges.tab_open_degrees"})
    CHECK(keys.count(k) == 1);
  for (const auto& [k, v] : listing)
    if (k == "camera.phi") CHECK(v == "[50.0,70.0]");
}

TEST_CASE("config: load from file") {
  testsupport::TempDir dir("cfg");
  std::ofstream(dir / "c.json") << R"({"seed": 11, "composite": {"erode_radius": 0}})";
  const Config c = load_config(dir / "c.json");
  CHECK(c.seed == 11);
  CHECK(c.morphology.erode_radius == 0);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}
