#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dentsynth/composite.hpp"
#include "dentsynth/deform.hpp"
#include "dentsynth/mesh.hpp"
#include "dentsynth/render.hpp"

namespace dentsynth {

struct TrainParams {
  int epochs = 300;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  double split_fraction = 0.8;
};

// Every tunable of the pipeline. Serialised as nested JSON; keys not present
// in the defaults are rejected.
struct Config {
  std::uint64_t seed = 7;

  CanParams can;
  std::string mesh_path;  // optional OBJ replacing the built-in can

  LatticeResolution lattice;
  LatticeKeyParams lattice_keys;
  HingeParams hinges;
  std::vector<DisplaceParams> displacements = default_displacements();
  WeightRanges weights;

  CameraRanges camera;
  double vertical_fov = 40.0;
  int image_size = 512;
  LightRanges light;
  std::string label_texture;  // PNG path; empty selects the built-in label

  MorphologyParams morphology;
  double key_tolerance = 0.0;  // 0 selects exact-match keying
  std::string background_dir;
  int views_per_scene = 1;

  TrainParams train;
};

void validate(const Config& config);

// Resolved config as JSON text (keys sorted, fixed number formatting).
std::string config_to_json(const Config& config, int indent = 2);

// Overlays `json_text` on the defaults. Throws a configuration error naming
// the offending key for unknown keys, type mismatches or invalid values.
Config config_from_json(const std::string& json_text);
// Same strict overlay, applied on top of an existing config.
Config config_overlay(const Config& base, const std::string& json_text);
Config load_config(const std::filesystem::path& path);

// SHA-256 of the compact resolved JSON.
std::string config_hash(const Config& config);

// Every leaf key in dotted form with its default value, in sorted order.
std::vector<std::pair<std::string, std::string>> config_key_listing();

}  // namespace dentsynth
