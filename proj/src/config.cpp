#include "dentsynth/config.hpp"

#include <fstream>
#include <sstream>

#include "dentsynth/error.hpp"
#include "dentsynth/image.hpp"
#include "json.hpp"

namespace dentsynth {

using nlohmann::json;

namespace {

json range_json(const Range& r) { return json::array({r.first, r.second}); }

json to_json(const Config& c) {
  json j;
  j["seed"] = c.seed;
  j["can"] = {{"radius", c.can.radius},
              {"height", c.can.height},
              {"taper_fraction", c.can.taper_fraction},
              {"radial_segments", c.can.radial_segments},
              {"height_segments", c.can.height_segments}};
  j["mesh_path"] = c.mesh_path;
  const auto& k = c.lattice_keys;
  j["lattice"] = {{"resolution", json::array({c.lattice.l, c.lattice.m, c.lattice.n})},
                  {"crush_count", k.crush_count},
                  {"pinch_count", k.pinch_count},
                  {"fold_count", k.fold_count},
                  {"twist_count", k.twist_count},
                  {"crunch_count", k.crunch_count},
                  {"crush_depth", k.crush_depth},
                  {"pinch_depth", k.pinch_depth},
                  {"fold_shear", k.fold_shear},
                  {"twist_degrees", k.twist_degrees},
                  {"crunch_jitter", k.crunch_jitter},
                  {"crunch_seed", k.crunch_seed}};
  j["hinges"] = {{"tab_open_degrees", c.hinges.tab_open_degrees},
                 {"seal_open_degrees", c.hinges.seal_open_degrees}};
  json disp = json::array();
  for (const auto& d : c.displacements)
    disp.push_back({{"noise_seed", d.noise_seed},
                    {"scale", d.scale},
                    {"strength", d.strength},
                    {"bias", d.bias},
                    {"group", d.group}});
  j["displacements"] = disp;
  j["weights"] = {{"lattice", range_json({c.weights.lattice_min, c.weights.lattice_max})},
                  {"displace", range_json({c.weights.displace_min, c.weights.displace_max})}};
  j["camera"] = {{"theta_q1", range_json(c.camera.theta[0])},
                 {"theta_q2", range_json(c.camera.theta[1])},
                 {"theta_q3", range_json(c.camera.theta[2])},
                 {"theta_q4", range_json(c.camera.theta[3])},
                 {"phi", range_json(c.camera.phi)},
                 {"r", range_json(c.camera.r)},
                 {"vertical_fov", c.vertical_fov},
                 {"image_size", c.image_size}};
  j["light"] = {{"diffuse", range_json(c.light.diffuse)}, {"ambient", range_json(c.light.ambient)}};
  j["render"] = {{"label_texture", c.label_texture}};
  j["composite"] = {{"close_radius", c.morphology.close_radius},
                    {"open_radius", c.morphology.open_radius},
                    {"erode_radius", c.morphology.erode_radius},
                    {"key_tolerance", c.key_tolerance},
                    {"background_dir", c.background_dir}};
  j["dataset"] = {{"views_per_scene", c.views_per_scene}};
  j["train"] = {{"epochs", c.train.epochs},
                {"learning_rate", c.train.learning_rate},
                {"l2", c.train.l2},
                {"split_fraction", c.train.split_fraction}};
  return j;
}

[[noreturn]] void config_fail(const std::string& key, const std::string& what) {
  fail(ErrorKind::configuration, "config key '" + key + "': " + what);
}

bool same_kind(const json& def, const json& user) {
  if (def.is_number_integer()) return user.is_number_integer();
  if (def.is_number()) return user.is_number();
  return def.type() == user.type();
}

void merge_strict(json& target, const json& user, const std::string& prefix) {
  if (!user.is_object()) config_fail(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!target.contains(it.key())) config_fail(key, "unknown key");
    json& slot = target[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), key);
    } else {
      if (!same_kind(slot, it.value())) config_fail(key, "wrong value type");
      slot = it.value();
    }
  }
}

Range get_range(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    config_fail(key, "expected [low, high]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Config from_json(const json& j) {
  Config c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    const json& can = j.at("can");
    c.can.radius = can.at("radius").get<double>();
    c.can.height = can.at("height").get<double>();
    c.can.taper_fraction = can.at("taper_fraction").get<double>();
    c.can.radial_segments = can.at("radial_segments").get<int>();
    c.can.height_segments = can.at("height_segments").get<int>();
    c.mesh_path = j.at("mesh_path").get<std::string>();

    const json& lat = j.at("lattice");
    const json& res = lat.at("resolution");
    if (!res.is_array() || res.size() != 3) config_fail("lattice.resolution", "expected [l, m, n]");
    c.lattice = {res[0].get<int>(), res[1].get<int>(), res[2].get<int>()};
    auto& k = c.lattice_keys;
    k.crush_count = lat.at("crush_count").get<int>();
    k.pinch_count = lat.at("pinch_count").get<int>();
    k.fold_count = lat.at("fold_count").get<int>();
    k.twist_count = lat.at("twist_count").get<int>();
    k.crunch_count = lat.at("crunch_count").get<int>();
    k.crush_depth = lat.at("crush_depth").get<double>();
    k.pinch_depth = lat.at("pinch_depth").get<double>();
    k.fold_shear = lat.at("fold_shear").get<double>();
    k.twist_degrees = lat.at("twist_degrees").get<double>();
    k.crunch_jitter = lat.at("crunch_jitter").get<double>();
    k.crunch_seed = lat.at("crunch_seed").get<std::uint64_t>();

    c.hinges.tab_open_degrees = j.at("hinges").at("tab_open_degrees").get<double>();
    c.hinges.seal_open_degrees = j.at("hinges").at("seal_open_degrees").get<double>();

    c.displacements.clear();
    const json& disp = j.at("displacements");
    if (!disp.is_array()) config_fail("displacements", "expected an array");
    for (std::size_t i = 0; i < disp.size(); ++i) {
      const std::string key = "displacements[" + std::to_string(i) + "]";
      const json& d = disp[i];
      if (!d.is_object()) config_fail(key, "expected an object");
      for (auto it = d.begin(); it != d.end(); ++it)
        if (it.key() != "noise_seed" && it.key() != "scale" && it.key() != "strength" &&
            it.key() != "bias" && it.key() != "group")
          config_fail(key + "." + it.key(), "unknown key");
      DisplaceParams p;
      p.noise_seed = d.value("noise_seed", p.noise_seed);
      p.scale = d.value("scale", p.scale);
      p.strength = d.value("strength", p.strength);
      p.bias = d.value("bias", p.bias);
      p.group = d.value("group", p.group);
      c.displacements.push_back(p);
    }

    const Range lw = get_range(j.at("weights").at("lattice"), "weights.lattice");
    const Range dw = get_range(j.at("weights").at("displace"), "weights.displace");
    c.weights = {lw.first, lw.second, dw.first, dw.second};

    const json& cam = j.at("camera");
    for (int q = 0; q < 4; ++q) {
      const std::string name = "theta_q" + std::to_string(q + 1);
      c.camera.theta[static_cast<std::size_t>(q)] = get_range(cam.at(name), "camera." + name);
    }
    c.camera.phi = get_range(cam.at("phi"), "camera.phi");
    c.camera.r = get_range(cam.at("r"), "camera.r");
    c.vertical_fov = cam.at("vertical_fov").get<double>();
    c.image_size = cam.at("image_size").get<int>();
    c.light.diffuse = get_range(j.at("light").at("diffuse"), "light.diffuse");
    c.light.ambient = get_range(j.at("light").at("ambient"), "light.ambient");
    c.label_texture = j.at("render").at("label_texture").get<std::string>();

    const json& comp = j.at("composite");
    c.morphology.close_radius = comp.at("close_radius").get<int>();
    c.morphology.open_radius = comp.at("open_radius").get<int>();
    c.morphology.erode_radius = comp.at("erode_radius").get<int>();
    c.key_tolerance = comp.at("key_tolerance").get<double>();
    c.background_dir = comp.at("background_dir").get<std::string>();
    c.views_per_scene = j.at("dataset").at("views_per_scene").get<int>();

    const json& tr = j.at("train");
    c.train.epochs = tr.at("epochs").get<int>();
    c.train.learning_rate = tr.at("learning_rate").get<double>();
    c.train.l2 = tr.at("l2").get<double>();
    c.train.split_fraction = tr.at("split_fraction").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::configuration, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

void check_range(const Range& r, const std::string& key) {
  if (!(r.first <= r.second)) config_fail(key, "low bound exceeds high bound");
}

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  out.emplace_back(prefix, j.dump());
}

}  // namespace

void validate(const Config& c) {
  try {
    validate(c.can);
  } catch (const Error& e) {
    config_fail("can", e.what());
  }
  if (c.lattice.l < 2 || c.lattice.m < 2 || c.lattice.n < 2)
    config_fail("lattice.resolution", "every axis needs >= 2 control points");
  const auto& k = c.lattice_keys;
  const int counts[] = {k.crush_count, k.pinch_count, k.fold_count, k.twist_count, k.crunch_count};
  int categories = 0;
  for (int n : counts) {
    if (n < 0) config_fail("lattice", "key counts must be >= 0");
    categories += n > 0 ? 1 : 0;
  }
  if (categories < 3) config_fail("lattice", "at least 3 categories need keys");
  if (c.displacements.empty()) config_fail("displacements", "at least one variant required");
  for (std::size_t i = 0; i < c.displacements.size(); ++i) {
    try {
      validate(c.displacements[i]);
    } catch (const Error& e) {
      config_fail("displacements[" + std::to_string(i) + "]", e.what());
    }
  }
  if (!(c.weights.lattice_min > 0.0 && c.weights.lattice_max <= 1.0 &&
        c.weights.lattice_min <= c.weights.lattice_max))
    config_fail("weights.lattice", "must satisfy 0 < low <= high <= 1");
  if (!(c.weights.displace_min > 0.0 && c.weights.displace_max <= 1.0 &&
        c.weights.displace_min <= c.weights.displace_max))
    config_fail("weights.displace", "must satisfy 0 < low <= high <= 1");
  for (int q = 0; q < 4; ++q)
    check_range(c.camera.theta[static_cast<std::size_t>(q)], "camera.theta_q" + std::to_string(q + 1));
  check_range(c.camera.phi, "camera.phi");
  check_range(c.camera.r, "camera.r");
  if (!(c.camera.phi.first > 0.0 && c.camera.phi.second < 180.0))
    config_fail("camera.phi", "must lie strictly inside (0, 180)");
  if (!(c.camera.r.first > 0.0)) config_fail("camera.r", "distance must be > 0");
  if (!(c.vertical_fov > 0.0 && c.vertical_fov < 180.0))
    config_fail("camera.vertical_fov", "must lie in (0, 180)");
  if (c.image_size < 16) config_fail("camera.image_size", "must be >= 16");
  check_range(c.light.diffuse, "light.diffuse");
  check_range(c.light.ambient, "light.ambient");
  if (c.light.diffuse.first < 0.0 || c.light.ambient.first < 0.0 || c.light.diffuse.second > 1.0 ||
      c.light.ambient.second > 1.0)
    config_fail("light", "diffuse and ambient must lie in [0, 1]");
  if (c.light.diffuse.second + c.light.ambient.second > 1.2)
    config_fail("light", "ambient + diffuse must not exceed 1.2");
  if (c.morphology.close_radius < 0 || c.morphology.open_radius < 0 || c.morphology.erode_radius < 0)
    config_fail("composite", "morphology radii must be >= 0");
  if (c.key_tolerance < 0.0) config_fail("composite.key_tolerance", "must be >= 0");
  if (c.views_per_scene != 1 && c.views_per_scene != 4)
    config_fail("dataset.views_per_scene", "must be 1 or 4");
  if (c.train.epochs < 1) config_fail("train.epochs", "must be >= 1");
  if (!(c.train.learning_rate > 0.0)) config_fail("train.learning_rate", "must be > 0");
  if (!(c.train.l2 >= 0.0)) config_fail("train.l2", "must be >= 0");
  if (!(c.train.split_fraction > 0.0 && c.train.split_fraction < 1.0))
    config_fail("train.split_fraction", "must lie in (0, 1)");
}

std::string config_to_json(const Config& config, int indent) { return to_json(config).dump(indent); }

Config config_from_json(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::configuration, std::string("config is not valid JSON: ") + e.what());
  }
  json merged = to_json(Config{});
  merge_strict(merged, user, "");
  return from_json(merged);
}

Config config_overlay(const Config& base, const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::configuration, std::string("config overlay is not valid JSON: ") + e.what());
  }
  json merged = to_json(base);
  merge_strict(merged, user, "");
  return from_json(merged);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_hash(const Config& config) { return sha256_hex(to_json(config).dump()); }

std::vector<std::pair<std::string, std::string>> config_key_listing() {
  std::vector<std::pair<std::string, std::string>> out;
  flatten(to_json(Config{}), "", out);
  return out;
}

}  // namespace dentsynth
