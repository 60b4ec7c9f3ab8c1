#include <algorithm>
#include <fstream>
#include <sstream>

#include "dentsynth/dataset.hpp"
#include "dentsynth/error.hpp"
#include "json.hpp"

namespace dentsynth {

using nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "dentsynth-manifest/1";

json deformation_json(const DeformationState& d) {
  json weights = json::object();
  for (const auto& [name, w] : d.lattice_weights) weights[name] = w;
  return {{"lattice_weights", weights},
          {"displace_weights", d.displace_weights},
          {"tab_open", d.tab_open},
          {"seal_open", d.seal_open}};
}

json sample_json(const SampleSpec& s) {
  json j = {{"type", "sample"},
            {"index", s.index},
            {"label", to_string(s.label)},
            {"image", s.image},
            {"image_sha256", s.image_sha256},
            {"background_id", s.background_id}};
  if (!s.mask.empty()) {
    j["mask"] = s.mask;
    j["mask_sha256"] = s.mask_sha256;
  }
  if (!s.source.empty()) j["source"] = s.source;
  if (s.deformation) {
    j["scene"] = s.scene;
    j["seed"] = s.seed;
    j["deformation"] = deformation_json(*s.deformation);
  }
  if (s.pose) {
    const CameraPose& p = *s.pose;
    j["pose"] = {{"theta", p.theta},       {"phi", p.phi},
                 {"r", p.r},               {"quadrant", p.quadrant},
                 {"vertical_fov", p.vertical_fov}, {"image_size", p.image_size}};
  }
  if (s.light) {
    const LightSpec& l = *s.light;
    j["light"] = {{"direction", {l.direction.x, l.direction.y, l.direction.z}},
                  {"diffuse", l.diffuse},
                  {"ambient", l.ambient}};
  }
  return j;
}

SampleSpec sample_from_json(const json& j) {
  SampleSpec s;
  s.index = j.at("index").get<std::size_t>();
  if (!parse_label(j.at("label").get<std::string>(), s.label))
    fail(ErrorKind::parse, "unknown label '" + j.at("label").get<std::string>() + "'");
  s.image = j.at("image").get<std::string>();
  s.image_sha256 = j.value("image_sha256", "");
  s.background_id = j.value("background_id", "");
  s.mask = j.value("mask", "");
  s.mask_sha256 = j.value("mask_sha256", "");
  s.source = j.value("source", "");
  if (j.contains("deformation")) {
    s.scene = j.value("scene", std::size_t{0});
    s.seed = j.value("seed", std::uint64_t{0});
    const json& d = j.at("deformation");
    DeformationState state;
    state.label = s.label;
    for (auto it = d.at("lattice_weights").begin(); it != d.at("lattice_weights").end(); ++it)
      state.lattice_weights[it.key()] = it.value().get<double>();
    state.displace_weights = d.at("displace_weights").get<std::vector<double>>();
    state.tab_open = d.at("tab_open").get<double>();
    state.seal_open = d.at("seal_open").get<double>();
    s.deformation = state;
  }
  if (j.contains("pose")) {
    const json& p = j.at("pose");
    CameraPose pose;
    pose.theta = p.at("theta").get<double>();
    pose.phi = p.at("phi").get<double>();
    pose.r = p.at("r").get<double>();
    pose.quadrant = p.at("quadrant").get<int>();
    pose.vertical_fov = p.at("vertical_fov").get<double>();
    pose.image_size = p.at("image_size").get<int>();
    s.pose = pose;
  }
  if (j.contains("light")) {
    const json& l = j.at("light");
    LightSpec light;
    const auto dir = l.at("direction").get<std::vector<double>>();
    if (dir.size() != 3) fail(ErrorKind::parse, "light direction needs 3 components");
    light.direction = {dir[0], dir[1], dir[2]};
    light.diffuse = l.at("diffuse").get<double>();
    light.ambient = l.at("ambient").get<double>();
    s.light = light;
  }
  return s;
}

std::filesystem::path absolute_normal(const std::filesystem::path& p) {
  return std::filesystem::absolute(p).lexically_normal();
}

}  // namespace

std::size_t DatasetManifest::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                [label](const SampleSpec& s) { return s.label == label; }));
}

std::string sample_file_name(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return digits + ".png";
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  // Relative paths are rebased when writing next to a different directory.
  const auto new_root = absolute_normal(path).parent_path();
  const auto old_root = absolute_normal(manifest.root.empty() ? new_root : manifest.root);
  auto rebase = [&](const std::string& rel) {
    if (rel.empty() || old_root == new_root) return rel;
    return (old_root / rel).lexically_normal().lexically_relative(new_root).generic_string();
  };

  std::ostringstream out;
  json header = {{"type", "header"},
                 {"format", kManifestFormat},
                 {"kind", manifest.kind},
                 {"config_hash", manifest.config_hash},
                 {"global_seed", manifest.global_seed},
                 {"background_mode", manifest.background_mode},
                 {"sample_count", manifest.samples.size()},
                 {"feature_space", "grayscale 32x32 area-downsampled pixels in [0,1]"}};
  out << header.dump() << '\n';
  for (SampleSpec s : manifest.samples) {
    s.image = rebase(s.image);
    s.mask = rebase(s.mask);
    out << sample_json(s).dump() << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::io, "cannot write manifest " + path.string());
  file << out.str();
  if (!file) fail(ErrorKind::io, "short write to manifest " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open manifest " + path.string());
  DatasetManifest m;
  m.root = absolute_normal(path).parent_path();
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.value("format", "") != kManifestFormat)
          fail(ErrorKind::parse, "unsupported manifest format");
        m.kind = j.value("kind", "synthetic");
        m.config_hash = j.value("config_hash", "");
        m.global_seed = j.value("global_seed", std::uint64_t{0});
        m.background_mode = j.value("background_mode", "");
        have_header = true;
      } else if (type == "sample") {
        m.samples.push_back(sample_from_json(j));
      } else {
        fail(ErrorKind::parse, "unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) fail(ErrorKind::parse, path.string() + ": missing manifest header");
  return m;
}

DatasetManifest subset(const DatasetManifest& manifest, const std::vector<std::size_t>& positions) {
  DatasetManifest out = manifest;
  out.samples.clear();
  for (std::size_t p : positions) {
    if (p >= manifest.samples.size()) fail(ErrorKind::parameter, "subset position out of range");
    out.samples.push_back(manifest.samples[p]);
  }
  return out;
}

VerifyReport verify_manifest(const DatasetManifest& manifest) {
  VerifyReport report;
  auto check = [&](const std::string& rel, const std::string& digest) {
    if (rel.empty()) return;
    ++report.checked;
    const auto path = manifest.root / rel;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      report.missing.push_back(rel);
      return;
    }
    if (sha256_file(path) != digest) report.mismatched.push_back(rel);
  };
  for (const SampleSpec& s : manifest.samples) {
    check(s.image, s.image_sha256);
    check(s.mask, s.mask_sha256);
  }
  return report;
}

}  // namespace dentsynth
