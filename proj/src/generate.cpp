#include <algorithm>
#include <cmath>
#include <map>

#include "dentsynth/dataset.hpp"
#include "dentsynth/error.hpp"
#include "parallel.hpp"

namespace dentsynth {

const char* to_string(BackgroundMode mode) { return mode == BackgroundMode::pool ? "pool" : "black"; }

bool parse_background_mode(const std::string& text, BackgroundMode& out) {
  if (text == "black") { out = BackgroundMode::black; return true; }
  if (text == "pool") { out = BackgroundMode::pool; return true; }
  return false;
}

std::size_t scene_for(std::size_t index, int views_per_scene) {
  return index / static_cast<std::size_t>(views_per_scene);
}

Label label_for(std::size_t index, int views_per_scene) {
  return scene_for(index, views_per_scene) % 2 == 0 ? Label::deformed : Label::non_deformed;
}

// With one view per scene the labels alternate every sample, so the quadrant
// advances every second sample; otherwise each class would only ever see two
// of the four cameras.
int quadrant_for(std::size_t index, int views_per_scene) {
  if (views_per_scene == 1) return 1 + static_cast<int>((index / 2) % 4);
  return 1 + static_cast<int>(index % 4);
}

GenerationContext::GenerationContext(Config config, BackgroundMode mode)
    : config_(std::move(config)), mode_(mode) {
  validate(config_);
  mesh_ = config_.mesh_path.empty() ? generate_can(config_.can) : load_obj(config_.mesh_path);
  library_ = build_key_library(mesh_, config_.can, config_.lattice, config_.lattice_keys,
                               config_.hinges, config_.displacements);
  material_ = default_material();
  if (!config_.label_texture.empty()) material_.label = read_image(config_.label_texture);
  if (mode_ == BackgroundMode::pool) {
    if (config_.background_dir.empty())
      fail(ErrorKind::data, "pool mode needs composite.background_dir (or --backgrounds)");
    pool_.emplace(config_.background_dir);
  }
}

SampleRender render_sample(const GenerationContext& ctx, std::size_t index) {
  const Config& cfg = ctx.config();
  const std::size_t scene = scene_for(index, cfg.views_per_scene);

  SampleRender out;
  SampleSpec& spec = out.spec;
  spec.index = index;
  spec.scene = scene;
  spec.label = label_for(index, cfg.views_per_scene);
  spec.seed = derive_seed(cfg.seed, scene, StreamPurpose::deformation);

  Rng deform_rng(spec.seed);
  spec.deformation = sample_deformation(deform_rng, ctx.library(), spec.label, cfg.weights);
  Rng cam_rng = Rng::stream(cfg.seed, index, StreamPurpose::camera);
  spec.pose = sample_camera(cam_rng, quadrant_for(index, cfg.views_per_scene), cfg.camera,
                            cfg.vertical_fov, cfg.image_size);
  Rng light_rng = Rng::stream(cfg.seed, index, StreamPurpose::light);
  spec.light = sample_light(light_rng, cfg.light);

  const Mesh mesh = deform_mesh(ctx.base_mesh(), ctx.library(), *spec.deformation);
  const std::string name = sample_file_name(index);
  spec.image = std::string(to_string(spec.label)) + "/" + name;
  spec.mask = "masks/" + name;

  if (ctx.mode() == BackgroundMode::black) {
    RenderedSample r = rasterize(mesh, *spec.pose, *spec.light, Background::black, ctx.material());
    spec.background_id = kBlackBackgroundId;
    out.image = std::move(r.rgb);
    out.coverage = r.coverage;
    out.mask = std::move(r.coverage);
    return out;
  }

  RenderedSample r = rasterize(mesh, *spec.pose, *spec.light, Background::key_green, ctx.material());
  const BinaryMask keyed = cfg.key_tolerance > 0.0
                               ? chroma_mask_threshold(r.rgb, kKeyGreen, cfg.key_tolerance)
                               : chroma_mask(r.rgb, kKeyGreen);
  out.mask = refine_mask(keyed, cfg.morphology);
  auto [background, id] = ctx.pool()->load_for_sample(cfg.seed, index);
  spec.background_id = id;
  out.image = composite(r.rgb, out.mask, background, kKeyGreen);
  out.coverage = std::move(r.coverage);
  out.keyed = std::move(r.rgb);
  return out;
}

GenerationReport generate_dataset(const Config& config, std::size_t n, BackgroundMode mode,
                                  const std::filesystem::path& out_dir, int jobs) {
  if (n == 0 || n % 2 != 0) fail(ErrorKind::parameter, "n must be even and positive");
  if (config.views_per_scene == 4 && n % 8 != 0)
    fail(ErrorKind::parameter, "with 4 views per scene n must be a multiple of 8");
  const GenerationContext ctx(config, mode);

  std::error_code ec;
  for (const char* sub : {"deformed", "non_deformed", "masks"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  const auto manifest_path = out_dir / "manifest.jsonl";

  GenerationReport report;
  std::map<std::string, std::string> previous;
  if (std::filesystem::is_regular_file(manifest_path, ec)) {
    try {
      const DatasetManifest old = read_manifest(manifest_path);
      report.previous_manifest = true;
      for (const SampleSpec& s : old.samples) {
        previous[s.image] = s.image_sha256;
        if (!s.mask.empty()) previous[s.mask] = s.mask_sha256;
      }
    } catch (const Error&) {
      report.previous_manifest = false;
    }
  }

  std::vector<SampleSpec> specs(n);
  detail::parallel_for(n, jobs, [&](std::size_t i) {
    SampleRender r = render_sample(ctx, i);
    const auto image_bytes = encode_png(r.image);
    const auto mask_bytes = encode_png(r.mask);
    r.spec.image_sha256 = sha256_hex(image_bytes);
    r.spec.mask_sha256 = sha256_hex(mask_bytes);
    write_file(out_dir / r.spec.image, image_bytes);
    write_file(out_dir / r.spec.mask, mask_bytes);
    specs[i] = std::move(r.spec);
  });

  DatasetManifest& m = report.manifest;
  m.kind = "synthetic";
  m.config_hash = config_hash(config);
  m.global_seed = config.seed;
  m.background_mode = to_string(mode);
  m.samples = std::move(specs);
  m.root = std::filesystem::absolute(out_dir).lexically_normal();
  write_manifest(m, manifest_path);

  if (report.previous_manifest) {
    std::size_t changed = 0;
    std::map<std::string, std::string> current;
    for (const SampleSpec& s : m.samples) {
      current[s.image] = s.image_sha256;
      current[s.mask] = s.mask_sha256;
    }
    for (const auto& [path, digest] : current) {
      auto it = previous.find(path);
      if (it == previous.end() || it->second != digest) ++changed;
    }
    for (const auto& [path, digest] : previous)
      if (!current.count(path)) ++changed;
    report.files_changed = changed;
  }
  return report;
}

Split split(const DatasetManifest& manifest, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    fail(ErrorKind::parameter, "split fraction must lie in (0, 1)");
  Split out;
  out.fraction = fraction;
  for (Label label : {Label::deformed, Label::non_deformed}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
      if (manifest.samples[i].label == label) members.push_back(i);
    if (members.size() < 2)
      fail(ErrorKind::data, std::string("class '") + to_string(label) +
                                "' needs at least 2 samples to split");
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(label), StreamPurpose::split);
    for (std::size_t i = members.size() - 1; i > 0; --i)
      std::swap(members[i], members[static_cast<std::size_t>(rng.below(i + 1))]);
    auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

DatasetManifest ingest_real(const std::filesystem::path& dir, const std::filesystem::path& out_dir,
                            int image_size) {
  if (image_size < 1) fail(ErrorKind::parameter, "image size must be positive");
  DatasetManifest m;
  m.kind = "real";
  m.background_mode = "real";
  m.config_hash = sha256_hex("ingest image_size=" + std::to_string(image_size));
  m.root = std::filesystem::absolute(out_dir).lexically_normal();

  std::size_t index = 0;
  std::error_code ec;
  for (Label label : {Label::deformed, Label::non_deformed}) {
    const auto class_dir = dir / to_string(label);
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(class_dir, ec)) {
      for (const auto& entry : std::filesystem::directory_iterator(class_dir, ec))
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    if (files.empty())
      fail(ErrorKind::data, "ingestion: class directory is missing or empty: " + class_dir.string());
    std::sort(files.begin(), files.end());
    std::filesystem::create_directories(out_dir / to_string(label), ec);
    if (ec) fail(ErrorKind::io, "cannot create " + (out_dir / to_string(label)).string());
    for (const auto& file : files) {
      RgbImage img;
      try {
        img = read_image(file);
      } catch (const Error& e) {
        fail(ErrorKind::image, "ingestion: cannot read " + file.string() + ": " + e.what());
      }
      RgbImage square = center_crop_square(img);
      if (square.width != image_size) square = resize_bilinear(square, image_size, image_size);
      SampleSpec s;
      s.index = index;
      s.label = label;
      s.background_id = kRealBackgroundId;
      s.source = std::filesystem::absolute(file).lexically_normal().string();
      s.image = std::string(to_string(label)) + "/" + sample_file_name(index);
      const auto bytes = encode_png(square);
      s.image_sha256 = sha256_hex(bytes);
      write_file(out_dir / s.image, bytes);
      m.samples.push_back(std::move(s));
      ++index;
    }
  }
  write_manifest(m, out_dir / "manifest.jsonl");
  return m;
}

}  // namespace dentsynth
