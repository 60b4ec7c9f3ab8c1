#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dentsynth/config.hpp"
#include "dentsynth/deform.hpp"
#include "dentsynth/label.hpp"
#include "dentsynth/render.hpp"

namespace dentsynth {

enum class BackgroundMode { black, pool };

const char* to_string(BackgroundMode mode);
bool parse_background_mode(const std::string& text, BackgroundMode& out);

inline constexpr const char* kBlackBackgroundId = "key_black";
inline constexpr const char* kRealBackgroundId = "real";

// Full random state of one sample plus where its files live (paths relative
// to the manifest directory).
struct SampleSpec {
  std::size_t index = 0;
  Label label = Label::non_deformed;
  std::size_t scene = 0;
  std::uint64_t seed = 0;
  std::optional<DeformationState> deformation;
  std::optional<CameraPose> pose;
  std::optional<LightSpec> light;
  std::string background_id;
  std::string image;
  std::string image_sha256;
  std::string mask;
  std::string mask_sha256;
  std::string source;  // original file for ingested photos
};

struct DatasetManifest {
  std::string kind = "synthetic";  // or "real"
  std::string config_hash;
  std::uint64_t global_seed = 0;
  std::string background_mode;
  std::vector<SampleSpec> samples;
  std::filesystem::path root;  // directory the relative paths resolve against

  std::filesystem::path image_path(const SampleSpec& s) const { return root / s.image; }
  std::size_t count(Label label) const;
};

// JSON lines: one header object, then one object per sample.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

std::string sample_file_name(std::size_t index);  // NNNNNN.png

// Class and camera assignment of sample `index`.
Label label_for(std::size_t index, int views_per_scene);
int quadrant_for(std::size_t index, int views_per_scene);
std::size_t scene_for(std::size_t index, int views_per_scene);

// Shared read-only state for rendering samples of one dataset.
class GenerationContext {
 public:
  GenerationContext(Config config, BackgroundMode mode);

  const Config& config() const { return config_; }
  BackgroundMode mode() const { return mode_; }
  const Mesh& base_mesh() const { return mesh_; }
  const ShapeKeyLibrary& library() const { return library_; }
  const Material& material() const { return material_; }
  const BackgroundPool* pool() const { return pool_ ? &*pool_ : nullptr; }

 private:
  Config config_;
  BackgroundMode mode_;
  Mesh mesh_;
  ShapeKeyLibrary library_;
  Material material_;
  std::optional<BackgroundPool> pool_;
};

struct SampleRender {
  SampleSpec spec;
  RgbImage image;       // final pixels
  BinaryMask coverage;  // renderer coverage
  BinaryMask mask;      // mask written alongside (refined in pool mode)
  RgbImage keyed;       // raw key-green render (pool mode only)
};

// Pure function of (context, index).
SampleRender render_sample(const GenerationContext& context, std::size_t index);

struct GenerationReport {
  DatasetManifest manifest;
  bool previous_manifest = false;
  std::size_t files_changed = 0;  // versus the manifest found in out_dir before the run
};

GenerationReport generate_dataset(const Config& config, std::size_t n_samples, BackgroundMode mode,
                                  const std::filesystem::path& out_dir, int jobs = 1);

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;
  bool ok() const { return mismatched.empty() && missing.empty(); }
};

VerifyReport verify_manifest(const DatasetManifest& manifest);

struct Split {
  std::vector<std::size_t> train;  // positions in manifest.samples
  std::vector<std::size_t> test;
  double fraction = 0.8;
  bool stratified = true;
};

Split split(const DatasetManifest& manifest, double fraction, std::uint64_t seed);

DatasetManifest subset(const DatasetManifest& manifest, const std::vector<std::size_t>& positions);

// Photos from `dir/deformed` and `dir/non_deformed`, centre-cropped and
// resampled to image_size, written under out_dir with a manifest.
DatasetManifest ingest_real(const std::filesystem::path& dir, const std::filesystem::path& out_dir,
                            int image_size = 512);

}  // namespace dentsynth
