#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dentsynth/image.hpp"

namespace testsupport {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Colourful procedural backgrounds (gradients, stripes, blobs) that never
// contain the key green. Returns the directory.
std::filesystem::path write_background_pool(const std::filesystem::path& dir, int count, int size,
                                            std::uint64_t seed);

dentsynth::RgbImage procedural_background(int size, std::uint64_t seed);

std::string read_text(const std::filesystem::path& path);

}  // namespace testsupport

namespace testsupport {

// Baseline JPEG via libjpeg, for decoder tests.
void write_jpeg(const dentsynth::RgbImage& image, const std::filesystem::path& path, int quality = 95);

}  // namespace testsupport
