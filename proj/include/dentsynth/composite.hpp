#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dentsynth/image.hpp"

namespace dentsynth {

// True exactly where the pixel differs from the key colour.
BinaryMask chroma_mask(const RgbImage& rgb, Rgb key = kKeyGreen);

// True where the Euclidean RGB distance to the key exceeds `tolerance`; for
// renders produced elsewhere that blend their silhouettes.
BinaryMask chroma_mask_threshold(const RgbImage& rgb, Rgb key, double tolerance);

// Square structuring element of side 2*radius+1, pixels outside the frame
// count as false. radius >= 1.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask open(const BinaryMask& mask, int radius);   // dilate(erode(m))
BinaryMask close(const BinaryMask& mask, int radius);  // erode(dilate(m))

struct MorphologyParams {
  int close_radius = 2;
  int open_radius = 1;
  int erode_radius = 1;
};

// close -> open -> erode; a radius of 0 skips that stage.
BinaryMask refine_mask(const BinaryMask& mask, const MorphologyParams& params = {});

double iou(const BinaryMask& a, const BinaryMask& b);

// Centre-crops to a square and resamples bilinearly to width x height.
RgbImage fit_background(const RgbImage& background, int width, int height);

// Foreground where the mask is set (and the pixel is not the key colour),
// fitted background elsewhere. No output pixel equals the key colour.
RgbImage composite(const RgbImage& rgb, const BinaryMask& mask, const RgbImage& background,
                   Rgb key = kKeyGreen);

// Directory of PNG/JPEG backgrounds, indexed once in sorted path order.
class BackgroundPool {
 public:
  explicit BackgroundPool(const std::filesystem::path& root);

  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::filesystem::path>& entries() const { return entries_; }

  // pool[hash(seed, index) mod size].
  std::size_t pick(std::uint64_t seed, std::uint64_t index) const;

  // Decodes the picked entry, moving on to the next one when an entry cannot
  // be decoded. Returns the image and its path relative to the root.
  std::pair<RgbImage, std::string> load_for_sample(std::uint64_t seed, std::uint64_t index) const;

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> entries_;
};

}  // namespace dentsynth
