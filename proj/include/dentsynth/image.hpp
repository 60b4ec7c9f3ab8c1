#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dentsynth {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kKeyGreen{0, 255, 0};
inline constexpr Rgb kBlack{0, 0, 0};

// 8-bit interleaved RGB, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = kBlack);

  Rgb at(int x, int y) const {
    const std::size_t o = 3 * (static_cast<std::size_t>(y) * width + x);
    return {data[o], data[o + 1], data[o + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t o = 3 * (static_cast<std::size_t>(y) * width + x);
    data[o] = c[0];
    data[o + 1] = c[1];
    data[o + 2] = c[2];
  }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Row-major booleans stored one byte per pixel (0 or 1).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Deterministic PNG encoders: fixed compression settings, no timestamps.
std::vector<std::uint8_t> encode_png(const RgbImage& image);
std::vector<std::uint8_t> encode_png(const BinaryMask& mask);  // 1-bit grayscale
void write_png(const RgbImage& image, const std::filesystem::path& path);
void write_png(const BinaryMask& mask, const std::filesystem::path& path);

// Decodes PNG or JPEG (by signature) into 8-bit RGB.
RgbImage read_image(const std::filesystem::path& path);
RgbImage decode_image(std::span<const std::uint8_t> bytes, const std::string& origin);
BinaryMask read_mask_png(const std::filesystem::path& path);

bool is_image_file(const std::filesystem::path& path);

RgbImage center_crop_square(const RgbImage& image);
// Bilinear resampling with pixel-centre alignment and clamped borders.
RgbImage resize_bilinear(const RgbImage& image, int width, int height);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace dentsynth
