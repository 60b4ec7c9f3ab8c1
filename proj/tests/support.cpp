#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dentsynth/rng.hpp"

namespace testsupport {

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path();
  dentsynth::Rng rng(static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
  do {
    path_ = base / ("dentsynth_" + tag + "_" + std::to_string(++counter) + "_" + std::to_string(rng.below(1u << 30)));
  } while (std::filesystem::exists(path_));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

dentsynth::RgbImage procedural_background(int size, std::uint64_t seed) {
  dentsynth::Rng rng(seed);
  dentsynth::RgbImage img(size, size);
  double base[3];
  double grad[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = rng.uniform(30, 220);
    grad[c] = rng.uniform(-80, 80);
  }
  const double freq = rng.uniform(0.02, 0.15);
  const double angle = rng.uniform(0, 6.283);
  const double stripe = rng.uniform(10, 60);
  const double bx = rng.uniform(0, size);
  const double by = rng.uniform(0, size);
  const double br = rng.uniform(size / 8.0, size / 3.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = static_cast<double>(x) / size;
      const double v = static_cast<double>(y) / size;
      const double s = std::sin(freq * (std::cos(angle) * x + std::sin(angle) * y));
      const double blob = std::hypot(x - bx, y - by) < br ? 40.0 : 0.0;
      dentsynth::Rgb px;
      for (int c = 0; c < 3; ++c) {
        const double val = base[c] + grad[c] * (c == 1 ? v : u) + stripe * s + (c == 0 ? blob : -blob) +
                           rng.uniform(-12, 12);
        px[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(std::clamp(val, 0.0, 255.0));
      }
      if (px == dentsynth::kKeyGreen) px[1] = 254;
      img.set(x, y, px);
    }
  }
  return img;
}

std::filesystem::path write_background_pool(const std::filesystem::path& dir, int count, int size,
                                            std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "bg_%03d.png", i);
    dentsynth::write_png(procedural_background(size, seed * 1000 + static_cast<std::uint64_t>(i)), dir / name);
  }
  return dir;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testsupport

#include <cstdio>
#include <jpeglib.h>

namespace testsupport {

void write_jpeg(const dentsynth::RgbImage& image, const std::filesystem::path& path, int quality) {
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(&image.data[3 * static_cast<std::size_t>(cinfo.next_scanline) * image.width]);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

}  // namespace testsupport
