#include <algorithm>
#include <cmath>

#include "dentsynth/composite.hpp"
#include "dentsynth/error.hpp"
#include "dentsynth/rng.hpp"

namespace dentsynth {

BinaryMask chroma_mask(const RgbImage& rgb, Rgb key) {
  BinaryMask mask(rgb.width, rgb.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const std::uint8_t* p = rgb.data.data() + 3 * i;
    mask.bits[i] = (p[0] != key[0] || p[1] != key[1] || p[2] != key[2]) ? 1 : 0;
  }
  return mask;
}

BinaryMask chroma_mask_threshold(const RgbImage& rgb, Rgb key, double tolerance) {
  BinaryMask mask(rgb.width, rgb.height);
  const double tol2 = tolerance * tolerance;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const std::uint8_t* p = rgb.data.data() + 3 * i;
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(p[c]) - key[static_cast<std::size_t>(c)];
      d2 += d * d;
    }
    mask.bits[i] = d2 > tol2 ? 1 : 0;
  }
  return mask;
}

namespace {

// One separable pass along rows (horizontal) or columns. With `all` the
// output is set when every in-window pixel is set and the window lies fully
// inside the frame (erosion); otherwise when any is set (dilation).
BinaryMask window_pass(const BinaryMask& in, int radius, bool horizontal, bool all) {
  BinaryMask out(in.width, in.height);
  const int lines = horizontal ? in.height : in.width;
  const int len = horizontal ? in.width : in.height;
  const int full = 2 * radius + 1;
  std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
  for (int line = 0; line < lines; ++line) {
    auto get = [&](int t) { return horizontal ? in.at(t, line) : in.at(line, t); };
    prefix[0] = 0;
    for (int t = 0; t < len; ++t) prefix[static_cast<std::size_t>(t) + 1] = prefix[static_cast<std::size_t>(t)] + (get(t) ? 1 : 0);
    for (int t = 0; t < len; ++t) {
      const int lo = std::max(0, t - radius);
      const int hi = std::min(len - 1, t + radius);
      const int count = prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
      const bool v = all ? count == full : count > 0;
      if (horizontal) out.set(t, line, v);
      else out.set(line, t, v);
    }
  }
  return out;
}

void check_radius(int radius) {
  if (radius < 1) fail(ErrorKind::parameter, "morphology radius must be >= 1");
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) {
  check_radius(radius);
  return window_pass(window_pass(mask, radius, true, true), radius, false, true);
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  check_radius(radius);
  return window_pass(window_pass(mask, radius, true, false), radius, false, false);
}

BinaryMask open(const BinaryMask& mask, int radius) { return dilate(erode(mask, radius), radius); }

BinaryMask close(const BinaryMask& mask, int radius) { return erode(dilate(mask, radius), radius); }

BinaryMask refine_mask(const BinaryMask& mask, const MorphologyParams& params) {
  BinaryMask m = mask;
  if (params.close_radius > 0) m = close(m, params.close_radius);
  if (params.open_radius > 0) m = open(m, params.open_radius);
  if (params.erode_radius > 0) m = erode(m, params.erode_radius);
  return m;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height)
    fail(ErrorKind::shape, "mask dimensions differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += (a.bits[i] & b.bits[i]);
    uni += (a.bits[i] | b.bits[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

RgbImage fit_background(const RgbImage& background, int width, int height) {
  if (background.width <= 0 || background.height <= 0)
    fail(ErrorKind::image, "background image is empty");
  const RgbImage square = center_crop_square(background);
  if (square.width == width && square.height == height) return square;
  return resize_bilinear(square, width, height);
}

RgbImage composite(const RgbImage& rgb, const BinaryMask& mask, const RgbImage& background, Rgb key) {
  if (mask.width != rgb.width || mask.height != rgb.height)
    fail(ErrorKind::shape, "mask and image dimensions differ");
  const RgbImage bg = fit_background(background, rgb.width, rgb.height);
  Rgb guard = key;
  guard[1] = key[1] > 0 ? static_cast<std::uint8_t>(key[1] - 1) : std::uint8_t{1};
  RgbImage out(rgb.width, rgb.height);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const Rgb fg = rgb.at(x, y);
      Rgb c = (mask.at(x, y) && fg != key) ? fg : bg.at(x, y);
      if (c == key) c = guard;
      out.set(x, y, c);
    }
  }
  return out;
}

BackgroundPool::BackgroundPool(const std::filesystem::path& root) : root_(root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec))
    fail(ErrorKind::data, "background pool directory does not exist: " + root.string());
  for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
       !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_regular_file() && is_image_file(it->path()))
      entries_.push_back(std::filesystem::relative(it->path(), root));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });
  if (entries_.empty())
    fail(ErrorKind::data, "background pool is empty: " + root.string());
}

std::size_t BackgroundPool::pick(std::uint64_t seed, std::uint64_t index) const {
  return static_cast<std::size_t>(derive_seed(seed, index, StreamPurpose::background) % entries_.size());
}

std::pair<RgbImage, std::string> BackgroundPool::load_for_sample(std::uint64_t seed,
                                                                 std::uint64_t index) const {
  const std::size_t first = pick(seed, index);
  std::string last_error;
  for (std::size_t attempt = 0; attempt < entries_.size(); ++attempt) {
    const auto& rel = entries_[(first + attempt) % entries_.size()];
    try {
      RgbImage img = read_image(root_ / rel);
      if (img.width > 0 && img.height > 0) return {std::move(img), rel.generic_string()};
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  fail(ErrorKind::image, "no decodable background in pool " + root_.string() + ": " + last_error);
}

}  // namespace dentsynth
