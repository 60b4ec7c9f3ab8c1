#include <vector>

#include "dentsynth/analytics.hpp"
#include "dentsynth/error.hpp"
#include "parallel.hpp"

namespace dentsynth {

namespace {

// Overlap-weighted box filter along one axis: out[j] averages src over
// [j*n/m, (j+1)*n/m).
std::vector<std::pair<int, double>> area_taps(int n, int m, int j) {
  const double scale = static_cast<double>(n) / m;
  const double lo = j * scale;
  const double hi = (j + 1) * scale;
  std::vector<std::pair<int, double>> taps;
  for (int p = static_cast<int>(lo); p < n && p < hi; ++p) {
    const double w = std::min<double>(p + 1, hi) - std::max<double>(p, lo);
    if (w > 0.0) taps.emplace_back(p, w / scale);
  }
  return taps;
}

}  // namespace

Eigen::VectorXd extract_features(const RgbImage& image) {
  if (image.width < 1 || image.height < 1) fail(ErrorKind::image, "cannot extract features from an empty image");
  const int w = image.width;
  const int h = image.height;
  std::vector<double> luma(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < luma.size(); ++i) {
    const std::uint8_t* p = &image.data[3 * i];
    luma[i] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
  }
  // Horizontal pass into a h x 32 buffer, then vertical.
  std::vector<double> rows(static_cast<std::size_t>(h) * kFeatureSide, 0.0);
  for (int j = 0; j < kFeatureSide; ++j) {
    const auto taps = area_taps(w, kFeatureSide, j);
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (auto [x, wt] : taps) acc += wt * luma[static_cast<std::size_t>(y) * w + x];
      rows[static_cast<std::size_t>(y) * kFeatureSide + j] = acc;
    }
  }
  Eigen::VectorXd out(kFeatureDim);
  for (int i = 0; i < kFeatureSide; ++i) {
    const auto taps = area_taps(h, kFeatureSide, i);
    for (int j = 0; j < kFeatureSide; ++j) {
      double acc = 0.0;
      for (auto [y, wt] : taps) acc += wt * rows[static_cast<std::size_t>(y) * kFeatureSide + j];
      out[i * kFeatureSide + j] = acc;
    }
  }
  return out;
}

Eigen::MatrixXd feature_matrix(const DatasetManifest& manifest, int jobs) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(manifest.samples.size()), kFeatureDim);
  detail::parallel_for(manifest.samples.size(), jobs, [&](std::size_t i) {
    x.row(static_cast<Eigen::Index>(i)) = extract_features(read_image(manifest.image_path(manifest.samples[i]))).transpose();
  });
  return x;
}

std::vector<Label> labels_of(const DatasetManifest& manifest) {
  std::vector<Label> out;
  out.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) out.push_back(s.label);
  return out;
}

}  // namespace dentsynth
