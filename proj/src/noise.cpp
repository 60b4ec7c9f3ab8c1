#include <cmath>
#include <numeric>

#include "dentsynth/deform.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

namespace {

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lerp(double t, double a, double b) { return a + t * (b - a); }

// Dot product with one of the 12 cube-edge gradients (plus 4 repeats).
double grad(std::uint8_t hash, double x, double y, double z) {
  const int h = hash & 15;
  const double u = h < 8 ? x : y;
  const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
  return ((h & 1) == 0 ? u : -u) + ((h & 2) == 0 ? v : -v);
}

}  // namespace

GradientNoise::GradientNoise(std::uint64_t seed) {
  std::array<std::uint8_t, 256> p;
  std::iota(p.begin(), p.end(), std::uint8_t{0});
  Rng rng(seed);
  for (std::size_t i = p.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(p[i], p[j]);
  }
  for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255];
}

double GradientNoise::operator()(const Vec3& pt) const {
  const double fx = std::floor(pt.x), fy = std::floor(pt.y), fz = std::floor(pt.z);
  const int X = static_cast<int>(static_cast<long long>(fx) & 255);
  const int Y = static_cast<int>(static_cast<long long>(fy) & 255);
  const int Z = static_cast<int>(static_cast<long long>(fz) & 255);
  const double x = pt.x - fx, y = pt.y - fy, z = pt.z - fz;
  const double u = fade(x), v = fade(y), w = fade(z);

  const auto& P = perm_;
  const int A = P[X] + Y, AA = P[A] + Z, AB = P[A + 1] + Z;
  const int B = P[X + 1] + Y, BA = P[B] + Z, BB = P[B + 1] + Z;

  return lerp(w,
              lerp(v, lerp(u, grad(P[AA], x, y, z), grad(P[BA], x - 1, y, z)),
                   lerp(u, grad(P[AB], x, y - 1, z), grad(P[BB], x - 1, y - 1, z))),
              lerp(v, lerp(u, grad(P[AA + 1], x, y, z - 1), grad(P[BA + 1], x - 1, y, z - 1)),
                   lerp(u, grad(P[AB + 1], x, y - 1, z - 1),
                        grad(P[BB + 1], x - 1, y - 1, z - 1))));
}

double GradientNoise::hard_turbulence(const Vec3& p) const {
  double sum = 0.0;
  double freq = 1.0;
  for (int octave = 0; octave < 4; ++octave) {
    sum += std::abs((*this)(p * freq)) / freq;
    freq *= 2.0;
  }
  return sum / (1.875 * kAmplitude);
}

double gradient_noise(const Vec3& point, std::uint64_t seed) { return GradientNoise(seed)(point); }

double hard_turbulence(const Vec3& point, std::uint64_t seed) {
  return GradientNoise(seed).hard_turbulence(point);
}

void validate(const DisplaceParams& params) {
  if (!(params.scale > 0.0)) fail(ErrorKind::parameter, "displacement scale must be > 0");
  if (!(params.strength >= 0.0)) fail(ErrorKind::parameter, "displacement strength must be >= 0");
}

Mesh apply_displacement(const Mesh& mesh, const DisplaceParams& params, double weight) {
  validate(params);
  const auto& gate = mesh.group(params.group);
  Mesh out = mesh;
  if (weight == 0.0) return out;
  const GradientNoise noise(params.noise_seed);
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    if (gate[i] == 0.0) continue;
    const Vec3& v = mesh.vertices[i];
    const double amount =
        params.strength * noise.hard_turbulence(v * params.scale) + params.bias;
    out.vertices[i] = v + mesh.normals[i] * (gate[i] * weight * amount);
  }
  recompute_normals(out);
  return out;
}

}  // namespace dentsynth
