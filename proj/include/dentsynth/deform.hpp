#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dentsynth/geometry.hpp"
#include "dentsynth/label.hpp"
#include "dentsynth/mesh.hpp"
#include "dentsynth/rng.hpp"

namespace dentsynth {

enum class KeyCategory { crush, pinch, fold, twist, crunch, tab, seal, displace };

inline constexpr std::array<KeyCategory, 5> kLatticeCategories = {
    KeyCategory::crush, KeyCategory::pinch, KeyCategory::fold, KeyCategory::twist,
    KeyCategory::crunch};

const char* to_string(KeyCategory category);
bool parse_category(const std::string& text, KeyCategory& out);
bool is_lattice_category(KeyCategory category);

// Named per-vertex offset set (blend shape).
struct ShapeKey {
  std::string name;
  KeyCategory category = KeyCategory::crush;
  std::vector<Vec3> offsets;
};

struct KeyWeight {
  const ShapeKey* key;
  double weight;
};

// v' = v + sum_k w_k * offsets_k, accumulated in list order; normals are
// recomputed afterwards.
Mesh apply_shape_keys(const Mesh& mesh, std::span<const KeyWeight> keys);

struct LatticeResolution {
  int l = 4;
  int m = 4;
  int n = 4;
  friend bool operator==(const LatticeResolution&, const LatticeResolution&) = default;
};

// Trivariate Bernstein free-form deformation lattice. Control point (i, j, k)
// sits at index i + l * (j + m * k).
class Lattice {
 public:
  // Control points evenly spread over `box`, which is the identity deformation.
  static Lattice rest(LatticeResolution resolution, const Box3& box);

  // Rest lattice around the mesh bounds, each side padded by `padding` times
  // the extent on that axis so every vertex is strictly inside.
  static Lattice enclosing(const Mesh& mesh, LatticeResolution resolution, double padding = 0.05);

  LatticeResolution resolution() const { return resolution_; }
  const Box3& rest_box() const { return box_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i + resolution_.l * (j + resolution_.m * k));
  }
  const Vec3& point(int i, int j, int k) const { return points_[index(i, j, k)]; }
  Vec3& point(int i, int j, int k) { return points_[index(i, j, k)]; }
  std::span<const Vec3> points() const { return points_; }
  std::span<Vec3> points() { return points_; }

  // Normalised rest coordinates of control point (i, j, k), each in [0, 1].
  Vec3 parameter(int i, int j, int k) const;

 private:
  LatticeResolution resolution_;
  Box3 box_;
  std::vector<Vec3> points_;
};

// Bernstein FFD of one point. Points outside the rest box pass through.
Vec3 ffd_evaluate(const Lattice& lattice, const Vec3& point);

ShapeKey bake_lattice_key(const Mesh& mesh, const Lattice& rest, const Lattice& deformed,
                          std::string name, KeyCategory category);

// Magnitudes of the procedural control-point edits behind the built-in keys.
struct LatticeKeyParams {
  int crush_count = 3;
  int pinch_count = 2;
  int fold_count = 2;
  int twist_count = 3;
  int crunch_count = 2;
  double crush_depth = 0.16;    // fraction of lattice height pushed down at the top layer
  double pinch_depth = 0.45;    // fraction of the local radius pulled inward
  double fold_shear = 0.14;     // lateral shear of the upper half, fraction of height
  double twist_degrees = 28.0;  // rotation of the top layer
  double crunch_jitter = 0.09;  // jitter amplitude, fraction of extent per axis
  std::uint64_t crunch_seed = 1234;

  int total() const { return crush_count + pinch_count + fold_count + twist_count + crunch_count; }
};

std::vector<ShapeKey> builtin_lattice_keys(const Mesh& mesh, const Lattice& rest,
                                           const LatticeKeyParams& params = {});

// Hinge rotation of a vertex group about an axis, baked as a shape key so a
// weight in [0,1] interpolates between closed and open.
ShapeKey bake_hinge_key(const Mesh& mesh, const std::string& group, const Vec3& pivot,
                        const Vec3& axis, double angle_rad, std::string name,
                        KeyCategory category);

struct DisplaceParams {
  std::uint64_t noise_seed = 0;
  double scale = 40.0;        // 1/m
  double strength = 0.002;    // m
  double bias = 0.0003;       // m
  std::string group = kSideGroup;
};

void validate(const DisplaceParams& params);

// Seeded improved-Perlin gradient noise. |value| <= kAmplitude everywhere and
// the value is exactly 0 at integer lattice points.
class GradientNoise {
 public:
  static constexpr double kAmplitude = 1.0;

  explicit GradientNoise(std::uint64_t seed);
  double operator()(const Vec3& p) const;

  // Sum over 4 octaves of |noise(2^o p)| / 2^o, divided by 1.875 * kAmplitude.
  double hard_turbulence(const Vec3& p) const;

 private:
  std::array<std::uint8_t, 512> perm_;
};

double gradient_noise(const Vec3& point, std::uint64_t seed);
double hard_turbulence(const Vec3& point, std::uint64_t seed);

Mesh apply_displacement(const Mesh& mesh, const DisplaceParams& params, double weight);

struct DeformationState {
  std::map<std::string, double> lattice_weights;
  std::vector<double> displace_weights;
  double tab_open = 0.0;
  double seal_open = 0.0;
  Label label = Label::non_deformed;

  // Lattice categories with at least one key of positive weight.
  int active_categories(std::span<const ShapeKey> lattice_keys) const;
};

// Everything needed to turn a DeformationState into a mesh.
struct ShapeKeyLibrary {
  std::vector<ShapeKey> lattice_keys;
  ShapeKey tab_open;
  ShapeKey seal_open;
  std::vector<DisplaceParams> displacements;
};

struct WeightRanges {
  double lattice_min = 0.3;
  double lattice_max = 1.0;
  double displace_min = 0.2;
  double displace_max = 1.0;
};

struct HingeParams {
  double tab_open_degrees = 75.0;
  double seal_open_degrees = 65.0;
};

ShapeKeyLibrary build_key_library(const Mesh& can, const CanParams& can_params,
                                  LatticeResolution resolution, const LatticeKeyParams& keys,
                                  const HingeParams& hinges,
                                  std::vector<DisplaceParams> displacements);

std::vector<DisplaceParams> default_displacements();

// Throws unless the state satisfies the class rules (tab <= seal, zero weights
// when intact, >= 3 active categories and some displacement when deformed).
void validate(const DeformationState& state, std::span<const ShapeKey> lattice_keys);

DeformationState sample_deformation(Rng& rng, const ShapeKeyLibrary& library, Label label,
                                    const WeightRanges& ranges = {});

Mesh deform_mesh(const Mesh& base, const ShapeKeyLibrary& library, const DeformationState& state);

// Text sidecar: "key <name> <category> <count>" followed by one offset per line.
void save_shape_keys(std::span<const ShapeKey> keys, const std::filesystem::path& path);
std::vector<ShapeKey> load_shape_keys(const std::filesystem::path& path);

}  // namespace dentsynth
