#include <algorithm>
#include <set>

#include "dentsynth/deform.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

int DeformationState::active_categories(std::span<const ShapeKey> lattice_keys) const {
  std::set<KeyCategory> active;
  for (const ShapeKey& key : lattice_keys) {
    auto it = lattice_weights.find(key.name);
    if (it != lattice_weights.end() && it->second > 0.0) active.insert(key.category);
  }
  return static_cast<int>(active.size());
}

std::vector<DisplaceParams> default_displacements() {
  return {
      {101, 38.0, 0.0024, 0.0003, kSideGroup},
      {202, 57.0, 0.0018, 0.0002, kSideGroup},
      {303, 83.0, 0.0012, 0.0001, kSideGroup},
  };
}

ShapeKeyLibrary build_key_library(const Mesh& can, const CanParams& can_params,
                                  LatticeResolution resolution, const LatticeKeyParams& keys,
                                  const HingeParams& hinges,
                                  std::vector<DisplaceParams> displacements) {
  for (const DisplaceParams& d : displacements) validate(d);
  ShapeKeyLibrary lib;
  const Lattice rest = Lattice::enclosing(can, resolution);
  lib.lattice_keys = builtin_lattice_keys(can, rest, keys);
  const CanFeatures f = can_features(can_params);
  lib.tab_open = bake_hinge_key(can, kTabGroup, f.tab_hinge_point, f.tab_hinge_axis,
                                deg_to_rad(hinges.tab_open_degrees), "tab_open", KeyCategory::tab);
  lib.seal_open =
      bake_hinge_key(can, kSealGroup, f.seal_hinge_point, f.seal_hinge_axis,
                     deg_to_rad(hinges.seal_open_degrees), "seal_open", KeyCategory::seal);
  lib.displacements = std::move(displacements);
  return lib;
}

void validate(const DeformationState& s, std::span<const ShapeKey> lattice_keys) {
  if (!(s.tab_open >= 0.0 && s.tab_open <= 1.0 && s.seal_open >= 0.0 && s.seal_open <= 1.0))
    fail(ErrorKind::data, "tab/seal state outside [0,1]");
  if (s.tab_open > s.seal_open) fail(ErrorKind::data, "tab is more open than the seal");
  for (const auto& [name, w] : s.lattice_weights)
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::data, "lattice weight for '" + name + "' outside [0,1]");
  for (double w : s.displace_weights)
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::data, "displacement weight outside [0,1]");

  if (s.label == Label::non_deformed) {
    for (const auto& [name, w] : s.lattice_weights)
      if (w != 0.0) fail(ErrorKind::data, "non-deformed sample has active key '" + name + "'");
    for (double w : s.displace_weights)
      if (w != 0.0) fail(ErrorKind::data, "non-deformed sample has active displacement");
    return;
  }
  if (s.active_categories(lattice_keys) < 3)
    fail(ErrorKind::data, "deformed sample has fewer than 3 active lattice categories");
  if (std::none_of(s.displace_weights.begin(), s.displace_weights.end(),
                   [](double w) { return w > 0.0; }))
    fail(ErrorKind::data, "deformed sample has no active displacement");
}

DeformationState sample_deformation(Rng& rng, const ShapeKeyLibrary& lib, Label label,
                                    const WeightRanges& ranges) {
  std::vector<KeyCategory> categories;
  for (KeyCategory c : kLatticeCategories) {
    const bool present = std::any_of(lib.lattice_keys.begin(), lib.lattice_keys.end(),
                                     [c](const ShapeKey& k) { return k.category == c; });
    if (present) categories.push_back(c);
  }
  if (categories.size() < 3)
    fail(ErrorKind::configuration, "need keys from at least 3 lattice categories, have " +
                                       std::to_string(categories.size()));
  if (lib.displacements.empty())
    fail(ErrorKind::configuration, "need at least one displacement variant");

  DeformationState state;
  state.label = label;
  for (const ShapeKey& k : lib.lattice_keys) state.lattice_weights[k.name] = 0.0;
  state.displace_weights.assign(lib.displacements.size(), 0.0);

  // Tab and seal first so both classes consume the stream identically here.
  double tab = rng.uniform();
  double seal = rng.uniform();
  if (tab > seal) std::swap(tab, seal);
  state.tab_open = tab;
  state.seal_open = seal;

  if (label == Label::non_deformed) return state;

  const std::size_t max_types = std::min<std::size_t>(5, categories.size());
  const std::size_t type_count = 3 + static_cast<std::size_t>(rng.below(max_types - 2));
  // Partial Fisher-Yates picks the categories.
  for (std::size_t i = 0; i < type_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(categories.size() - i));
    std::swap(categories[i], categories[j]);
  }
  for (std::size_t c = 0; c < type_count; ++c) {
    std::vector<const ShapeKey*> pool;
    for (const ShapeKey& k : lib.lattice_keys)
      if (k.category == categories[c]) pool.push_back(&k);
    const std::size_t take = 1 + static_cast<std::size_t>(rng.below(pool.size()));
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      state.lattice_weights[pool[i]->name] = rng.uniform(ranges.lattice_min, ranges.lattice_max);
    }
  }
  for (double& w : state.displace_weights) w = rng.uniform(ranges.displace_min, ranges.displace_max);
  return state;
}

Mesh deform_mesh(const Mesh& base, const ShapeKeyLibrary& lib, const DeformationState& state) {
  std::vector<KeyWeight> weights;
  for (const ShapeKey& key : lib.lattice_keys) {
    auto it = state.lattice_weights.find(key.name);
    weights.push_back({&key, it == state.lattice_weights.end() ? 0.0 : it->second});
  }
  weights.push_back({&lib.tab_open, state.tab_open});
  weights.push_back({&lib.seal_open, state.seal_open});
  Mesh mesh = apply_shape_keys(base, weights);
  for (std::size_t d = 0; d < lib.displacements.size() && d < state.displace_weights.size(); ++d)
    if (state.displace_weights[d] > 0.0)
      mesh = apply_displacement(mesh, lib.displacements[d], state.displace_weights[d]);
  return mesh;
}

}  // namespace dentsynth
