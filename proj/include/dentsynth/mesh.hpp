#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dentsynth/geometry.hpp"

namespace dentsynth {

using Face = std::array<std::uint32_t, 3>;

// Triangle mesh with per-vertex attributes and named vertex groups. Group
// weights are stored densely, one entry per vertex.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;
  std::map<std::string, std::vector<double>> groups;

  std::size_t vertex_count() const { return vertices.size(); }

  // Weight of `group` at every vertex; throws lookup error if absent.
  const std::vector<double>& group(const std::string& name) const;
  bool has_group(const std::string& name) const { return groups.count(name) != 0; }

  Box3 bounds() const;
};

// Throws if any of the Mesh invariants is violated (face index range, unit
// normals, weights in [0,1], attribute array lengths).
void validate(const Mesh& mesh);

// Area-weighted vertex normals from the current faces. Vertices that end up
// with a zero normal keep their previous one.
void recompute_normals(Mesh& mesh);

// Group names written by generate_can.
inline constexpr const char* kSideGroup = "side";    // displaceable lateral wall
inline constexpr const char* kLabelGroup = "label";  // straight wall carrying the printed label
inline constexpr const char* kTabGroup = "tab";
inline constexpr const char* kSealGroup = "seal";

struct CanParams {
  double radius = 0.033;
  double height = 0.115;
  double taper_fraction = 0.12;
  int radial_segments = 64;
  int height_segments = 48;
};

void validate(const CanParams& params);

// Fixed topology constants of the generated can.
inline constexpr int kTaperRings = 2;     // extra wall rings per tapered rim
inline constexpr int kCapRings = 6;       // concentric rings on each cap
inline constexpr int kTabColumns = 5;
inline constexpr int kTabRows = 3;

// Closed-form vertex count of generate_can for the given parameters.
std::size_t can_vertex_count(const CanParams& params);

// Hinge geometry of the tab and seal, needed to bake the opening keys.
struct CanFeatures {
  Vec3 tab_hinge_point;
  Vec3 tab_hinge_axis;
  Vec3 seal_hinge_point;
  Vec3 seal_hinge_axis;
};

CanFeatures can_features(const CanParams& params);

// Parametric 330 ml-style can centred on the origin with its axis along +z.
Mesh generate_can(const CanParams& params);

// Wavefront OBJ. Group membership lives in a sidecar `<stem>.groups` next to
// the mesh file.
Mesh load_obj(const std::filesystem::path& path);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

std::filesystem::path groups_sidecar_path(const std::filesystem::path& obj_path);

}  // namespace dentsynth
