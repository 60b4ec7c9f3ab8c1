#include "dentsynth/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dentsynth/error.hpp"

namespace dentsynth {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::geometry: return "geometry error";
    case ErrorKind::lookup: return "lookup error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::image: return "image error";
    case ErrorKind::io: return "io error";
    case ErrorKind::data: return "data error";
  }
  return "error";
}

const std::vector<double>& Mesh::group(const std::string& name) const {
  auto it = groups.find(name);
  if (it == groups.end()) fail(ErrorKind::lookup, "unknown vertex group '" + name + "'");
  return it->second;
}

Box3 Mesh::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Box3 box{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Vec3& v : vertices) {
    for (int a = 0; a < 3; ++a) {
      box.min[a] = std::min(box.min[a], v[a]);
      box.max[a] = std::max(box.max[a], v[a]);
    }
  }
  return box;
}

void validate(const Mesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  if (mesh.normals.size() != n || mesh.uvs.size() != n)
    fail(ErrorKind::shape, "mesh attribute arrays do not match the vertex count");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (std::uint32_t idx : mesh.faces[f])
      if (idx >= n)
        fail(ErrorKind::shape, "face " + std::to_string(f) + " references vertex " +
                                   std::to_string(idx) + " >= " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(norm(mesh.normals[i]) - 1.0) > 1e-6)
      fail(ErrorKind::geometry, "normal " + std::to_string(i) + " is not unit length");
  for (const auto& [name, weights] : mesh.groups) {
    if (weights.size() != n)
      fail(ErrorKind::shape, "group '" + name + "' has wrong length");
    for (double w : weights)
      if (!(w >= 0.0 && w <= 1.0))
        fail(ErrorKind::parameter, "group '" + name + "' has a weight outside [0,1]");
  }
}

void recompute_normals(Mesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  std::vector<Vec3> acc(n);
  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const Vec3 fn = cross(b - a, c - a);  // length = 2 * area
    for (std::uint32_t idx : f) acc[idx] += fn;
  }

  // Coincident vertices (UV seams) share their accumulated normal when the
  // two sides meet at less than the crease angle; sharper junctions such as
  // cap rims stay split.
  constexpr double kCreaseCos = 0.5;
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    const Vec3& p = mesh.vertices[a];
    const Vec3& q = mesh.vertices[b];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
    if (p.z != q.z) return p.z < q.z;
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Vec3> welded = acc;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && mesh.vertices[order[end]] == mesh.vertices[order[start]]) ++end;
    for (std::size_t i = start; i < end; ++i) {
      const Vec3 ni = normalized(acc[order[i]]);
      for (std::size_t j = start; j < end; ++j) {
        if (i == j) continue;
        if (dot(ni, normalized(acc[order[j]])) > kCreaseCos) welded[order[i]] += acc[order[j]];
      }
    }
    start = end;
  }

  mesh.normals.resize(n, Vec3{0, 0, 1});
  for (std::size_t i = 0; i < n; ++i) {
    const double len = norm(welded[i]);
    if (len > 0.0 && std::isfinite(len)) mesh.normals[i] = welded[i] / len;
  }
}

void validate(const CanParams& p) {
  if (!(p.radius > 0.0)) fail(ErrorKind::parameter, "can radius must be > 0");
  if (!(p.height > 0.0)) fail(ErrorKind::parameter, "can height must be > 0");
  if (!(p.taper_fraction >= 0.0 && p.taper_fraction < 0.5))
    fail(ErrorKind::parameter, "can taper_fraction must lie in [0, 0.5)");
  if (p.radial_segments < 8) fail(ErrorKind::parameter, "can radial_segments must be >= 8");
  if (p.height_segments < 8) fail(ErrorKind::parameter, "can height_segments must be >= 8");
}

std::size_t can_vertex_count(const CanParams& p) {
  const std::size_t n = static_cast<std::size_t>(p.radial_segments);
  const std::size_t rings = static_cast<std::size_t>(p.height_segments) + 1 + 2 * kTaperRings;
  return rings * (n + 1) + 2 * (1 + kCapRings * n) + kTabColumns * kTabRows;
}

namespace {

// Layout of the top cap shared by generate_can and can_features.
constexpr double kSealHalfAngleDeg = 35.0;
constexpr double kSealInner = 0.45;  // fraction of rim radius
constexpr double kSealOuter = 0.86;
constexpr double kTabXMin = -0.55;   // fractions of rim radius
constexpr double kTabXMax = 0.30;
constexpr double kTabHalfWidth = 0.20;
constexpr double kTabLift = 0.0006;  // m above the cap

double rim_radius(const CanParams& p) { return p.radius * (1.0 - p.taper_fraction); }

}  // namespace

CanFeatures can_features(const CanParams& p) {
  const double top = 0.5 * p.height;
  const double rr = rim_radius(p);
  CanFeatures f;
  f.tab_hinge_point = {0.0, 0.0, top + kTabLift};
  f.tab_hinge_axis = {0.0, 1.0, 0.0};
  f.seal_hinge_point = {kSealInner * rr * 0.9, 0.0, top};
  f.seal_hinge_axis = {0.0, 1.0, 0.0};
  return f;
}

Mesh generate_can(const CanParams& p) {
  validate(p);
  const int n = p.radial_segments;
  const int s = p.height_segments;
  const double z0 = -0.5 * p.height;
  const double z1 = 0.5 * p.height;
  const double taper_h = p.taper_fraction * p.height;
  const double rr = rim_radius(p);

  Mesh mesh;
  const std::size_t total = can_vertex_count(p);
  mesh.vertices.reserve(total);
  mesh.normals.reserve(total);
  mesh.uvs.reserve(total);
  std::vector<double> side, label, tab, seal;

  auto push = [&](Vec3 pos, Vec3 normal, Vec2 uv, double w_side, double w_label, double w_tab,
                  double w_seal) {
    mesh.vertices.push_back(pos);
    mesh.normals.push_back(normalized(normal));
    mesh.uvs.push_back(uv);
    side.push_back(w_side);
    label.push_back(w_label);
    tab.push_back(w_tab);
    seal.push_back(w_seal);
    return static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  };

  // Wall profile from the bottom rim to the top rim: (radius, z, side weight,
  // label weight, profile normal in the (r, z) plane).
  struct Ring {
    double r, z, w_side, w_label, nr, nz;
  };
  std::vector<Ring> rings;
  const double dr = p.radius - rr;
  const double taper_len = std::hypot(dr, taper_h);
  const double bottom_nr = taper_len > 0 ? taper_h / taper_len : 1.0;
  const double bottom_nz = taper_len > 0 ? -dr / taper_len : 0.0;
  for (int k = 0; k < kTaperRings; ++k) {
    const double t = static_cast<double>(k) / kTaperRings;
    rings.push_back({rr + dr * t, z0 + taper_h * t, t, 0.0, bottom_nr, bottom_nz});
  }
  for (int j = 0; j <= s; ++j) {
    const double z = z0 + taper_h + (p.height - 2.0 * taper_h) * j / s;
    double nr = 1.0, nz = 0.0;
    if (j == 0) { nr = 1.0 + bottom_nr; nz = bottom_nz; }
    if (j == s) { nr = 1.0 + bottom_nr; nz = -bottom_nz; }
    rings.push_back({p.radius, z, 1.0, 1.0, nr, nz});
  }
  for (int k = 1; k <= kTaperRings; ++k) {
    const double t = static_cast<double>(k) / kTaperRings;
    rings.push_back({p.radius - dr * t, z1 - taper_h + taper_h * t, 1.0 - t, 0.0, bottom_nr,
                     -bottom_nz});
  }

  const std::uint32_t side_base = 0;
  for (const Ring& ring : rings) {
    for (int i = 0; i <= n; ++i) {
      // The seam column (i == n) repeats column 0 bit-for-bit so the two
      // copies stay coincident under any position-driven deformation.
      const double a = 2.0 * kPi * (i % n) / n;
      const double c = std::cos(a), sn = std::sin(a);
      push({ring.r * c, ring.r * sn, ring.z}, {ring.nr * c, ring.nr * sn, ring.nz},
           {static_cast<double>(i) / n, (ring.z - z0) / p.height}, ring.w_side, ring.w_label, 0,
           0);
    }
  }
  const int ring_count = static_cast<int>(rings.size());
  auto side_idx = [&](int ring, int i) {
    return side_base + static_cast<std::uint32_t>(ring * (n + 1) + i);
  };
  for (int r = 0; r + 1 < ring_count; ++r) {
    for (int i = 0; i < n; ++i) {
      const auto a = side_idx(r, i), b = side_idx(r, i + 1), c = side_idx(r + 1, i + 1),
                 d = side_idx(r + 1, i);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }

  // Caps: a centre vertex plus kCapRings concentric rings out to the rim.
  auto build_cap = [&](double z, bool top) {
    const Vec3 normal{0, 0, top ? 1.0 : -1.0};
    auto uv = [&](double x, double y) {
      return Vec2{0.5 + x / (2.0 * p.radius), 0.5 + y / (2.0 * p.radius)};
    };
    const std::uint32_t centre = push({0, 0, z}, normal, uv(0, 0), 0, 0, 0, 0);
    const std::uint32_t first = centre + 1;
    for (int k = 1; k <= kCapRings; ++k) {
      const double frac = static_cast<double>(k) / kCapRings;
      for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        double deg = a * 180.0 / kPi;
        if (deg > 180.0) deg -= 360.0;
        const bool in_seal = top && std::abs(deg) <= kSealHalfAngleDeg && frac >= kSealInner &&
                             frac <= kSealOuter;
        const double x = rr * frac * std::cos(a), y = rr * frac * std::sin(a);
        push({x, y, z}, normal, uv(x, y), 0, 0, 0, in_seal ? 1.0 : 0.0);
      }
    }
    auto ring_idx = [&](int k, int i) {
      return first + static_cast<std::uint32_t>((k - 1) * n + (i % n));
    };
    for (int i = 0; i < n; ++i) {
      const auto b = ring_idx(1, i), c = ring_idx(1, i + 1);
      if (top) mesh.faces.push_back({centre, b, c});
      else mesh.faces.push_back({centre, c, b});
    }
    for (int k = 1; k < kCapRings; ++k) {
      for (int i = 0; i < n; ++i) {
        const auto a = ring_idx(k, i), b = ring_idx(k, i + 1), c = ring_idx(k + 1, i + 1),
                   d = ring_idx(k + 1, i);
        if (top) {
          mesh.faces.push_back({a, d, c});
          mesh.faces.push_back({a, c, b});
        } else {
          mesh.faces.push_back({a, c, d});
          mesh.faces.push_back({a, b, c});
        }
      }
    }
  };
  build_cap(z0, false);
  build_cap(z1, true);

  // Pull tab: a flat plate above the top cap, hinged at the rivet (x = 0).
  const std::uint32_t tab_first = static_cast<std::uint32_t>(mesh.vertices.size());
  for (int row = 0; row < kTabRows; ++row) {
    for (int col = 0; col < kTabColumns; ++col) {
      const double x = rr * (kTabXMin + (kTabXMax - kTabXMin) * col / (kTabColumns - 1));
      const double y = rr * kTabHalfWidth * (2.0 * row / (kTabRows - 1) - 1.0);
      push({x, y, z1 + kTabLift}, {0, 0, 1},
           {0.5 + x / (2.0 * p.radius), 0.5 + y / (2.0 * p.radius)}, 0, 0, 1.0, 0);
    }
  }
  for (int row = 0; row + 1 < kTabRows; ++row) {
    for (int col = 0; col + 1 < kTabColumns; ++col) {
      const auto a = tab_first + static_cast<std::uint32_t>(row * kTabColumns + col);
      const auto b = a + 1;
      const auto d = a + static_cast<std::uint32_t>(kTabColumns);
      const auto c = d + 1;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }

  mesh.groups[kSideGroup] = std::move(side);
  mesh.groups[kLabelGroup] = std::move(label);
  mesh.groups[kTabGroup] = std::move(tab);
  mesh.groups[kSealGroup] = std::move(seal);
  return mesh;
}

}  // namespace dentsynth
