#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dentsynth/deform.hpp"
#include "dentsynth/error.hpp"

namespace dentsynth {

const char* to_string(KeyCategory category) {
  switch (category) {
    case KeyCategory::crush: return "crush";
    case KeyCategory::pinch: return "pinch";
    case KeyCategory::fold: return "fold";
    case KeyCategory::twist: return "twist";
    case KeyCategory::crunch: return "crunch";
    case KeyCategory::tab: return "tab";
    case KeyCategory::seal: return "seal";
    case KeyCategory::displace: return "displace";
  }
  return "?";
}

bool parse_category(const std::string& text, KeyCategory& out) {
  for (auto c : {KeyCategory::crush, KeyCategory::pinch, KeyCategory::fold, KeyCategory::twist,
                 KeyCategory::crunch, KeyCategory::tab, KeyCategory::seal,
                 KeyCategory::displace}) {
    if (text == to_string(c)) {
      out = c;
      return true;
    }
  }
  return false;
}

bool is_lattice_category(KeyCategory category) {
  return std::find(kLatticeCategories.begin(), kLatticeCategories.end(), category) !=
         kLatticeCategories.end();
}

Mesh apply_shape_keys(const Mesh& mesh, std::span<const KeyWeight> keys) {
  for (const KeyWeight& kw : keys)
    if (kw.key->offsets.size() != mesh.vertices.size())
      fail(ErrorKind::shape, "shape key '" + kw.key->name + "' has " +
                                 std::to_string(kw.key->offsets.size()) + " offsets for " +
                                 std::to_string(mesh.vertices.size()) + " vertices");
  Mesh out = mesh;
  for (const KeyWeight& kw : keys) {
    if (kw.weight == 0.0) continue;
    for (std::size_t i = 0; i < out.vertices.size(); ++i)
      out.vertices[i] += kw.weight * kw.key->offsets[i];
  }
  recompute_normals(out);
  return out;
}

Lattice Lattice::rest(LatticeResolution res, const Box3& box) {
  if (res.l < 2 || res.m < 2 || res.n < 2)
    fail(ErrorKind::parameter, "lattice resolution must be >= 2 on every axis");
  Lattice lat;
  lat.resolution_ = res;
  lat.box_ = box;
  lat.points_.resize(static_cast<std::size_t>(res.l) * res.m * res.n);
  const Vec3 ext = box.extent();
  for (int k = 0; k < res.n; ++k)
    for (int j = 0; j < res.m; ++j)
      for (int i = 0; i < res.l; ++i) {
        const Vec3 t = lat.parameter(i, j, k);
        lat.point(i, j, k) = {box.min.x + t.x * ext.x, box.min.y + t.y * ext.y,
                              box.min.z + t.z * ext.z};
      }
  return lat;
}

Lattice Lattice::enclosing(const Mesh& mesh, LatticeResolution res, double padding) {
  Box3 box = mesh.bounds();
  const Vec3 ext = box.extent();
  for (int a = 0; a < 3; ++a) {
    const double pad = std::max(padding * ext[a], 1e-6);
    box.min[a] -= pad;
    box.max[a] += pad;
  }
  return rest(res, box);
}

Vec3 Lattice::parameter(int i, int j, int k) const {
  return {static_cast<double>(i) / (resolution_.l - 1),
          static_cast<double>(j) / (resolution_.m - 1),
          static_cast<double>(k) / (resolution_.n - 1)};
}

namespace {

// Bernstein basis values B_i^{count-1}(t) for i in [0, count).
void bernstein(int count, double t, double* out) {
  const int degree = count - 1;
  double binom = 1.0;
  for (int i = 0; i <= degree; ++i) {
    out[i] = binom * std::pow(t, i) * std::pow(1.0 - t, degree - i);
    binom = binom * (degree - i) / (i + 1);
  }
}

}  // namespace

Vec3 ffd_evaluate(const Lattice& lattice, const Vec3& point) {
  const Box3& box = lattice.rest_box();
  const Vec3 ext = box.extent();
  if (!(ext.x > 0.0 && ext.y > 0.0 && ext.z > 0.0))
    fail(ErrorKind::geometry, "lattice rest box has zero extent on some axis");
  if (!box.contains(point)) return point;

  const auto res = lattice.resolution();
  std::vector<double> bs(static_cast<std::size_t>(res.l + res.m + res.n));
  double* bu = bs.data();
  double* bv = bu + res.l;
  double* bw = bv + res.m;
  bernstein(res.l, (point.x - box.min.x) / ext.x, bu);
  bernstein(res.m, (point.y - box.min.y) / ext.y, bv);
  bernstein(res.n, (point.z - box.min.z) / ext.z, bw);

  Vec3 out;
  for (int k = 0; k < res.n; ++k) {
    for (int j = 0; j < res.m; ++j) {
      const double wjk = bv[j] * bw[k];
      for (int i = 0; i < res.l; ++i) out += (bu[i] * wjk) * lattice.point(i, j, k);
    }
  }
  return out;
}

ShapeKey bake_lattice_key(const Mesh& mesh, const Lattice& rest, const Lattice& deformed,
                          std::string name, KeyCategory category) {
  if (!(rest.resolution() == deformed.resolution()))
    fail(ErrorKind::shape, "lattice resolutions differ for key '" + name + "'");
  if (!(rest.rest_box() == deformed.rest_box()))
    fail(ErrorKind::shape, "lattice rest boxes differ for key '" + name + "'");
  ShapeKey key{std::move(name), category, {}};
  key.offsets.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) key.offsets.push_back(ffd_evaluate(deformed, v) - v);
  return key;
}

namespace {

Vec3 rotate_about(const Vec3& v, const Vec3& pivot, const Vec3& axis, double angle) {
  const Vec3 k = normalized(axis);
  const Vec3 p = v - pivot;
  const double c = std::cos(angle), s = std::sin(angle);
  return pivot + p * c + cross(k, p) * s + k * (dot(k, p) * (1.0 - c));
}

template <typename Edit>
ShapeKey edit_and_bake(const Mesh& mesh, const Lattice& rest, std::string name,
                       KeyCategory category, Edit edit) {
  Lattice deformed = rest;
  const auto res = rest.resolution();
  for (int k = 0; k < res.n; ++k)
    for (int j = 0; j < res.m; ++j)
      for (int i = 0; i < res.l; ++i) edit(deformed.point(i, j, k), rest.parameter(i, j, k));
  return bake_lattice_key(mesh, rest, deformed, std::move(name), category);
}

}  // namespace

std::vector<ShapeKey> builtin_lattice_keys(const Mesh& mesh, const Lattice& rest,
                                           const LatticeKeyParams& kp) {
  if (!mesh.has_group(kSideGroup))
    fail(ErrorKind::lookup, "builtin lattice keys need a '" + std::string(kSideGroup) +
                                "' vertex group");
  const Box3& box = rest.rest_box();
  const Vec3 ext = box.extent();
  const Vec3 centre = (box.min + box.max) * 0.5;
  std::vector<ShapeKey> keys;
  auto name = [](KeyCategory c, int v) { return std::string(to_string(c)) + "_" + std::to_string(v); };

  // Axial compression of the upper layers, optionally tilted to one side,
  // with the wall bulging outward where it is squashed.
  for (int v = 0; v < kp.crush_count; ++v) {
    const double depth = kp.crush_depth * (1.0 + 0.25 * v);
    const double tilt = v == 0 ? 0.0 : 0.6;
    const double dir = 2.0 * kPi * v / std::max(kp.crush_count, 1);
    keys.push_back(edit_and_bake(mesh, rest, name(KeyCategory::crush, v), KeyCategory::crush,
                                 [&](Vec3& p, const Vec3& t) {
                                   const double side = (2.0 * t.x - 1.0) * std::cos(dir) +
                                                       (2.0 * t.y - 1.0) * std::sin(dir);
                                   p.z -= depth * ext.z * t.z * t.z * (1.0 + tilt * side);
                                   const double bulge = 0.5 * depth * std::sin(kPi * t.z);
                                   p.x += (p.x - centre.x) * bulge;
                                   p.y += (p.y - centre.y) * bulge;
                                 }));
  }
  // Inward squeeze along one horizontal direction around mid-height.
  for (int v = 0; v < kp.pinch_count; ++v) {
    const double a = 0.5 * kPi * v + (v >= 2 ? 0.25 * kPi : 0.0);
    const Vec3 dir{std::cos(a), std::sin(a), 0.0};
    const double level = 0.42 + 0.16 * (v % 2);
    keys.push_back(edit_and_bake(mesh, rest, name(KeyCategory::pinch, v), KeyCategory::pinch,
                                 [&](Vec3& p, const Vec3& t) {
                                   const double w = std::exp(-std::pow((t.z - level) / 0.22, 2));
                                   const double q = dot(p - centre, dir);
                                   p -= dir * (q * kp.pinch_depth * w);
                                 }));
  }
  // Lateral shear of the upper half: the can buckles sideways.
  for (int v = 0; v < kp.fold_count; ++v) {
    const double a = 2.0 * kPi * v / std::max(kp.fold_count, 1) + kPi / 6.0;
    const Vec3 dir{std::cos(a), std::sin(a), 0.0};
    keys.push_back(edit_and_bake(mesh, rest, name(KeyCategory::fold, v), KeyCategory::fold,
                                 [&](Vec3& p, const Vec3& t) {
                                   const double h = std::max(0.0, t.z - 0.45) / 0.55;
                                   p += dir * (kp.fold_shear * ext.z * h * h);
                                   const double kink = std::exp(-std::pow((t.z - 0.5) / 0.2, 2));
                                   const double q = dot(p - centre, dir);
                                   if (q > 0.0) p -= dir * (0.6 * q * kink * kp.fold_shear * 2.0);
                                 }));
  }
  // Every horizontal layer rotated about the axis in proportion to height.
  for (int v = 0; v < kp.twist_count; ++v) {
    const double sign = v % 2 == 0 ? 1.0 : -1.0;
    const double angle = deg_to_rad(kp.twist_degrees) * sign * (1.0 + 0.3 * (v / 2));
    keys.push_back(edit_and_bake(mesh, rest, name(KeyCategory::twist, v), KeyCategory::twist,
                                 [&](Vec3& p, const Vec3& t) {
                                   p = rotate_about(p, centre, {0, 0, 1}, angle * t.z);
                                 }));
  }
  // Seeded jitter of every control point.
  for (int v = 0; v < kp.crunch_count; ++v) {
    Rng rng = Rng::stream(kp.crunch_seed, static_cast<std::uint64_t>(v), StreamPurpose::crunch);
    keys.push_back(edit_and_bake(mesh, rest, name(KeyCategory::crunch, v), KeyCategory::crunch,
                                 [&](Vec3& p, const Vec3&) {
                                   for (int axis = 0; axis < 3; ++axis)
                                     p[axis] += rng.uniform(-1.0, 1.0) * kp.crunch_jitter * ext[axis];
                                 }));
  }
  return keys;
}

ShapeKey bake_hinge_key(const Mesh& mesh, const std::string& group, const Vec3& pivot,
                        const Vec3& axis, double angle_rad, std::string name,
                        KeyCategory category) {
  const auto& weights = mesh.group(group);
  ShapeKey key{std::move(name), category, std::vector<Vec3>(mesh.vertices.size())};
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const Vec3& v = mesh.vertices[i];
    key.offsets[i] = (rotate_about(v, pivot, axis, angle_rad) - v) * weights[i];
  }
  return key;
}

void save_shape_keys(std::span<const ShapeKey> keys, const std::filesystem::path& path) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double x) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
  };
  for (const ShapeKey& key : keys) {
    out << "key " << key.name << ' ' << to_string(key.category) << ' ' << key.offsets.size()
        << '\n';
    for (const Vec3& o : key.offsets) out << num(o.x) << ' ' << num(o.y) << ' ' << num(o.z) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::io, "cannot write shape keys to " + path.string());
  file << out.str();
}

std::vector<ShapeKey> load_shape_keys(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open shape key file " + path.string());
  std::vector<ShapeKey> keys;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream hdr(line);
    std::string tag, name, category;
    std::size_t count = 0;
    if (!(hdr >> tag >> name >> category >> count) || tag != "key") bad("expected a key header");
    ShapeKey key;
    key.name = name;
    if (!parse_category(category, key.category)) bad("unknown category '" + category + "'");
    key.offsets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) bad("unexpected end of file");
      ++line_no;
      Vec3 o;
      const char* p = line.data();
      const char* end = p + line.size();
      for (int axis = 0; axis < 3; ++axis) {
        while (p < end && *p == ' ') ++p;
        auto [next, ec] = std::from_chars(p, end, o[axis]);
        if (ec != std::errc()) bad("bad offset value");
        p = next;
      }
      key.offsets.push_back(o);
    }
    keys.push_back(std::move(key));
  }
  return keys;
}

}  // namespace dentsynth
