#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "dentsynth/error.hpp"
#include "dentsynth/mesh.hpp"

namespace dentsynth {

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  fail(ErrorKind::parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    parse_fail(path, line, "bad number '" + std::string(tok) + "'");
  return v;
}

long parse_long(std::string_view tok, const std::filesystem::path& path, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    parse_fail(path, line, "bad index '" + std::string(tok) + "'");
  return v;
}

// OBJ indices are 1-based; negative values count back from the end.
std::uint32_t resolve_index(long raw, std::size_t count, const std::filesystem::path& path,
                            std::size_t line) {
  if (raw == 0) parse_fail(path, line, "index 0 is invalid (indices are 1-based)");
  const long resolved = raw > 0 ? raw - 1 : static_cast<long>(count) + raw;
  if (resolved < 0 || static_cast<std::size_t>(resolved) >= count)
    parse_fail(path, line, "index " + std::to_string(raw) + " out of range");
  return static_cast<std::uint32_t>(resolved);
}

void load_groups(Mesh& mesh, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string text;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const auto toks = split_ws(text);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "group") {
      if (toks.size() < 2) parse_fail(path, line_no, "group record without a name");
      current = std::string(toks[1]);
      mesh.groups[current].assign(mesh.vertices.size(), 0.0);
      continue;
    }
    if (current.empty() || toks.size() != 2)
      parse_fail(path, line_no, "expected '<index> <weight>' inside a group");
    const long idx = parse_long(toks[0], path, line_no);
    const double w = parse_double(toks[1], path, line_no);
    if (idx < 0 || static_cast<std::size_t>(idx) >= mesh.vertices.size())
      parse_fail(path, line_no, "vertex index out of range");
    if (!(w >= 0.0 && w <= 1.0)) parse_fail(path, line_no, "weight outside [0,1]");
    mesh.groups[current][static_cast<std::size_t>(idx)] = w;
  }
}

}  // namespace

std::filesystem::path groups_sidecar_path(const std::filesystem::path& obj_path) {
  auto p = obj_path;
  p.replace_extension(".groups");
  return p;
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open mesh file " + path.string());

  Mesh mesh;
  std::vector<Vec2> tex;
  std::vector<Vec3> nrm;
  std::vector<bool> has_normal;
  bool all_normals = true;
  struct Corner {
    std::uint32_t v;
    long t, n;
  };
  std::vector<std::pair<std::vector<Corner>, std::size_t>> polys;

  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const auto toks = split_ws(text);
    if (toks.empty() || toks[0].front() == '#') continue;
    const std::string_view tag = toks[0];
    if (tag == "v") {
      if (toks.size() < 4) parse_fail(path, line_no, "vertex needs 3 coordinates");
      mesh.vertices.push_back({parse_double(toks[1], path, line_no),
                               parse_double(toks[2], path, line_no),
                               parse_double(toks[3], path, line_no)});
    } else if (tag == "vt") {
      if (toks.size() < 3) parse_fail(path, line_no, "texture coordinate needs 2 values");
      tex.push_back({parse_double(toks[1], path, line_no), parse_double(toks[2], path, line_no)});
    } else if (tag == "vn") {
      if (toks.size() < 4) parse_fail(path, line_no, "normal needs 3 values");
      nrm.push_back({parse_double(toks[1], path, line_no), parse_double(toks[2], path, line_no),
                     parse_double(toks[3], path, line_no)});
    } else if (tag == "f") {
      if (toks.size() < 4) parse_fail(path, line_no, "face needs at least 3 vertices");
      std::vector<Corner> corners;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        std::string_view tok = toks[k];
        std::string_view parts[3];
        int part = 0;
        std::size_t start = 0;
        for (std::size_t c = 0; c <= tok.size(); ++c) {
          if (c == tok.size() || tok[c] == '/') {
            if (part > 2) parse_fail(path, line_no, "bad face corner '" + std::string(tok) + "'");
            parts[part++] = tok.substr(start, c - start);
            start = c + 1;
          }
        }
        if (parts[0].empty()) parse_fail(path, line_no, "face corner without vertex index");
        Corner corner{resolve_index(parse_long(parts[0], path, line_no), mesh.vertices.size(),
                                    path, line_no),
                      -1, -1};
        if (!parts[1].empty())
          corner.t = resolve_index(parse_long(parts[1], path, line_no), tex.size(), path, line_no);
        if (!parts[2].empty())
          corner.n = resolve_index(parse_long(parts[2], path, line_no), nrm.size(), path, line_no);
        corners.push_back(corner);
      }
      polys.emplace_back(std::move(corners), line_no);
    }
    // Other records (o, g, s, usemtl, mtllib, ...) carry nothing we use.
  }

  const std::size_t n = mesh.vertices.size();
  mesh.uvs.assign(n, Vec2{});
  mesh.normals.assign(n, Vec3{0, 0, 1});
  has_normal.assign(n, false);
  for (const auto& [corners, line] : polys) {
    for (const Corner& c : corners) {
      if (c.t >= 0) mesh.uvs[c.v] = tex[static_cast<std::size_t>(c.t)];
      if (c.n >= 0 && !has_normal[c.v]) {
        mesh.normals[c.v] = normalized(nrm[static_cast<std::size_t>(c.n)]);
        has_normal[c.v] = true;
      }
    }
    // Fan triangulation of polygons.
    for (std::size_t k = 1; k + 1 < corners.size(); ++k)
      mesh.faces.push_back({corners[0].v, corners[k].v, corners[k + 1].v});
  }
  for (std::size_t i = 0; i < n; ++i) all_normals = all_normals && has_normal[i];
  if (!all_normals) recompute_normals(mesh);

  load_groups(mesh, groups_sidecar_path(path));
  return mesh;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  validate(mesh);
  std::ostringstream out;
  out << "# dentsynth mesh: " << mesh.vertices.size() << " vertices, " << mesh.faces.size()
      << " faces\n";
  for (const Vec3& v : mesh.vertices)
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
        << '\n';
  for (const Vec2& t : mesh.uvs)
    out << "vt " << format_double(t.u) << ' ' << format_double(t.v) << '\n';
  for (const Vec3& v : mesh.normals)
    out << "vn " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
        << '\n';
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (std::uint32_t idx : f) out << ' ' << idx + 1 << '/' << idx + 1 << '/' << idx + 1;
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::io, "cannot write mesh file " + path.string());
  file << out.str();

  const auto sidecar = groups_sidecar_path(path);
  if (mesh.groups.empty()) {
    std::error_code ec;
    std::filesystem::remove(sidecar, ec);
    return;
  }
  std::ofstream groups(sidecar, std::ios::binary);
  if (!groups) fail(ErrorKind::io, "cannot write group file " + sidecar.string());
  groups << "# vertex groups: 'group <name>' followed by '<0-based index> <weight>' lines\n";
  for (const auto& [name, weights] : mesh.groups) {
    groups << "group " << name << '\n';
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] != 0.0) groups << i << ' ' << format_double(weights[i]) << '\n';
  }
}

}  // namespace dentsynth
