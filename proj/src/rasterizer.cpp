#include <algorithm>
#include <cmath>
#include <vector>

#include "dentsynth/error.hpp"
#include "dentsynth/render.hpp"

namespace dentsynth {

namespace {

constexpr double kNear = 1e-3;

struct CameraFrame {
  Vec3 eye, right, up, forward;
  double focal;  // pixels
  double cx, cy;

  explicit CameraFrame(const CameraPose& pose) {
    eye = pose.position();
    forward = normalized(Vec3{} - eye);
    Vec3 world_up{0, 0, 1};
    if (std::abs(dot(forward, world_up)) > 1.0 - 1e-12) world_up = {0, 1, 0};
    right = normalized(cross(forward, world_up));
    up = cross(right, forward);
    focal = 0.5 * pose.image_size / std::tan(0.5 * deg_to_rad(pose.vertical_fov));
    cx = cy = 0.5 * pose.image_size;
  }

  Vec3 to_camera(const Vec3& p) const {
    const Vec3 d = p - eye;
    return {dot(d, right), dot(d, up), dot(d, forward)};
  }
};

// Clip-space vertex carried through near-plane clipping.
struct ClipVertex {
  Vec3 cam;
  Vec3 world;
  Vec3 normal;
  Vec2 uv;
};

ClipVertex mix(const ClipVertex& a, const ClipVertex& b, double t) {
  return {a.cam + (b.cam - a.cam) * t, a.world + (b.world - a.world) * t,
          a.normal + (b.normal - a.normal) * t,
          {a.uv.u + (b.uv.u - a.uv.u) * t, a.uv.v + (b.uv.v - a.uv.v) * t}};
}

// Sutherland-Hodgman against depth >= kNear; at most 4 output vertices.
int clip_near(const ClipVertex (&in)[3], ClipVertex (&out)[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    const bool a_in = a.cam.z >= kNear, b_in = b.cam.z >= kNear;
    if (a_in) out[n++] = a;
    if (a_in != b_in) out[n++] = mix(a, b, (kNear - a.cam.z) / (b.cam.z - a.cam.z));
  }
  return n;
}

Rgb sample_texture(const RgbImage& tex, Vec2 uv) {
  const double u = uv.u - std::floor(uv.u);
  const double v = std::clamp(uv.v, 0.0, 1.0);
  const double fx = std::clamp(u * tex.width - 0.5, 0.0, tex.width - 1.0);
  const double fy = std::clamp((1.0 - v) * tex.height - 0.5, 0.0, tex.height - 1.0);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, tex.width - 1), y1 = std::min(y0 + 1, tex.height - 1);
  const double tx = fx - x0, ty = fy - y0;
  const Rgb a = tex.at(x0, y0), b = tex.at(x1, y0), c = tex.at(x0, y1), d = tex.at(x1, y1);
  Rgb out;
  for (int ch = 0; ch < 3; ++ch) {
    const double top = a[ch] + (b[ch] - a[ch]) * tx;
    const double bot = c[ch] + (d[ch] - c[ch]) * tx;
    out[ch] = static_cast<std::uint8_t>(std::lround(top + (bot - top) * ty));
  }
  return out;
}

struct ScreenVertex {
  double x, y;    // pixels
  double inv_z;   // 1 / camera depth
  ClipVertex attr;
};

}  // namespace

std::optional<std::array<double, 2>> project(const CameraPose& pose, const Vec3& point) {
  const CameraFrame cam(pose);
  const Vec3 c = cam.to_camera(point);
  if (c.z < kNear) return std::nullopt;
  return std::array<double, 2>{cam.cx + cam.focal * c.x / c.z, cam.cy - cam.focal * c.y / c.z};
}

RenderedSample rasterize(const Mesh& mesh, const CameraPose& pose, const LightSpec& light,
                         Background background, const Material& material) {
  if (mesh.vertices.empty()) fail(ErrorKind::parameter, "cannot render an empty mesh");
  if (pose.image_size <= 0) fail(ErrorKind::parameter, "image size must be positive");
  const int size = pose.image_size;
  const Rgb bg = background_color(background);
  const Rgb guard = background == Background::key_green ? Rgb{0, 254, 0} : Rgb{1, 1, 1};

  RenderedSample out{RgbImage(size, size, bg), BinaryMask(size, size), pose, light};
  std::vector<double> depth(static_cast<std::size_t>(size) * size, 0.0);  // stores 1/z

  const CameraFrame cam(pose);
  const std::vector<double>* label_w =
      mesh.has_group(kLabelGroup) && material.label.width > 0 ? &mesh.group(kLabelGroup) : nullptr;
  const bool has_normals = mesh.normals.size() == mesh.vertices.size();
  const bool has_uvs = mesh.uvs.size() == mesh.vertices.size();

  auto shade_pixel = [&](int px, int py, const ScreenVertex (&tri)[3], double b0, double b1,
                         double b2, bool textured) {
    const double w0 = b0 * tri[0].inv_z, w1 = b1 * tri[1].inv_z, w2 = b2 * tri[2].inv_z;
    const double inv_z = w0 + w1 + w2;
    const std::size_t idx = static_cast<std::size_t>(py) * size + px;
    if (inv_z <= depth[idx]) return;
    depth[idx] = inv_z;
    const double k0 = w0 / inv_z, k1 = w1 / inv_z, k2 = w2 / inv_z;
    Vec3 n = normalized(tri[0].attr.normal * k0 + tri[1].attr.normal * k1 + tri[2].attr.normal * k2);
    const Vec3 world = tri[0].attr.world * k0 + tri[1].attr.world * k1 + tri[2].attr.world * k2;
    if (dot(n, cam.eye - world) < 0.0) n = -n;  // two-sided lighting
    const double intensity = lambert(n, light);
    Rgb albedo = material.metal;
    if (textured) {
      const Vec2 uv{tri[0].attr.uv.u * k0 + tri[1].attr.uv.u * k1 + tri[2].attr.uv.u * k2,
                    tri[0].attr.uv.v * k0 + tri[1].attr.uv.v * k1 + tri[2].attr.uv.v * k2};
      albedo = sample_texture(material.label, uv);
    }
    Rgb c;
    for (int ch = 0; ch < 3; ++ch)
      c[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(albedo[ch] * intensity, 0.0, 255.0)));
    if (c == bg) c = guard;
    out.rgb.set(px, py, c);
    out.coverage.set(px, py, true);
  };

  auto raster_triangle = [&](const ScreenVertex (&tri)[3], bool textured) {
    const double area = (tri[1].x - tri[0].x) * (tri[2].y - tri[0].y) -
                        (tri[1].y - tri[0].y) * (tri[2].x - tri[0].x);
    if (!(std::abs(area) > 1e-12) || !std::isfinite(area)) return;
    const double min_x = std::min({tri[0].x, tri[1].x, tri[2].x});
    const double max_x = std::max({tri[0].x, tri[1].x, tri[2].x});
    const double min_y = std::min({tri[0].y, tri[1].y, tri[2].y});
    const double max_y = std::max({tri[0].y, tri[1].y, tri[2].y});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
    const int x1 = std::min(size - 1, static_cast<int>(std::ceil(max_x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
    const int y1 = std::min(size - 1, static_cast<int>(std::ceil(max_y)));
    if (x0 > x1 || y0 > y1) return;
    const double sign = area > 0 ? 1.0 : -1.0;
    const double inv_area = 1.0 / std::abs(area);

    // Edge i is opposite vertex i. Top-left rule decides pixels exactly on an
    // edge so shared edges are drawn once.
    auto edge = [&](int i, double px, double py) {
      const ScreenVertex& a = tri[(i + 1) % 3];
      const ScreenVertex& b = tri[(i + 2) % 3];
      return sign * ((b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x));
    };
    auto top_left = [&](int i) {
      const ScreenVertex& a = tri[(i + 1) % 3];
      const ScreenVertex& b = tri[(i + 2) % 3];
      const double dx = sign * (b.x - a.x), dy = sign * (b.y - a.y);
      return (dy == 0.0 && dx < 0.0) || dy > 0.0;
    };
    const bool tl[3] = {top_left(0), top_left(1), top_left(2)};
    for (int py = y0; py <= y1; ++py) {
      const double cy = py + 0.5;
      for (int px = x0; px <= x1; ++px) {
        const double cx = px + 0.5;
        double e[3];
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
          e[i] = edge(i, cx, cy);
          inside = e[i] > 0.0 || (e[i] == 0.0 && tl[i]);
        }
        if (!inside) continue;
        shade_pixel(px, py, tri, e[0] * inv_area, e[1] * inv_area, e[2] * inv_area, textured);
      }
    }
  };

  for (const Face& f : mesh.faces) {
    ClipVertex in[3];
    bool textured = label_w != nullptr;
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t v = f[static_cast<std::size_t>(k)];
      in[k] = {cam.to_camera(mesh.vertices[v]), mesh.vertices[v],
               has_normals ? mesh.normals[v] : Vec3{0, 0, 1}, has_uvs ? mesh.uvs[v] : Vec2{}};
      if (label_w) textured = textured && (*label_w)[v] > 0.0;
    }
    if (!has_normals) {
      const Vec3 fn = normalized(cross(in[1].world - in[0].world, in[2].world - in[0].world));
      for (auto& c : in) c.normal = fn;
    }
    ClipVertex poly[4];
    const int count = clip_near(in, poly);
    if (count < 3) continue;
    ScreenVertex sv[4];
    for (int k = 0; k < count; ++k) {
      const Vec3& c = poly[k].cam;
      sv[k] = {cam.cx + cam.focal * c.x / c.z, cam.cy - cam.focal * c.y / c.z, 1.0 / c.z, poly[k]};
    }
    for (int k = 1; k + 1 < count; ++k) {
      const ScreenVertex tri[3] = {sv[0], sv[k], sv[k + 1]};
      raster_triangle(tri, textured);
    }
  }
  return out;
}

RgbImage default_label_texture() {
  // A red label with a white sweep, a dark logo band and a barcode patch so
  // that twists and folds visibly distort the print.
  constexpr int w = 512, h = 256;
  RgbImage tex(w, h, Rgb{196, 28, 36});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = static_cast<double>(x) / w;
      const double v = static_cast<double>(y) / h;
      const double wave = 0.5 + 0.18 * std::sin(2.0 * kPi * 2.0 * u);
      if (std::abs(v - wave) < 0.05) tex.set(x, y, {245, 245, 240});
      if (v > 0.12 && v < 0.22 && std::fmod(u * 6.0, 1.0) < 0.62) tex.set(x, y, {40, 24, 30});
      if (u > 0.70 && u < 0.82 && v > 0.72 && v < 0.88) {
        const bool bar = (static_cast<int>(u * 600.0) * 7) % 5 < 2;
        tex.set(x, y, bar ? Rgb{20, 20, 20} : Rgb{250, 250, 250});
      }
    }
  }
  return tex;
}

Material default_material() { return {default_label_texture(), {192, 194, 200}}; }

}  // namespace dentsynth
