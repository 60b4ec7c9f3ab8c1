#include "doctest.h"
#include "dentsynth/composite.hpp"
#include "dentsynth/error.hpp"
#include "dentsynth/render.hpp"

using namespace dentsynth;

namespace {

Mesh triangle_mesh(std::initializer_list<std::array<Vec3, 3>> tris) {
  Mesh m;
  for (const auto& t : tris) {
    const auto base = static_cast<std::uint32_t>(m.vertices.size());
    const Vec3 n = normalized(cross(t[1] - t[0], t[2] - t[0]));
    for (const auto& v : t) {
      m.vertices.push_back(v);
      m.normals.push_back(n);
      m.uvs.push_back({});
    }
    m.faces.push_back({base, base + 1, base + 2});
  }
  return m;
}

// Camera on +x looking at the origin.
CameraPose front_pose(int size = 64) {
  CameraPose p;
  p.theta = 0.0;
  p.phi = 90.0;
  p.r = 1.0;
  p.image_size = size;
  return p;
}

}  // namespace

TEST_CASE("camera: unit draws map to the range endpoints") {
  const CameraPose lo = camera_from_unit_draws(1, 0, 0, 0);
  CHECK(lo.theta == 20.0);
  CHECK(lo.phi == 50.0);
  CHECK(lo.r == 0.3);
  const CameraPose hi = camera_from_unit_draws(3, 1, 1, 1);
  CHECK(hi.theta == 250.0);
  CHECK(hi.phi == 70.0);
  CHECK(hi.r == 0.45);
}

TEST_CASE("camera: spherical convention") {
  const Vec3 p = front_pose().position();
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(std::abs(p.y) < 1e-15);
  CHECK(std::abs(p.z) < 1e-15);
  CameraPose q;
  q.theta = 90;
  q.phi = 0;
  q.r = 2;
  CHECK(q.position().z == doctest::Approx(2.0));
}

TEST_CASE("camera: invalid quadrant is a parameter error") {
  Rng rng(1);
  for (int q : {0, 5, -1}) {
    try {
      sample_camera(rng, q);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parameter);
    }
  }
}

TEST_CASE("camera: sampled poses stay inside their ranges and the can centroid projects into view") {
  Rng rng(31);
  for (int i = 0; i < 4000; ++i) {
    const int q = 1 + i % 4;
    const CameraPose p = sample_camera(rng, q);
    REQUIRE(p.quadrant == q);
    REQUIRE(pose_within_ranges(p));
    const auto px = project(p, Vec3{0, 0, 0});
    REQUIRE(px.has_value());
    REQUIRE((*px)[0] >= 0.0);
    REQUIRE((*px)[0] < p.image_size);
    REQUIRE((*px)[1] >= 0.0);
    REQUIRE((*px)[1] < p.image_size);
  }
}

TEST_CASE("light: unit upper-hemisphere direction and ranges") {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const LightSpec l = sample_light(rng);
    REQUIRE(std::abs(norm(l.direction) - 1.0) < 1e-12);
    REQUIRE(l.direction.z >= 0.0);
    REQUIRE(l.diffuse >= 0.5);
    REQUIRE(l.diffuse <= 0.9);
    REQUIRE(l.ambient >= 0.1);
    REQUIRE(l.ambient <= 0.3);
  }
  Rng a(3);
  Rng b(3);
  const LightSpec la = sample_light(a);
  const LightSpec lb = sample_light(b);
  CHECK(la.direction == lb.direction);
  CHECK(la.diffuse == lb.diffuse);
}

TEST_CASE("lambert: endpoints") {
  LightSpec l;
  l.direction = {0, 0, 1};
  l.ambient = 0.2;
  l.diffuse = 0.7;
  CHECK(lambert({0, 0, 1}, l) == doctest::Approx(0.9));
  CHECK(lambert({1, 0, 0}, l) == doctest::Approx(0.2));
  CHECK(lambert({0, 0, -1}, l) == doctest::Approx(0.2));
  l.ambient = 0.5;
  l.diffuse = 0.9;
  CHECK(lambert({0, 0, 1}, l) == 1.0);
}

TEST_CASE("rasterize: full-screen triangle covers every pixel") {
  const Mesh m = triangle_mesh({{Vec3{0, -10, -10}, Vec3{0, 10, -10}, Vec3{0, 0, 20}}});
  const RenderedSample r = rasterize(m, front_pose(), LightSpec{}, Background::key_green, default_material());
  CHECK(r.coverage.count() == r.coverage.bits.size());
}

TEST_CASE("rasterize: shading of a camera-facing triangle") {
  const Mesh m = triangle_mesh({{Vec3{0, -10, -10}, Vec3{0, 10, -10}, Vec3{0, 0, 20}}});
  LightSpec l;
  l.direction = {1, 0, 0};
  l.ambient = 0.2;
  l.diffuse = 0.7;
  Material mat = default_material();
  mat.metal = {200, 100, 50};
  const RenderedSample r = rasterize(m, front_pose(), l, Background::black, mat);
  CHECK(r.rgb.at(10, 10) == Rgb{180, 90, 45});
  l.direction = {0, 0, 1};
  const RenderedSample side = rasterize(m, front_pose(), l, Background::black, mat);
  CHECK(side.rgb.at(10, 10) == Rgb{40, 20, 10});
}

TEST_CASE("rasterize: z-buffer keeps the nearer of two overlapping triangles") {
  Rng rng(44);
  for (int t = 0; t < 100; ++t) {
    // camera at x=1 looking toward -x; depth d means plane x = 1 - d
    double d1 = rng.uniform(0.2, 0.8);
    double d2 = rng.uniform(0.2, 0.8);
    if (std::abs(d1 - d2) < 1e-3) d2 = d1 + 0.01;
    const double x1 = 1.0 - d1;
    const double x2 = 1.0 - d2;
    Mesh m = triangle_mesh({{Vec3{x1, -5, -5}, Vec3{x1, 5, -5}, Vec3{x1, 0, 10}},
                            {Vec3{x2, -5, -5}, Vec3{x2, 5, -5}, Vec3{x2, 0, 10}}});
    m.groups[kLabelGroup] = {1, 1, 1, 0, 0, 0};
    Material mat;
    mat.label = RgbImage(2, 2, Rgb{255, 0, 0});
    mat.metal = {0, 0, 255};
    LightSpec l;
    l.direction = {1, 0, 0};
    l.ambient = 0.0;
    l.diffuse = 1.0;
    const RenderedSample r = rasterize(m, front_pose(32), l, Background::black, mat);
    const Rgb expect = d1 < d2 ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) REQUIRE(r.rgb.at(x, y) == expect);
  }
}

TEST_CASE("rasterize: mesh behind the camera gives empty coverage") {
  const Mesh m = triangle_mesh({{Vec3{3, -1, -1}, Vec3{3, 1, -1}, Vec3{3, 0, 1}}});
  const RenderedSample r = rasterize(m, front_pose(), LightSpec{}, Background::key_green, default_material());
  CHECK(r.coverage.count() == 0);
  for (std::size_t i = 0; i < r.rgb.pixel_count(); ++i) REQUIRE(r.rgb.at(static_cast<int>(i % 64), static_cast<int>(i / 64)) == kKeyGreen);
}

TEST_CASE("rasterize: default can frame separates exactly from the key colour") {
  const Mesh can = generate_can(CanParams{});
  Rng rng(8);
  for (int q = 1; q <= 4; ++q) {
    const CameraPose pose = sample_camera(rng, q);
    const LightSpec light = sample_light(rng);
    for (Background bg : {Background::key_green, Background::black}) {
      const RenderedSample r = rasterize(can, pose, light, bg, default_material());
      const Rgb key = background_color(bg);
      for (int y = 0; y < r.rgb.height; ++y)
        for (int x = 0; x < r.rgb.width; ++x) REQUIRE(r.coverage.at(x, y) == (r.rgb.at(x, y) != key));
      CHECK(chroma_mask(r.rgb, key) == r.coverage);
    }
  }
}

TEST_CASE("rasterize: default can coverage at the nearest quadrant-1 pose") {
  const Mesh can = generate_can(CanParams{});
  for (double u : {0.0, 0.5, 1.0}) {
    const CameraPose pose = camera_from_unit_draws(1, u, u, 0.0);
    const RenderedSample r = rasterize(can, pose, LightSpec{}, Background::key_green, default_material());
    const double frac = static_cast<double>(r.coverage.count()) / static_cast<double>(r.coverage.bits.size());
    CHECK(frac >= 0.05);
    CHECK(frac <= 0.6);
  }
}

TEST_CASE("rasterize: deterministic output") {
  const Mesh can = generate_can(CanParams{});
  const CameraPose pose = camera_from_unit_draws(2, 0.3, 0.6, 0.2);
  const RenderedSample a = rasterize(can, pose, LightSpec{}, Background::key_green, default_material());
  const RenderedSample b = rasterize(can, pose, LightSpec{}, Background::key_green, default_material());
  CHECK(a.rgb.data == b.rgb.data);
  CHECK(a.coverage == b.coverage);
}

TEST_CASE("rasterize: shared edges are drawn exactly once") {
  // A quad split along its diagonal into two triangles of different colours;
  // every pixel inside the quad is covered and there are no gaps.
  Mesh m = triangle_mesh({{Vec3{0, -0.2, -0.2}, Vec3{0, 0.2, -0.2}, Vec3{0, 0.2, 0.2}},
                          {Vec3{0, -0.2, -0.2}, Vec3{0, 0.2, 0.2}, Vec3{0, -0.2, 0.2}}});
  const RenderedSample r = rasterize(m, front_pose(128), LightSpec{}, Background::key_green, default_material());
  // projected half-width in pixels
  const double half = 0.2 / std::tan(deg_to_rad(20.0)) * 64.0;
  const int lo = static_cast<int>(std::ceil(64 - half + 1));
  const int hi = static_cast<int>(std::floor(64 + half - 2));
  for (int y = lo; y <= hi; ++y)
    for (int x = lo; x <= hi; ++x) REQUIRE(r.coverage.at(x, y));
}
