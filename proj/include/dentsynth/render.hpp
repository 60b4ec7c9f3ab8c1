#pragma once

#include <array>
#include <optional>
#include <utility>

#include "dentsynth/geometry.hpp"
#include "dentsynth/image.hpp"
#include "dentsynth/mesh.hpp"
#include "dentsynth/rng.hpp"

namespace dentsynth {

using Range = std::pair<double, double>;

// Spherical sampling ranges for the four camera quadrants (degrees, metres).
struct CameraRanges {
  std::array<Range, 4> theta{{{20.0, 70.0}, {110.0, 160.0}, {200.0, 250.0}, {290.0, 340.0}}};
  Range phi{50.0, 70.0};
  Range r{0.3, 0.45};
};

// Camera on a sphere around the object origin, looking at it with +z as the
// roll reference. theta is azimuth from +x, phi is the polar angle from +z.
struct CameraPose {
  double theta = 0.0;  // degrees
  double phi = 90.0;   // degrees
  double r = 1.0;      // metres
  int quadrant = 1;
  double vertical_fov = 40.0;  // degrees
  int image_size = 512;

  Vec3 position() const;
};

// Maps three unit draws in [0,1] onto the quadrant's ranges (theta, phi, r).
CameraPose camera_from_unit_draws(int quadrant, double u_theta, double u_phi, double u_r,
                                  const CameraRanges& ranges = {}, double vertical_fov = 40.0,
                                  int image_size = 512);

CameraPose sample_camera(Rng& rng, int quadrant, const CameraRanges& ranges = {},
                         double vertical_fov = 40.0, int image_size = 512);

bool pose_within_ranges(const CameraPose& pose, const CameraRanges& ranges = {});

// Pixel coordinates of a world point, or nullopt when it is behind the camera.
std::optional<std::array<double, 2>> project(const CameraPose& pose, const Vec3& point);

struct LightSpec {
  Vec3 direction{0, 0, 1};  // unit vector pointing towards the light
  double diffuse = 0.7;
  double ambient = 0.2;
};

struct LightRanges {
  Range diffuse{0.5, 0.9};
  Range ambient{0.1, 0.3};
};

LightSpec sample_light(Rng& rng, const LightRanges& ranges = {});

// clamp(ambient + diffuse * max(0, n.l), 0, 1) for a unit normal.
double lambert(const Vec3& normal, const LightSpec& light);

enum class Background { key_green, black };

inline Rgb background_color(Background bg) { return bg == Background::key_green ? kKeyGreen : kBlack; }

struct Material {
  RgbImage label;                   // wrapped around faces of the `label` group
  Rgb metal{192, 194, 200};         // caps, rims and tab
};

RgbImage default_label_texture();
Material default_material();

struct RenderedSample {
  RgbImage rgb;
  BinaryMask coverage;
  CameraPose pose;
  LightSpec light;
};

// Z-buffered, perspective-correct rasterisation without anti-aliasing. Pixels
// not covered by the mesh are exactly the background colour and covered
// pixels never are.
RenderedSample rasterize(const Mesh& mesh, const CameraPose& pose, const LightSpec& light,
                         Background background, const Material& material);

}  // namespace dentsynth
