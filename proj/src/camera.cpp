#include <cmath>

#include "dentsynth/error.hpp"
#include "dentsynth/render.hpp"

namespace dentsynth {

Vec3 CameraPose::position() const {
  const double t = deg_to_rad(theta), p = deg_to_rad(phi);
  return {r * std::sin(p) * std::cos(t), r * std::sin(p) * std::sin(t), r * std::cos(p)};
}

CameraPose camera_from_unit_draws(int quadrant, double u_theta, double u_phi, double u_r,
                                  const CameraRanges& ranges, double vertical_fov, int image_size) {
  if (quadrant < 1 || quadrant > 4)
    fail(ErrorKind::parameter, "camera quadrant must be 1..4, got " + std::to_string(quadrant));
  const Range& th = ranges.theta[static_cast<std::size_t>(quadrant - 1)];
  CameraPose pose;
  pose.theta = th.first + u_theta * (th.second - th.first);
  pose.phi = ranges.phi.first + u_phi * (ranges.phi.second - ranges.phi.first);
  pose.r = ranges.r.first + u_r * (ranges.r.second - ranges.r.first);
  pose.quadrant = quadrant;
  pose.vertical_fov = vertical_fov;
  pose.image_size = image_size;
  return pose;
}

CameraPose sample_camera(Rng& rng, int quadrant, const CameraRanges& ranges, double vertical_fov,
                         int image_size) {
  if (quadrant < 1 || quadrant > 4)
    fail(ErrorKind::parameter, "camera quadrant must be 1..4, got " + std::to_string(quadrant));
  const double ut = rng.uniform();
  const double up = rng.uniform();
  const double ur = rng.uniform();
  return camera_from_unit_draws(quadrant, ut, up, ur, ranges, vertical_fov, image_size);
}

bool pose_within_ranges(const CameraPose& pose, const CameraRanges& ranges) {
  if (pose.quadrant < 1 || pose.quadrant > 4) return false;
  const Range& th = ranges.theta[static_cast<std::size_t>(pose.quadrant - 1)];
  auto in = [](double v, const Range& r) { return v >= r.first && v <= r.second; };
  return in(pose.theta, th) && in(pose.phi, ranges.phi) && in(pose.r, ranges.r);
}

LightSpec sample_light(Rng& rng, const LightRanges& ranges) {
  // Uniform on the upper hemisphere: z uniform in [0,1], azimuth uniform.
  const double z = rng.uniform();
  const double az = 2.0 * kPi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  LightSpec light;
  light.direction = {s * std::cos(az), s * std::sin(az), z};
  light.diffuse = rng.uniform(ranges.diffuse.first, ranges.diffuse.second);
  light.ambient = rng.uniform(ranges.ambient.first, ranges.ambient.second);
  return light;
}

double lambert(const Vec3& normal, const LightSpec& light) {
  const double i = light.ambient + light.diffuse * std::max(0.0, dot(normal, light.direction));
  return std::clamp(i, 0.0, 1.0);
}

}  // namespace dentsynth
