#pragma once

#include <cmath>
#include <span>

#include "imutube/core/error.hpp"
#include "imutube/core/geometry.hpp"

namespace imutube::calib3d {

/// Pinhole intrinsics with a single-coefficient division distortion model on
/// normalized coordinates: r_undistorted = r_distorted / (1 + d r_distorted^2).
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double px = 0.0;
  double py = 0.0;
  double d = 0.0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && std::isfinite(fx) && std::isfinite(fy) && std::isfinite(px) &&
           std::isfinite(py) && std::isfinite(d);
  }
};

/// Per-field arithmetic mean over all frames.
inline CameraIntrinsics aggregate_intrinsics(std::span<const CameraIntrinsics> per_frame) {
  if (per_frame.empty()) throw DataError("aggregate_intrinsics: empty sequence");
  CameraIntrinsics sum{0, 0, 0, 0, 0};
  for (const auto& c : per_frame) {
    if (!std::isfinite(c.fx) || !std::isfinite(c.fy) || !std::isfinite(c.px) || !std::isfinite(c.py) ||
        !std::isfinite(c.d)) {
      throw DataError("aggregate_intrinsics: non-finite entry");
    }
    sum.fx += c.fx;
    sum.fy += c.fy;
    sum.px += c.px;
    sum.py += c.py;
    sum.d += c.d;
  }
  const double n = static_cast<double>(per_frame.size());
  return {sum.fx / n, sum.fy / n, sum.px / n, sum.py / n, sum.d / n};
}

/// Factor taking undistorted normalized radius to distorted radius, as a
/// function of the squared undistorted radius. Inverse of the division model.
inline double distortion_factor(double d, double r2) {
  const double disc = 1.0 - 4.0 * d * r2;
  if (disc < 0.0) throw DataError("project: point outside the distortion model's valid field of view");
  return 2.0 / (1.0 + std::sqrt(disc));
}

/// Derivative of distortion_factor with respect to r2.
inline double distortion_factor_derivative(double d, double r2) {
  const double g = std::sqrt(1.0 - 4.0 * d * r2);
  if (g <= 0.0) throw DataError("project: point at the distortion model's singular radius");
  return 4.0 * d / (g * (1.0 + g) * (1.0 + g));
}

/// Camera coordinates to pixels.
inline Vec2 project(const Vec3& point, const CameraIntrinsics& intr) {
  if (!(point.z() > 0.0)) throw DataError("project: point behind camera (Z <= 0)");
  const double xu = point.x() / point.z();
  const double yu = point.y() / point.z();
  const double k = distortion_factor(intr.d, xu * xu + yu * yu);
  return {intr.fx * k * xu + intr.px, intr.fy * k * yu + intr.py};
}

/// Pixel to undistorted normalized image coordinates (x/z, y/z).
inline Vec2 normalize_pixel(double u, double v, const CameraIntrinsics& intr) {
  const double xd = (u - intr.px) / intr.fx;
  const double yd = (v - intr.py) / intr.fy;
  const double s = 1.0 + intr.d * (xd * xd + yd * yd);
  return {xd / s, yd / s};
}

/// Pixel plus depth to a camera-frame point. With d = 0 this is
/// ((u - px) Z / fx, (v - py) Z / fy, Z).
inline Vec3 backproject_pixel(double u, double v, double depth, const CameraIntrinsics& intr) {
  const Vec2 n = normalize_pixel(u, v, intr);
  return {n.x() * depth, n.y() * depth, depth};
}

}  // namespace imutube::calib3d
