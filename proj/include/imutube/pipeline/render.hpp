#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "imutube/calib3d/camera.hpp"
#include "imutube/egomotion/depth_io.hpp"
#include "imutube/imusynth/skeleton.hpp"

namespace imutube::pipeline {

enum class CameraMotion { fixed, pan, follow };

inline std::string to_string(CameraMotion c) {
  switch (c) {
    case CameraMotion::fixed: return "static";
    case CameraMotion::pan: return "pan";
    case CameraMotion::follow: return "follow";
  }
  return "?";
}

inline CameraMotion camera_from_string(const std::string& s) {
  if (s == "static") return CameraMotion::fixed;
  if (s == "pan") return CameraMotion::pan;
  if (s == "follow") return CameraMotion::follow;
  throw DataError("unknown camera motion '" + s + "' (expected static, pan or follow)");
}

/// Camera axes (x right, y down, z forward) expressed in the Z-up world for a
/// level camera looking along +Y.
inline Mat3 level_camera_axes() {
  Mat3 r;
  r << 1, 0, 0, 0, 0, 1, 0, -1, 0;
  return r;
}

struct CameraRig {
  CameraMotion motion = CameraMotion::fixed;
  Vec3 position{0.0, -4.5, 1.2};
  /// Pan sweeps right at a constant rate from +amplitude to -amplitude yaw,
  /// then back, so long clips keep the subject in view.
  double pan_amplitude = 20.0 * std::numbers::pi / 180.0;
  double pan_rate = 40.0 / 3.0 * std::numbers::pi / 180.0;  ///< rad/s

  /// World-from-camera transform at time t; `target` is the followed point.
  RigidTransform pose(double t, const Vec3& target) const {
    double yaw = 0.0;
    if (motion == CameraMotion::pan) {
      const double phase = std::fmod(pan_rate * t, 4.0 * pan_amplitude);
      yaw = phase <= 2.0 * pan_amplitude ? pan_amplitude - phase : phase - 3.0 * pan_amplitude;
    } else if (motion == CameraMotion::follow) {
      const Vec3 d = target - position;
      yaw = std::atan2(-d.x(), d.y());
    }
    return {rot_z(yaw) * level_camera_axes(), position};
  }
};

/// Axis-aligned room with smoothly textured walls, floor and ceiling.
struct Room {
  Vec3 lo{-4.0, -6.0, 0.0};
  Vec3 hi{4.0, 5.0, 3.0};

  /// Distance along `dir` from an interior `origin` to the enclosing surface,
  /// and the axis of the surface hit.
  double cast(const Vec3& origin, const Vec3& dir, int& axis) const {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      if (dir[k] == 0.0) continue;
      const double t = ((dir[k] > 0 ? hi[k] : lo[k]) - origin[k]) / dir[k];
      if (t < best) {
        best = t;
        axis = k;
      }
    }
    return best;
  }

  static Vec3 texture(const Vec3& p, int axis) {
    static const Vec3 base[3] = {{0.55, 0.45, 0.35}, {0.35, 0.5, 0.6}, {0.5, 0.55, 0.4}};
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    const double s = 0.18 * std::sin(1.3 * p[u] + 0.4) * std::cos(0.9 * p[v]) + 0.12 * std::sin(0.7 * p[u] - 1.1 * p[v] + 1.0);
    return (base[axis] + Vec3(s, -0.6 * s, 0.8 * s)).cwiseMax(0.0).cwiseMin(1.0);
  }
};

/// Bodies are drawn as spheres strung along the bones.
struct PersonShape {
  std::vector<Vec3> centres;
  std::vector<double> radii;
  Vec3 color{0.8, 0.3, 0.3};
};

inline PersonShape person_shape(const std::vector<Vec3>& joints, double limb_radius = 0.07, double head_radius = 0.11) {
  const auto& sk = imusynth::coco_skeleton();
  PersonShape s;
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const int p = sk.parents[j];
    if (p < 0) continue;
    if (j >= 1 && j <= 4) continue;  // face points sit inside the head
    const Vec3 a = joints[static_cast<std::size_t>(p)], b = joints[j];
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / (0.7 * limb_radius))));
    for (int i = 0; i <= steps; ++i) {
      s.centres.push_back(a + (b - a) * (static_cast<double>(i) / steps));
      s.radii.push_back(limb_radius);
    }
  }
  s.centres.push_back(joints[0] + Vec3(0, 0, 0.02));
  s.radii.push_back(head_radius);
  return s;
}

struct RenderedFrame {
  egomotion::DepthMap depth;
  egomotion::RgbImage color;
};

/// Ray-casts the room and the given people from a camera pose. Depth is the
/// camera-frame Z of the first surface hit at each integer pixel.
inline RenderedFrame render_frame(const Room& room, const RigidTransform& world_from_camera,
                                  const calib3d::CameraIntrinsics& intr, int width, int height,
                                  const std::vector<PersonShape>& people = {}) {
  RenderedFrame f;
  f.depth.width = width;
  f.depth.height = height;
  f.depth.depth.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0f);
  f.color.width = width;
  f.color.height = height;
  f.color.data.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 0);
  const Mat3& r = world_from_camera.R;
  const Vec3& o = world_from_camera.T;
  const Mat3 rt = r.transpose();

  // Pixel window covered by each person, to limit sphere tests.
  struct Span {
    int x0, x1, y0, y1;
  };
  std::vector<Span> spans;
  for (const auto& p : people) {
    Span s{width, -1, height, -1};
    for (std::size_t i = 0; i < p.centres.size(); ++i) {
      const Vec3 c = rt * (p.centres[i] - o);
      if (c.z() <= p.radii[i]) {
        s = {0, width - 1, 0, height - 1};
        break;
      }
      const Vec2 uv = calib3d::project(c, intr);
      const double rad = p.radii[i] * std::max(intr.fx, intr.fy) / (c.z() - p.radii[i]) + 1.0;
      s.x0 = std::min(s.x0, static_cast<int>(std::floor(uv.x() - rad)));
      s.x1 = std::max(s.x1, static_cast<int>(std::ceil(uv.x() + rad)));
      s.y0 = std::min(s.y0, static_cast<int>(std::floor(uv.y() - rad)));
      s.y1 = std::max(s.y1, static_cast<int>(std::ceil(uv.y() + rad)));
    }
    spans.push_back({std::max(0, s.x0), std::min(width - 1, s.x1), std::max(0, s.y0), std::min(height - 1, s.y1)});
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 n = calib3d::normalize_pixel(x, y, intr);
      const Vec3 dc(n.x(), n.y(), 1.0);
      const Vec3 dw = r * dc;
      int axis = 0;
      double t = room.cast(o, dw, axis);
      Vec3 color = Room::texture(o + t * dw, axis);
      for (std::size_t k = 0; k < people.size(); ++k) {
        const Span& s = spans[k];
        if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
        const auto& p = people[k];
        for (std::size_t i = 0; i < p.centres.size(); ++i) {
          const Vec3 oc = o - p.centres[i];
          const double a = dw.squaredNorm(), b = oc.dot(dw), c = oc.squaredNorm() - p.radii[i] * p.radii[i];
          const double disc = b * b - a * c;
          if (disc < 0.0) continue;
          const double hit = (-b - std::sqrt(disc)) / a;
          if (hit > 0.0 && hit < t) {
            t = hit;
            const Vec3 normal = (o + hit * dw - p.centres[i]).normalized();
            color = p.color * (0.6 + 0.4 * std::abs(normal.z()));
          }
        }
      }
      const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
      f.depth.depth[idx] = static_cast<float>(t);
      for (int c = 0; c < 3; ++c) {
        f.color.data[3 * idx + static_cast<std::size_t>(c)] =
            static_cast<std::uint8_t>(std::lround(std::clamp(color[c], 0.0, 1.0) * 255.0));
      }
    }
  }
  return f;
}

}  // namespace imutube::pipeline
