#pragma once

#include <string>
#include <vector>

#include "imutube/calib3d/calibrate.hpp"
#include "imutube/egomotion/colored_icp.hpp"
#include "imutube/egomotion/normals.hpp"

namespace imutube::egomotion {

/// World-frame 3D motion of one tracked person.
struct MotionTrack3D {
  int track_id = 0;
  std::string clip_id;
  double fps = 30.0;
  int first_frame = 0;
  std::vector<std::vector<Vec3>> joints_world;          ///< [frame][joint]
  std::vector<std::vector<Mat3>> joint_orientations;    ///< [frame][joint], filled by imusynth
  std::string label;
  std::string subject;

  int frame_count() const { return static_cast<int>(joints_world.size()); }
};

/// Cumulative camera poses from per-frame ego transforms. ego[t] maps frame-t
/// camera coordinates into frame t-1; ego[0] is ignored. W[0] = identity and
/// W[t] = W[t-1] ∘ ego[t], so W[t] maps frame-t coordinates into the world
/// (frame-0 camera) frame.
inline std::vector<RigidTransform> accumulate_ego(const std::vector<RigidTransform>& ego) {
  std::vector<RigidTransform> w(ego.size());
  for (std::size_t t = 1; t < ego.size(); ++t) {
    w[t] = w[t - 1].compose(ego[t]);
    w[t].R = orthonormalize(w[t].R);
  }
  return w;
}

/// Applies a per-frame world-from-camera chain to calibrated poses.
/// `world_from_camera[i]` belongs to calibrated[i].
inline MotionTrack3D compose_with_world(const std::vector<calib3d::CalibratedPose>& calibrated,
                                        const std::vector<RigidTransform>& world_from_camera) {
  if (calibrated.size() != world_from_camera.size()) {
    throw DataError("compose_track: " + std::to_string(calibrated.size()) + " poses but " +
                    std::to_string(world_from_camera.size()) + " ego transforms");
  }
  MotionTrack3D m;
  if (!calibrated.empty()) m.first_frame = calibrated.front().frame_index;
  m.joints_world.reserve(calibrated.size());
  for (std::size_t t = 0; t < calibrated.size(); ++t) {
    std::vector<Vec3> joints;
    joints.reserve(calibrated[t].joints.size());
    for (const auto& p : calibrated[t].joints) joints.push_back(world_from_camera[t].apply(p));
    m.joints_world.push_back(std::move(joints));
  }
  return m;
}

/// World-frame joints from calibrated poses and the aligned ego sequence.
inline MotionTrack3D compose_track(const std::vector<calib3d::CalibratedPose>& calibrated,
                                   const std::vector<RigidTransform>& ego) {
  if (calibrated.size() != ego.size()) {
    throw DataError("compose_track: " + std::to_string(calibrated.size()) + " poses but " +
                    std::to_string(ego.size()) + " ego transforms");
  }
  return compose_with_world(calibrated, accumulate_ego(ego));
}

struct EgoParams {
  IcpParams icp{};
  int stride = 4;
  int normal_neighbors = 30;
  /// Pixels added around each person bbox before masking.
  double mask_margin = 10.0;
  /// Points whose neighbourhood is less planar than this (surface variation)
  /// are dropped; they sit on edges and corners where normals are unreliable.
  /// Values >= 1/3 keep everything.
  double max_surface_variation = 1e-4;
};

/// One frame's inputs for ego-motion estimation.
struct EgoFrame {
  DepthMap depth;
  RgbImage color;
  std::vector<trackio::BBox> people;
};

struct EgoChain {
  std::vector<RigidTransform> ego;  ///< ego[t] maps frame t into frame t-1; ego[0] = identity
  std::vector<char> failed;         ///< frames where registration failed and identity was used
  std::vector<double> residual;
};

/// Background point cloud of one frame, with camera-facing normals.
inline ColoredPointCloud background_cloud(const EgoFrame& f, const CameraIntrinsics& intr, const EgoParams& p) {
  const PixelMask keep = mask_foreground(f.depth.width, f.depth.height, f.people, p.mask_margin);
  ColoredPointCloud c = backproject(f.depth, f.color, intr, p.stride, keep);
  if (c.size() < static_cast<std::size_t>(p.normal_neighbors) + 1) return c;
  std::vector<double> variation;
  c = estimate_normals(std::move(c), p.normal_neighbors, &variation);
  if (p.max_surface_variation >= 1.0 / 3.0) return c;
  ColoredPointCloud flat;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (variation[i] > p.max_surface_variation) continue;
    flat.points.push_back(c.points[i]);
    flat.colors.push_back(c.colors[i]);
    flat.normals.push_back(c.normals[i]);
  }
  return flat;
}

/// Registers consecutive background clouds along a clip. Each solve is
/// initialized with the previous frame's ego transform. Both frames of a pair
/// are masked with the union of their person boxes, so background revealed or
/// hidden by a moving person appears in neither cloud. `frame(t)` supplies
/// frame t on demand; only two frames are held at a time.
template <class FrameSource>
EgoChain estimate_ego_chain(std::size_t n, FrameSource&& frame, const CameraIntrinsics& intr, const EgoParams& p = {}) {
  EgoChain chain;
  chain.ego.assign(n, RigidTransform{});
  chain.failed.assign(n, 0);
  chain.residual.assign(n, 0.0);
  if (n == 0) return chain;
  EgoFrame prev = frame(std::size_t{0});
  RigidTransform guess;
  for (std::size_t t = 1; t < n; ++t) {
    EgoFrame cur = frame(t);
    std::vector<trackio::BBox> both = prev.people;
    both.insert(both.end(), cur.people.begin(), cur.people.end());
    std::swap(prev.people, both);
    const ColoredPointCloud target = background_cloud(prev, intr, p);
    std::swap(prev.people, both);
    std::swap(cur.people, both);
    const ColoredPointCloud source = background_cloud(cur, intr, p);
    std::swap(cur.people, both);
    IcpResult r;
    if (target.has_normals() && source.has_normals()) r = colored_icp(source, target, p.icp, guess);
    if (r.success) {
      chain.ego[t] = r.transform;
      chain.residual[t] = r.residual;
      guess = r.transform;
    } else {
      chain.failed[t] = 1;
      guess = RigidTransform{};
    }
    prev = std::move(cur);
  }
  return chain;
}

inline EgoChain estimate_ego_chain(const std::vector<EgoFrame>& frames, const CameraIntrinsics& intr,
                                   const EgoParams& p = {}) {
  return estimate_ego_chain(
      frames.size(), [&](std::size_t t) { return frames[t]; }, intr, p);
}

}  // namespace imutube::egomotion
