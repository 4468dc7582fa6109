#pragma once

#include <vector>

#include "imutube/imusynth/skeleton.hpp"

namespace imutube::imusynth {

/// Observed root frame; nullopt when the defining joints are degenerate.
inline std::optional<Mat3> root_frame(const std::vector<Vec3>& joints, const Skeleton& sk) {
  const Vec3 lateral = joints[sk.lateral[1]] - joints[sk.lateral[0]];
  const Vec3 up = 0.5 * (joints[sk.up_high[0]] + joints[sk.up_high[1]]) -
                  0.5 * (joints[sk.up_low[0]] + joints[sk.up_low[1]]);
  if (lateral.norm() < 1e-9 || up.norm() < 1e-9) return std::nullopt;
  const Vec3 x = lateral.normalized();
  Vec3 z = up - up.dot(x) * x;
  if (z.norm() < 1e-6 * up.norm()) return std::nullopt;
  z.normalize();
  Mat3 f;
  f.col(0) = x;
  f.col(1) = z.cross(x);
  f.col(2) = z;
  return f;
}

/// Per-frame world orientation of every joint. The root orientation maps the
/// rest body frame onto the observed one; each other joint takes its parent's
/// orientation followed by the minimal rotation carrying the predicted bone
/// direction onto the observed one (no twist about the bone).
inline std::vector<std::vector<Mat3>> forward_kinematics(const MotionTrack3D& track, const Skeleton& sk) {
  const int n = sk.size();
  const std::vector<Vec3> rest = sk.rest_positions();
  const auto rest_root = root_frame(rest, sk);
  if (!rest_root) throw DataError("forward_kinematics: degenerate rest pose");
  const std::vector<int> order = sk.topological_order();

  std::vector<std::vector<Mat3>> out;
  out.reserve(track.joints_world.size());
  Mat3 prev_root = Mat3::Identity();
  std::vector<Mat3> prev_local(n, Mat3::Identity());
  for (const auto& joints : track.joints_world) {
    if (static_cast<int>(joints.size()) != n) {
      throw DataError("forward_kinematics: track has " + std::to_string(joints.size()) + " joints, skeleton " +
                      std::to_string(n));
    }
    std::vector<Mat3> rot(n, Mat3::Identity());
    const auto f = root_frame(joints, sk);
    rot[sk.root] = f ? Mat3(*f * rest_root->transpose()) : prev_root;
    prev_root = rot[sk.root];
    for (int j : order) {
      const int p = sk.parents[j];
      if (p < 0) continue;
      const Vec3 bone = joints[j] - joints[p];
      const double rest_len = sk.offsets[j].norm();
      Mat3 local = prev_local[j];
      if (bone.norm() > 1e-9 && rest_len > 0.0) {
        const Vec3 predicted = rot[p] * (sk.offsets[j] / rest_len);
        local = minimal_rotation(predicted, bone.normalized());
      }
      prev_local[j] = local;
      rot[j] = orthonormalize(local * rot[p]);
    }
    out.push_back(std::move(rot));
  }
  return out;
}

/// Fills track.joint_orientations.
inline MotionTrack3D with_orientations(MotionTrack3D track, const Skeleton& sk) {
  track.joint_orientations = forward_kinematics(track, sk);
  return track;
}

struct SensorTrajectory {
  std::vector<Vec3> positions;
  std::vector<Mat3> orientations;
};

/// Sensor pose over time: joint position, joint orientation ∘ mounting.
inline SensorTrajectory world_kinematics(const MotionTrack3D& track, const SensorPlacement& placement) {
  if (track.joint_orientations.size() != track.joints_world.size()) {
    throw DataError("world_kinematics: joint orientations missing; run forward_kinematics first");
  }
  SensorTrajectory s;
  for (std::size_t t = 0; t < track.joints_world.size(); ++t) {
    const auto& joints = track.joints_world[t];
    if (placement.joint_index < 0 || placement.joint_index >= static_cast<int>(joints.size())) {
      throw DataError("world_kinematics: placement joint index out of range");
    }
    s.positions.push_back(joints[placement.joint_index]);
    s.orientations.push_back(track.joint_orientations[t][placement.joint_index] * placement.mounting_rotation);
  }
  return s;
}

}  // namespace imutube::imusynth
