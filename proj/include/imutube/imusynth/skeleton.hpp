#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "imutube/core/error.hpp"
#include "imutube/core/geometry.hpp"
#include "imutube/egomotion/compose.hpp"

namespace imutube::imusynth {

using egomotion::MotionTrack3D;

/// Joint tree with rest-pose offsets. The rest pose uses a body frame with
/// +X to the subject's right, +Y forward and +Z up.
struct Skeleton {
  std::vector<std::string> names;
  std::vector<int> parents;     ///< -1 for the root
  std::vector<Vec3> offsets;    ///< rest-pose offset from the parent joint (root: zero)
  int root = 0;
  /// Joints defining the root frame: lateral axis runs lateral[0] -> lateral[1];
  /// the up axis runs from the midpoint of up_low to the midpoint of up_high.
  std::array<int, 2> lateral{};
  std::array<int, 2> up_low{};
  std::array<int, 2> up_high{};

  int size() const { return static_cast<int>(names.size()); }

  int index_of(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
      if (names[i] == name) return i;
    throw DataError("skeleton has no joint named '" + std::string(name) + "'");
  }

  /// Rest-pose joint positions with the root at the origin.
  std::vector<Vec3> rest_positions() const {
    std::vector<Vec3> p(names.size(), Vec3::Zero());
    for (int j : topological_order())
      if (parents[j] >= 0) p[j] = p[parents[j]] + offsets[j];
    return p;
  }

  /// Parents before children.
  std::vector<int> topological_order() const {
    std::vector<int> order{root};
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int j = 0; j < size(); ++j)
        if (parents[j] == order[k]) order.push_back(j);
    if (static_cast<int>(order.size()) != size()) throw DataError("skeleton parent graph is not a tree");
    return order;
  }
};

/// COCO-17 keypoint order plus a pelvis joint (index 17) at the hip midpoint,
/// which serves as the kinematic root.
inline const Skeleton& coco_skeleton() {
  static const Skeleton s = [] {
    Skeleton k;
    k.names = {"nose",       "left_eye",   "right_eye",   "left_ear",    "right_ear",  "left_shoulder",
               "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_hip",
               "right_hip",  "left_knee",  "right_knee",  "left_ankle",  "right_ankle", "pelvis"};
    k.parents = {17, 0, 0, 1, 2, 17, 17, 5, 6, 7, 8, 17, 17, 11, 12, 13, 14, -1};
    k.offsets = {{0.0, 0.08, 0.68},  {-0.03, -0.02, 0.03}, {0.03, -0.02, 0.03}, {-0.05, -0.05, 0.0},
                 {0.05, -0.05, 0.0}, {-0.18, 0.0, 0.5},    {0.18, 0.0, 0.5},    {0.0, 0.0, -0.28},
                 {0.0, 0.0, -0.28},  {0.0, 0.0, -0.25},    {0.0, 0.0, -0.25},   {-0.1, 0.0, 0.0},
                 {0.1, 0.0, 0.0},    {0.0, 0.0, -0.45},    {0.0, 0.0, -0.45},   {0.0, 0.0, -0.42},
                 {0.0, 0.0, -0.42},  {0.0, 0.0, 0.0}};
    k.root = 17;
    k.lateral = {11, 12};
    k.up_low = {11, 12};
    k.up_high = {5, 6};
    return k;
  }();
  return s;
}

/// Appends the pelvis (hip midpoint) to 17-joint COCO frames.
inline MotionTrack3D with_pelvis(MotionTrack3D track) {
  for (auto& f : track.joints_world) {
    if (f.size() != 17) throw DataError("with_pelvis: expected 17 COCO joints, got " + std::to_string(f.size()));
    f.push_back(0.5 * (f[11] + f[12]));
  }
  track.joint_orientations.clear();
  return track;
}

/// Named on-body sensor site.
struct SensorPlacement {
  std::string name;
  int joint_index = 0;
  Mat3 mounting_rotation = Mat3::Identity();
};

/// Placement names: an optional "left_" / "right_" prefix (default right)
/// followed by forearm, head, shin, thigh, upper_arm, waist_chest, wrist,
/// ankle, hip, back or foot. Limb sites attach to the joint at the distal end
/// of the segment, so they take that segment's orientation.
inline SensorPlacement make_placement(const std::string& name, const Mat3& mounting = Mat3::Identity()) {
  std::string base = name;
  bool left = false;
  if (base.starts_with("left_")) {
    left = true;
    base = base.substr(5);
  } else if (base.starts_with("right_")) {
    base = base.substr(6);
  }
  const auto side = [&](int l, int r) { return left ? l : r; };
  int joint = -1;
  if (base == "forearm" || base == "wrist") joint = side(9, 10);
  else if (base == "upper_arm") joint = side(7, 8);
  else if (base == "thigh") joint = side(13, 14);
  else if (base == "shin" || base == "ankle" || base == "foot") joint = side(15, 16);
  else if (base == "head") joint = 0;
  else if (base == "waist_chest" || base == "hip" || base == "back") joint = 17;
  if (joint < 0) throw DataError("unknown sensor placement '" + name + "'");
  return {name, joint, mounting};
}

}  // namespace imutube::imusynth
