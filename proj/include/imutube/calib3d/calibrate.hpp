#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "imutube/calib3d/pnp.hpp"
#include "imutube/trackio/types.hpp"

namespace imutube::calib3d {

/// Person-centered 3D joints for one frame, as produced by a pose lifter.
struct Pose3D {
  int frame_index = 0;
  int track_id = 0;
  std::vector<Vec3> joints;
};

struct CalibratedPose {
  int frame_index = 0;
  std::vector<Vec3> joints;  ///< camera coordinates: R p3 + T
  RigidTransform transform;
  double scale = 1.0;
  double reprojection_rmse = 0.0;
  bool converged = true;
  /// Solve failed; transform interpolated from neighbouring frames.
  bool interpolated = false;
};

struct CalibrationOptions {
  PnPOptions pnp{};
  /// Solves with reprojection RMSE above this count as failed frames.
  double fail_rmse_px = 20.0;
};

inline CalibratedPose apply_calibration(const Pose3D& pose, const RigidTransform& t) {
  CalibratedPose c;
  c.frame_index = pose.frame_index;
  c.transform = t;
  c.joints.reserve(pose.joints.size());
  for (const auto& p : pose.joints) c.joints.push_back(t.apply(p));
  return c;
}

/// Per-frame PnP along a track, each solve starting from the previous frame's
/// result. The projection scale is estimated on the first successful frame and
/// held fixed afterwards. Failed frames get transforms interpolated from the
/// nearest successful neighbours. Poses outside the track's range are skipped.
inline std::vector<CalibratedPose> calibrate_track(const std::vector<Pose3D>& poses, const trackio::PersonTrack& track,
                                                   const CameraIntrinsics& intr, const CalibrationOptions& opt = {}) {
  std::vector<const Pose3D*> aligned;
  for (const auto& p : poses) {
    if (p.frame_index >= track.first_frame && p.frame_index <= track.last_frame()) aligned.push_back(&p);
  }
  std::sort(aligned.begin(), aligned.end(),
            [](const Pose3D* a, const Pose3D* b) { return a->frame_index < b->frame_index; });

  std::vector<CalibratedPose> out;
  std::vector<char> ok;
  std::optional<RigidTransform> prev;
  std::optional<double> scale;
  for (const Pose3D* pose : aligned) {
    const auto& det = track.keypoints[static_cast<std::size_t>(pose->frame_index - track.first_frame)];
    if (det.size() != pose->joints.size()) throw DataError("calibrate_track: joint count differs between 2D and 3D");
    std::vector<Vec2> p2;
    std::vector<Vec3> p3;
    for (std::size_t j = 0; j < det.size(); ++j) {
      if (!det[j].present || det[j].confidence <= 0.0 || !pose->joints[j].allFinite()) continue;
      p2.emplace_back(det[j].x, det[j].y);
      p3.push_back(pose->joints[j]);
    }
    PnPOptions po = opt.pnp;
    if (scale) {
      po.estimate_scale = false;
      po.fixed_scale = *scale;
    }
    CalibratedPose cp;
    bool success = false;
    try {
      PnPResult r = solve_pnp(p2, p3, intr, prev, po);
      if (r.rmse <= opt.fail_rmse_px) {
        success = true;
        cp = apply_calibration(*pose, r.transform);
        cp.scale = r.scale;
        cp.reprojection_rmse = r.rmse;
        cp.converged = r.converged;
        prev = r.transform;
        if (!scale) scale = r.scale;
      }
    } catch (const DataError&) {
      success = false;
    }
    if (!success) {
      cp.frame_index = pose->frame_index;
      cp.interpolated = true;
      cp.converged = false;
    }
    out.push_back(std::move(cp));
    ok.push_back(success ? 1 : 0);
  }

  const int n = static_cast<int>(out.size());
  if (n > 0 && std::none_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) {
    throw DataError("calibrate_track: no frame of track " + std::to_string(track.track_id) + " could be calibrated");
  }
  for (int i = 0; i < n; ++i) {
    if (ok[i]) continue;
    int lo = i - 1, hi = i + 1;
    while (lo >= 0 && !ok[lo]) --lo;
    while (hi < n && !ok[hi]) ++hi;
    RigidTransform t;
    if (lo >= 0 && hi < n) {
      const double a = static_cast<double>(out[i].frame_index - out[lo].frame_index) /
                       static_cast<double>(out[hi].frame_index - out[lo].frame_index);
      t = interpolate(out[lo].transform, out[hi].transform, a);
    } else {
      t = out[lo >= 0 ? lo : hi].transform;
    }
    const double s = out[lo >= 0 ? lo : hi].scale;
    CalibratedPose filled = apply_calibration(*aligned[i], t);
    filled.scale = s;
    filled.interpolated = true;
    filled.converged = false;
    filled.reprojection_rmse = out[i].reprojection_rmse;
    out[i] = std::move(filled);
  }
  return out;
}

/// Sum over joints of the temporal variance of each joint position.
inline double pose_variation(const std::vector<CalibratedPose>& track) {
  if (track.empty()) return 0.0;
  const std::size_t joints = track.front().joints.size();
  const double n = static_cast<double>(track.size());
  double total = 0.0;
  for (std::size_t j = 0; j < joints; ++j) {
    Vec3 mean = Vec3::Zero();
    for (const auto& f : track) mean += f.joints[j];
    mean /= n;
    double var = 0.0;
    for (const auto& f : track) var += (f.joints[j] - mean).squaredNorm();
    total += var / n;
  }
  return total;
}

/// Indices of tracks whose pose variation is at least the median over all
/// tracks. Ties at the median are kept, so at least one track survives.
inline std::vector<std::size_t> prune_background(const std::vector<std::vector<CalibratedPose>>& tracks) {
  std::vector<std::size_t> keep;
  if (tracks.empty()) return keep;
  std::vector<double> var;
  var.reserve(tracks.size());
  for (const auto& t : tracks) var.push_back(pose_variation(t));
  std::vector<double> sorted = var;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  for (std::size_t i = 0; i < var.size(); ++i) {
    if (var[i] >= median * (1.0 - 1e-12)) keep.push_back(i);
  }
  return keep;
}

}  // namespace imutube::calib3d
