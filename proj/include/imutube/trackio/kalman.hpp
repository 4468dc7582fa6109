#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "imutube/trackio/types.hpp"

namespace imutube::trackio {

struct KalmanParams {
  /// White-acceleration process noise, px/s^2.
  double sigma_accel = 500.0;
  /// Keypoint measurement noise, px.
  double sigma_meas = 2.0;
  /// Confidence assigned to joints filled in by the smoother.
  double filled_confidence = 0.1;
};

/// Forward Kalman filter plus Rauch-Tung-Striebel pass over one coordinate
/// under a constant-velocity model. `z[k]` empty means no observation.
/// Requires at least two observations.
inline std::vector<double> rts_smooth_1d(const std::vector<std::optional<double>>& z, double dt,
                                         const KalmanParams& p) {
  using Mat2 = Eigen::Matrix2d;
  using V2 = Eigen::Vector2d;
  const int n = static_cast<int>(z.size());
  int ka = -1, kb = -1;
  for (int k = 0; k < n && kb < 0; ++k) {
    if (!z[k]) continue;
    (ka < 0 ? ka : kb) = k;
  }
  if (kb < 0) throw DataError("rts_smooth_1d: need at least two observations");

  const double vel0 = (*z[kb] - *z[ka]) / ((kb - ka) * dt);
  Mat2 F;
  F << 1.0, dt, 0.0, 1.0;
  const double q = p.sigma_accel * p.sigma_accel;
  Mat2 Q;
  Q << q * dt * dt * dt * dt / 4.0, q * dt * dt * dt / 2.0, q * dt * dt * dt / 2.0, q * dt * dt;
  const double r = p.sigma_meas * p.sigma_meas;

  std::vector<V2> xp(n), xf(n);
  std::vector<Mat2> pp(n), pf(n);
  V2 x(*z[ka] - vel0 * ka * dt, vel0);
  const double span = (kb - ka) * dt;
  Mat2 P = Mat2::Zero();
  P(0, 0) = r;
  P(1, 1) = 2.0 * r / (span * span);
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      x = F * x;
      P = F * P * F.transpose() + Q;
    }
    xp[k] = x;
    pp[k] = P;
    if (z[k]) {
      const double s = P(0, 0) + r;
      const V2 gain = P.col(0) / s;
      x += gain * (*z[k] - x(0));
      P = P - gain * P.row(0);
    }
    xf[k] = x;
    pf[k] = P;
  }
  std::vector<double> out(n);
  V2 xs = xf[n - 1];
  out[n - 1] = xs(0);
  for (int k = n - 2; k >= 0; --k) {
    const Mat2 c = pf[k] * F.transpose() * pp[k + 1].inverse();
    xs = xf[k] + c * (xs - xp[k + 1]);
    out[k] = xs(0);
  }
  return out;
}

/// Fills and smooths every joint over the track's frame range. Joints seen
/// fewer than twice are filled with their nearest observed value (or the
/// frame's joint centroid when never seen) and flagged with confidence 0.
inline PersonTrack kalman_smooth(const PersonTrack& track, const KalmanParams& params = {}) {
  PersonTrack out = track;
  const int n = track.frame_count();
  if (n == 0) return out;
  const int joints = static_cast<int>(track.keypoints.front().size());
  const double dt = 1.0 / track.fps;
  std::vector<int> unseen;

  for (int j = 0; j < joints; ++j) {
    std::vector<std::optional<double>> zx(n), zy(n);
    int seen = 0;
    for (int k = 0; k < n; ++k) {
      const auto& kp = track.keypoints[k][j];
      if (!kp.present) continue;
      zx[k] = kp.x;
      zy[k] = kp.y;
      ++seen;
    }
    if (seen >= 2) {
      const auto sx = rts_smooth_1d(zx, dt, params);
      const auto sy = rts_smooth_1d(zy, dt, params);
      for (int k = 0; k < n; ++k) {
        auto& kp = out.keypoints[k][j];
        if (!kp.present) kp.confidence = params.filled_confidence;
        kp.x = sx[k];
        kp.y = sy[k];
        kp.present = true;
      }
    } else if (seen == 1) {
      int src = 0;
      while (!zx[src]) ++src;
      for (int k = 0; k < n; ++k) {
        auto& kp = out.keypoints[k][j];
        kp = {*zx[src], *zy[src], 0.0, true};
      }
    } else {
      unseen.push_back(j);
    }
  }
  if (static_cast<int>(unseen.size()) == joints) throw DataError("kalman_smooth: track has no observed joints");
  for (int k = 0; k < n; ++k) {
    double cx = 0.0, cy = 0.0;
    int c = 0;
    for (int j = 0; j < joints; ++j) {
      if (std::find(unseen.begin(), unseen.end(), j) != unseen.end()) continue;
      cx += out.keypoints[k][j].x;
      cy += out.keypoints[k][j].y;
      ++c;
    }
    for (int j : unseen) out.keypoints[k][j] = {cx / c, cy / c, 0.0, true};
  }
  return out;
}

}  // namespace imutube::trackio
