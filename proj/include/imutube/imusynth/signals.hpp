#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "imutube/imusynth/kinematics.hpp"

namespace imutube::imusynth {

inline constexpr double kGravity = 9.81;

/// Tri-axial accelerometer, gyroscope and magnetometer at one body site.
struct IMUStream {
  double rate = 30.0;
  std::vector<Vec3> accel;  ///< m/s^2, sensor frame
  std::vector<Vec3> gyro;   ///< rad/s, sensor frame
  std::vector<Vec3> mag;    ///< unit field direction, sensor frame
  std::string placement;
  std::string label;
  std::string subject;
  std::string origin = "virtual";  ///< "real" or "virtual"
  std::string clip;
  int track = 0;

  std::size_t size() const { return accel.size(); }
  double duration_s() const { return accel.empty() ? 0.0 : (static_cast<double>(accel.size()) - 1.0) / rate; }

  void validate() const {
    if (!(rate > 0.0)) throw DataError("IMUStream: rate must be positive");
    if (gyro.size() != accel.size() || mag.size() != accel.size()) throw DataError("IMUStream: channel lengths differ");
    for (std::size_t i = 0; i < accel.size(); ++i) {
      if (!accel[i].allFinite() || !gyro[i].allFinite() || !mag[i].allFinite()) {
        throw DataError("IMUStream: non-finite sample at index " + std::to_string(i));
      }
    }
  }
};

/// Finite-difference weights for the `order`-th derivative at `x0` from
/// samples at `xs` (Fornberg's recursion).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int order) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

/// Specific force in the sensor frame. World acceleration comes from a
/// `stencil`-point finite-difference second derivative, centred in the interior
/// and shifted to one-sided windows near the ends.
inline std::vector<Vec3> accel_signal(const std::vector<Vec3>& positions, const std::vector<Mat3>& orientations,
                                      double fps, bool gravity_on = true, int stencil = 7) {
  const std::size_t n = positions.size();
  if (n < 3) throw DataError("accel_signal: need at least 3 samples");
  if (orientations.size() != n) throw DataError("accel_signal: orientation count differs from positions");
  if (stencil < 3) throw DataError("accel_signal: stencil needs at least 3 points");
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(stencil), n);
  const std::size_t half = w / 2;
  std::vector<double> xs(w);
  for (std::size_t i = 0; i < w; ++i) xs[i] = static_cast<double>(i);
  std::vector<std::vector<double>> weights(w);
  for (std::size_t k = 0; k < w; ++k) weights[k] = fd_weights(static_cast<double>(k), xs, 2);
  const Vec3 g(0.0, 0.0, -kGravity);
  std::vector<Vec3> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t start = std::min(t >= half ? t - half : 0, n - w);
    const auto& wt = weights[t - start];
    Vec3 a = Vec3::Zero();
    for (std::size_t i = 0; i < w; ++i) a += wt[i] * positions[start + i];
    a *= fps * fps;
    if (gravity_on) a -= g;
    out[t] = orientations[t].transpose() * a;
  }
  return out;
}

/// Body-frame angular velocity from consecutive orientations; the last sample
/// repeats its predecessor. A relative rotation too close to 180 degrees has
/// no unique axis and is reported as an error.
inline std::vector<Vec3> gyro_signal(const std::vector<Mat3>& orientations, double fps) {
  const std::size_t n = orientations.size();
  if (n < 2) throw DataError("gyro_signal: need at least 2 samples");
  std::vector<Vec3> out(n);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const Mat3 rel = orientations[t].transpose() * orientations[t + 1];
    if (rotation_angle(rel) > std::numbers::pi - 1e-6) {
      throw DataError("gyro_signal: relative rotation of ~180 degrees between samples " + std::to_string(t) + " and " +
                      std::to_string(t + 1) + " is ambiguous");
    }
    out[t] = log_so3(rel) * fps;
  }
  out[n - 1] = out[n - 2];
  return out;
}

/// Default world field: 60 degree dip, horizontal component along +X.
inline Vec3 default_magnetic_field() {
  const double dip = std::numbers::pi / 3.0;
  return {std::cos(dip), 0.0, -std::sin(dip)};
}

inline std::vector<Vec3> mag_signal(const std::vector<Mat3>& orientations, const Vec3& field = default_magnetic_field()) {
  if (!(field.norm() > 0.0) || !field.allFinite()) throw DataError("mag_signal: field must be a non-zero vector");
  std::vector<Vec3> out;
  out.reserve(orientations.size());
  for (const auto& r : orientations) out.push_back((r.transpose() * field).normalized());
  return out;
}

struct SynthOptions {
  bool gravity_on = true;
  Vec3 field = default_magnetic_field();
  int accel_stencil = 7;
};

/// Noise-free virtual IMU stream at the track's frame rate.
inline IMUStream synthesize(const MotionTrack3D& track, const SensorPlacement& placement, const SynthOptions& opt = {}) {
  const SensorTrajectory s = world_kinematics(track, placement);
  IMUStream out;
  out.rate = track.fps;
  out.accel = accel_signal(s.positions, s.orientations, track.fps, opt.gravity_on, opt.accel_stencil);
  out.gyro = gyro_signal(s.orientations, track.fps);
  out.mag = mag_signal(s.orientations, opt.field);
  out.placement = placement.name;
  out.label = track.label;
  out.subject = track.subject;
  out.clip = track.clip_id;
  out.track = track.track_id;
  return out;
}

/// Linear interpolation onto a uniform grid at `target_rate` starting at t = 0.
/// Magnetometer samples are renormalized after interpolation.
inline IMUStream resample(const IMUStream& in, double target_rate) {
  if (!(target_rate > 0.0)) throw DataError("resample: target rate must be positive");
  in.validate();
  IMUStream out = in;
  out.rate = target_rate;
  if (in.size() == 0 || target_rate == in.rate) return out;
  const double duration = in.duration_s();
  const std::size_t m = static_cast<std::size_t>(std::floor(duration * target_rate + 1e-9)) + 1;
  out.accel.resize(m);
  out.gyro.resize(m);
  out.mag.resize(m);
  const std::size_t last = in.size() - 1;
  for (std::size_t k = 0; k < m; ++k) {
    const double pos = static_cast<double>(k) * in.rate / target_rate;
    std::size_t i = std::min(static_cast<std::size_t>(std::floor(pos)), last);
    const std::size_t j = std::min(i + 1, last);
    const double a = j == i ? 0.0 : pos - static_cast<double>(i);
    out.accel[k] = (1.0 - a) * in.accel[i] + a * in.accel[j];
    out.gyro[k] = (1.0 - a) * in.gyro[i] + a * in.gyro[j];
    const Vec3 mv = (1.0 - a) * in.mag[i] + a * in.mag[j];
    out.mag[k] = mv.norm() > 0.0 ? Vec3(mv.normalized()) : in.mag[i];
  }
  return out;
}

}  // namespace imutube::imusynth
