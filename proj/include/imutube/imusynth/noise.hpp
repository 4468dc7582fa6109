#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "imutube/imusynth/signals.hpp"

namespace imutube::imusynth {

/// Simplified MEMS error model: white noise, bias random walk and ADC
/// quantization on accelerometer and gyroscope. Zero disables a term.
struct NoiseParams {
  double accel_sigma = 0.05;      ///< m/s^2
  double gyro_sigma = 0.005;      ///< rad/s
  double bias_walk_sigma = 0.001; ///< per channel per sqrt(s)
  double accel_range = 8.0 * kGravity;
  double gyro_range = 2000.0 * std::numbers::pi / 180.0;
  int bits = 16;

  static NoiseParams none() { return {0.0, 0.0, 0.0, 0.0, 0.0, 0}; }
};

namespace detail {

inline double quantize(double v, double range, int bits) {
  if (bits <= 0 || !(range > 0.0)) return v;
  const double step = 2.0 * range / std::ldexp(1.0, bits);
  return std::clamp(std::round(v / step) * step, -range, range);
}

}  // namespace detail

inline IMUStream sensor_noise(IMUStream s, std::uint64_t seed, const NoiseParams& p = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double walk = p.bias_walk_sigma / std::sqrt(s.rate);
  Vec3 accel_bias = Vec3::Zero(), gyro_bias = Vec3::Zero();
  for (std::size_t t = 0; t < s.size(); ++t) {
    for (int c = 0; c < 3; ++c) {
      double a = s.accel[t][c], g = s.gyro[t][c];
      if (walk > 0.0) {
        accel_bias[c] += walk * unit(rng);
        gyro_bias[c] += walk * unit(rng);
      }
      if (p.accel_sigma > 0.0) a += p.accel_sigma * unit(rng);
      if (p.gyro_sigma > 0.0) g += p.gyro_sigma * unit(rng);
      s.accel[t][c] = detail::quantize(a + accel_bias[c], p.accel_range, p.bits);
      s.gyro[t][c] = detail::quantize(g + gyro_bias[c], p.gyro_range, p.bits);
    }
  }
  return s;
}

}  // namespace imutube::imusynth
