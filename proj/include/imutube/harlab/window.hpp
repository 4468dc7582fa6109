#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imutube/imusynth/signals.hpp"

namespace imutube::harlab {

using imusynth::IMUStream;

/// Fixed-length slice of one or more synchronised IMU streams.
/// Columns: for each placement in order, accel xyz, gyro xyz, mag xyz.
struct Window {
  Eigen::MatrixXd samples;  ///< L x C
  std::string label;
  std::string subject;
  std::string origin;  ///< "real" or "virtual"
  std::string clip;
  int track = 0;
  std::size_t start = 0;  ///< first sample index in the source stream

  Eigen::Index length() const { return samples.rows(); }
  Eigen::Index channels() const { return samples.cols(); }
};

inline constexpr int kChannelsPerPlacement = 9;

/// Channel names in column order, e.g. "wrist.ax".
inline std::vector<std::string> channel_names(const std::vector<std::string>& placements) {
  static const char* suffix[kChannelsPerPlacement] = {"ax", "ay", "az", "gx", "gy", "gz", "mx", "my", "mz"};
  std::vector<std::string> out;
  for (const auto& p : placements)
    for (const char* s : suffix) out.push_back(p + "." + s);
  return out;
}

/// Samples per window and hop (possibly fractional) in samples.
struct WindowGeometry {
  std::size_t length = 0;
  double hop = 0.0;
};

inline WindowGeometry window_geometry(double rate, double length_s, double overlap) {
  if (!(length_s > 0.0)) throw DataError("window: length must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw DataError("window: overlap must be in [0, 1)");
  if (!(rate > 0.0)) throw DataError("window: rate must be positive");
  const auto length = static_cast<std::size_t>(std::llround(rate * length_s));
  if (length == 0) throw DataError("window: fewer than one sample per window");
  return {length, static_cast<double>(length) * (1.0 - overlap)};
}

/// Number of whole windows that fit in `n` samples.
inline std::size_t window_count(std::size_t n, const WindowGeometry& g) {
  if (n < g.length) return 0;
  return static_cast<std::size_t>(std::floor(static_cast<double>(n - g.length) / g.hop + 1e-9)) + 1;
}

/// Slices synchronised streams (one per placement) into windows. Streams must
/// share rate and length. Metadata comes from the first stream.
inline std::vector<Window> window_slice(const std::vector<IMUStream>& streams, double length_s, double overlap) {
  if (streams.empty()) throw DataError("window_slice: no streams");
  const IMUStream& head = streams.front();
  for (const auto& s : streams) {
    s.validate();
    if (s.rate != head.rate || s.size() != head.size()) {
      throw DataError("window_slice: streams of '" + head.clip + "' differ in rate or length");
    }
  }
  const WindowGeometry g = window_geometry(head.rate, length_s, overlap);
  const std::size_t n = head.size();
  const std::size_t count = window_count(n, g);
  std::vector<Window> out;
  out.reserve(count);
  const auto cols = static_cast<Eigen::Index>(streams.size() * kChannelsPerPlacement);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start =
        std::min(static_cast<std::size_t>(std::llround(static_cast<double>(k) * g.hop)), n - g.length);
    Window w;
    w.samples.resize(static_cast<Eigen::Index>(g.length), cols);
    for (std::size_t p = 0; p < streams.size(); ++p) {
      const auto c0 = static_cast<Eigen::Index>(p * kChannelsPerPlacement);
      for (std::size_t i = 0; i < g.length; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        w.samples.block<1, 3>(r, c0) = streams[p].accel[start + i].transpose();
        w.samples.block<1, 3>(r, c0 + 3) = streams[p].gyro[start + i].transpose();
        w.samples.block<1, 3>(r, c0 + 6) = streams[p].mag[start + i].transpose();
      }
    }
    w.label = head.label;
    w.subject = head.subject;
    w.origin = head.origin;
    w.clip = head.clip;
    w.track = head.track;
    w.start = start;
    out.push_back(std::move(w));
  }
  return out;
}

inline std::vector<Window> window_slice(const IMUStream& stream, double length_s, double overlap) {
  return window_slice(std::vector<IMUStream>{stream}, length_s, overlap);
}

}  // namespace imutube::harlab
