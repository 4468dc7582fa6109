#pragma once

#include <cmath>
#include <vector>

#include "imutube/calib3d/camera.hpp"
#include "imutube/egomotion/depth_io.hpp"
#include "imutube/trackio/types.hpp"

namespace imutube::egomotion {

using calib3d::CameraIntrinsics;

struct ColoredPointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> colors;   ///< RGB in [0,1]
  std::vector<Vec3> normals;  ///< empty until estimated

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty() && normals.size() == points.size(); }

  void transform(const RigidTransform& t) {
    for (auto& p : points) p = t.apply(p);
    for (auto& n : normals) n = t.R * n;
  }
};

/// Per-pixel keep flags, row-major. Empty means keep everything.
using PixelMask = std::vector<char>;

/// Drops pixels inside any bbox grown by `margin`.
inline PixelMask mask_foreground(int width, int height, const std::vector<trackio::BBox>& bboxes, double margin) {
  PixelMask keep(static_cast<std::size_t>(width) * height, 1);
  for (const auto& b : bboxes) {
    const trackio::BBox e = b.expanded(margin);
    const int x0 = std::max(0, static_cast<int>(std::ceil(e.x_min)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(e.y_min)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(e.x_max)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(e.y_max)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) keep[static_cast<std::size_t>(y) * width + x] = 0;
  }
  return keep;
}

/// Valid depth pixels on the stride grid, lifted through the inverse camera model.
inline ColoredPointCloud backproject(const DepthMap& depth, const RgbImage& color, const CameraIntrinsics& intr,
                                     int stride = 4, const PixelMask& keep = {}) {
  if (depth.width != color.width || depth.height != color.height) {
    throw DataError("backproject: depth " + std::to_string(depth.width) + "x" + std::to_string(depth.height) +
                    " does not match color " + std::to_string(color.width) + "x" + std::to_string(color.height));
  }
  if (depth.depth.size() != static_cast<std::size_t>(depth.width) * depth.height ||
      color.data.size() != static_cast<std::size_t>(color.width) * color.height * 3) {
    throw DataError("backproject: buffer size does not match dimensions");
  }
  if (stride < 1) throw DataError("backproject: stride must be >= 1");
  if (!keep.empty() && keep.size() != depth.depth.size()) throw DataError("backproject: mask size mismatch");
  ColoredPointCloud cloud;
  for (int y = 0; y < depth.height; y += stride) {
    for (int x = 0; x < depth.width; x += stride) {
      if (!depth.valid(x, y)) continue;
      if (!keep.empty() && !keep[static_cast<std::size_t>(y) * depth.width + x]) continue;
      cloud.points.push_back(calib3d::backproject_pixel(x, y, depth.at(x, y), intr));
      const std::uint8_t* c = color.pixel(x, y);
      cloud.colors.emplace_back(c[0] / 255.0, c[1] / 255.0, c[2] / 255.0);
    }
  }
  return cloud;
}

}  // namespace imutube::egomotion
