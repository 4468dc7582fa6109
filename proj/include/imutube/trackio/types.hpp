#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "imutube/core/error.hpp"

namespace imutube::trackio {

/// Default joint layout follows COCO-17.
inline constexpr int kCocoJoints = 17;

struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
  bool present = false;
};

using Detection = std::vector<Keypoint2D>;

struct KeypointFrame {
  std::string clip_id;
  int frame_index = 0;
  std::vector<Detection> detections;
};

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }

  BBox expanded(double margin) const {
    return {x_min - margin, y_min - margin, x_max + margin, y_max + margin};
  }

  /// Closed-interval containment, so a degenerate box still covers its own point.
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  bool operator==(const BBox&) const = default;
};

/// One tracked person. keypoints[i] belongs to frame first_frame + i.
struct PersonTrack {
  int track_id = 0;
  std::string clip_id;
  int first_frame = 0;
  double fps = 30.0;
  std::vector<Detection> keypoints;

  int frame_count() const { return static_cast<int>(keypoints.size()); }
  int last_frame() const { return first_frame + frame_count() - 1; }
  /// Time spanned from the first to the last frame.
  double duration_s() const { return keypoints.empty() ? 0.0 : (frame_count() - 1) / fps; }
};

inline int count_present(const Detection& d) {
  return static_cast<int>(std::count_if(d.begin(), d.end(), [](const Keypoint2D& k) { return k.present; }));
}

/// Tight box around the present joints.
inline BBox keypoint_bbox(const Detection& detection) {
  BBox box{};
  bool any = false;
  for (const auto& k : detection) {
    if (!k.present) continue;
    if (!any) {
      box = {k.x, k.y, k.x, k.y};
      any = true;
    } else {
      box.x_min = std::min(box.x_min, k.x);
      box.y_min = std::min(box.y_min, k.y);
      box.x_max = std::max(box.x_max, k.x);
      box.y_max = std::max(box.y_max, k.y);
    }
  }
  if (!any) throw DataError("keypoint_bbox: detection has no present joints");
  return box;
}

/// Intersection over union. Zero-area boxes always give 0.
inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace imutube::trackio
