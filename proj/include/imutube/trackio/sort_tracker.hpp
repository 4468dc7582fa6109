#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "imutube/trackio/hungarian.hpp"
#include "imutube/trackio/types.hpp"

namespace imutube::trackio {

struct TrackerParams {
  double iou_threshold = 0.3;
  /// Consecutive unmatched frames a track survives before it is closed.
  int max_missed = 1;
};

namespace detail {

struct ActiveTrack {
  PersonTrack track;
  BBox last_box;
  BBox velocity{0, 0, 0, 0};  ///< per-frame box coordinate deltas
  int last_matched = 0;

  BBox predicted(int frame) const {
    const double k = frame - last_matched;
    return {last_box.x_min + k * velocity.x_min, last_box.y_min + k * velocity.y_min,
            last_box.x_max + k * velocity.x_max, last_box.y_max + k * velocity.y_max};
  }

  void update(int frame, const Detection& det, const BBox& box) {
    const int gap = frame - last_matched;
    const Detection absent(det.size());
    for (int g = 1; g < gap; ++g) track.keypoints.push_back(absent);
    track.keypoints.push_back(det);
    velocity = {(box.x_min - last_box.x_min) / gap, (box.y_min - last_box.y_min) / gap,
                (box.x_max - last_box.x_max) / gap, (box.y_max - last_box.y_max) / gap};
    last_box = box;
    last_matched = frame;
  }
};

}  // namespace detail

/// SORT-style association of per-frame detections into person tracks, using
/// IoU between constant-velocity box predictions and new detection boxes.
/// Frames from several clips are handled independently; track ids restart at
/// 0 per clip. Output is ordered by clip, then track id.
inline std::vector<PersonTrack> build_tracks(const std::vector<KeypointFrame>& frames, double fps,
                                             const TrackerParams& params = {}) {
  std::vector<PersonTrack> finished;
  std::vector<PersonTrack> clip_tracks;
  std::vector<detail::ActiveTrack> active;
  std::string clip;
  int next_id = 0;
  int prev_frame = -1;

  auto close_all = [&] {
    for (auto& a : active) clip_tracks.push_back(std::move(a.track));
    active.clear();
    std::sort(clip_tracks.begin(), clip_tracks.end(),
              [](const PersonTrack& a, const PersonTrack& b) { return a.track_id < b.track_id; });
    for (auto& t : clip_tracks) finished.push_back(std::move(t));
    clip_tracks.clear();
  };

  for (const auto& f : frames) {
    if (f.clip_id != clip) {
      close_all();
      clip = f.clip_id;
      next_id = 0;
      prev_frame = -1;
    }
    if (f.frame_index <= prev_frame) throw DataError("build_tracks: frames not sorted by frame index");
    prev_frame = f.frame_index;

    // Retire tracks that missed too many frames.
    for (auto it = active.begin(); it != active.end();) {
      if (f.frame_index - it->last_matched - 1 > params.max_missed) {
        clip_tracks.push_back(std::move(it->track));
        it = active.erase(it);
      } else {
        ++it;
      }
    }

    std::vector<int> det_index;
    std::vector<BBox> det_boxes;
    for (int d = 0; d < static_cast<int>(f.detections.size()); ++d) {
      if (count_present(f.detections[d]) == 0) continue;
      det_index.push_back(d);
      det_boxes.push_back(keypoint_bbox(f.detections[d]));
    }
    std::vector<BBox> predicted;
    predicted.reserve(active.size());
    for (const auto& a : active) predicted.push_back(a.predicted(f.frame_index));

    const Matching m = assign_tracks(predicted, det_boxes, params.iou_threshold);
    for (auto [ti, di] : m.pairs) {
      active[ti].update(f.frame_index, f.detections[det_index[di]], det_boxes[di]);
    }
    for (int di : m.unmatched_detections) {
      detail::ActiveTrack a;
      a.track.track_id = next_id++;
      a.track.clip_id = f.clip_id;
      a.track.first_frame = f.frame_index;
      a.track.fps = fps;
      a.track.keypoints.push_back(f.detections[det_index[di]]);
      a.last_box = det_boxes[di];
      a.last_matched = f.frame_index;
      active.push_back(std::move(a));
    }
  }
  close_all();
  return finished;
}

}  // namespace imutube::trackio
