#pragma once

#include <vector>

#include "imutube/trackio/types.hpp"

namespace imutube::trackio {

struct FilterParams {
  double min_duration_s = 1.0;
  /// Poses whose present-joint fraction is at or below this are removed.
  double min_joint_fraction = 0.5;
};

/// Removes unreliable poses and short tracks. A removed pose keeps its frame
/// slot (all joints marked absent) so the track's frame range stays contiguous;
/// empty frames at either end are trimmed. Idempotent.
inline std::vector<PersonTrack> filter_tracks(const std::vector<PersonTrack>& tracks, const FilterParams& params = {}) {
  std::vector<PersonTrack> out;
  for (const auto& t : tracks) {
    PersonTrack f = t;
    for (auto& det : f.keypoints) {
      if (det.empty()) continue;
      const double frac = static_cast<double>(count_present(det)) / static_cast<double>(det.size());
      if (frac <= params.min_joint_fraction) {
        for (auto& k : det) k.present = false;
      }
    }
    std::size_t lead = 0;
    while (lead < f.keypoints.size() && count_present(f.keypoints[lead]) == 0) ++lead;
    std::size_t trail = f.keypoints.size();
    while (trail > lead && count_present(f.keypoints[trail - 1]) == 0) --trail;
    if (lead >= trail) continue;
    f.keypoints = std::vector<Detection>(f.keypoints.begin() + static_cast<std::ptrdiff_t>(lead),
                                         f.keypoints.begin() + static_cast<std::ptrdiff_t>(trail));
    f.first_frame += static_cast<int>(lead);
    // A track spanning exactly min_duration_s is kept.
    if (f.duration_s() + 1e-9 < params.min_duration_s) continue;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace imutube::trackio
