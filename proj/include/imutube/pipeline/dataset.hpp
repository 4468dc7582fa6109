#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "imutube/harlab/window.hpp"
#include "imutube/imusynth/imu_io.hpp"

namespace imutube::pipeline {

/// All IMU CSVs (with sidecars) below `dir`, in path order.
inline std::vector<fs::path> find_imu_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv" && fs::exists(imusynth::sidecar_path(e.path()))) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Reads a stream and checks its sidecar fields.
inline imusynth::IMUStream load_imu_checked(const fs::path& csv) {
  auto s = imusynth::read_imu(csv);
  const std::string meta = imusynth::sidecar_path(csv).string();
  if (s.origin != "real" && s.origin != "virtual") {
    throw ParseError(meta, 0, "field 'origin' must be \"real\" or \"virtual\", got \"" + s.origin + "\"");
  }
  if (!(s.rate > 0.0)) throw ParseError(meta, 0, "field 'rate' must be positive");
  if (s.label.empty()) throw ParseError(meta, 0, "field 'label' is empty");
  if (s.subject.empty()) throw ParseError(meta, 0, "field 'subject' is empty");
  if (s.placement.empty()) throw ParseError(meta, 0, "field 'placement' is empty");
  return s;
}

/// Loads every stream under `dirs`, groups them per recording (origin, clip,
/// track), orders each group by `placements`, resamples to `rate` and slices
/// windows. Recordings missing a placement are reported as errors.
inline std::vector<harlab::Window> load_windows(const std::vector<fs::path>& dirs,
                                                const std::vector<std::string>& placements, double rate,
                                                double window_s, double overlap) {
  using Key = std::tuple<std::string, std::string, int, std::string>;
  std::map<Key, std::map<std::string, std::pair<imusynth::IMUStream, fs::path>>> groups;
  for (const auto& dir : dirs) {
    for (const auto& file : find_imu_files(dir)) {
      auto s = load_imu_checked(file);
      if (std::find(placements.begin(), placements.end(), s.placement) == placements.end()) continue;
      const Key key{s.origin, s.clip.empty() ? file.stem().string() : s.clip, s.track, s.subject};
      auto& slot = groups[key];
      if (slot.count(s.placement)) {
        throw ParseError(imusynth::sidecar_path(file).string(), 0,
                         "field 'placement': duplicate \"" + s.placement + "\" for clip " + std::get<1>(key));
      }
      const std::string placement = s.placement;
      slot.emplace(placement, std::make_pair(std::move(s), file));
    }
  }
  std::vector<harlab::Window> out;
  for (auto& [key, by_place] : groups) {
    std::vector<imusynth::IMUStream> streams;
    for (const auto& p : placements) {
      const auto it = by_place.find(p);
      if (it == by_place.end()) {
        throw DataError("recording " + std::get<1>(key) + " track " + std::to_string(std::get<2>(key)) +
                        " (" + std::get<0>(key) + ") has no stream for placement '" + p + "'");
      }
      streams.push_back(imusynth::resample(it->second.first, rate));
    }
    const std::size_t n = std::min_element(streams.begin(), streams.end(), [](const auto& a, const auto& b) {
                            return a.size() < b.size();
                          })->size();
    for (auto& s : streams) {
      if (s.label != streams.front().label) {
        throw ParseError(imusynth::sidecar_path(by_place.at(s.placement).second).string(), 0,
                         "field 'label' disagrees with other placements of the same recording");
      }
      s.accel.resize(n);
      s.gyro.resize(n);
      s.mag.resize(n);
    }
    auto w = harlab::window_slice(streams, window_s, overlap);
    out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return out;
}

}  // namespace imutube::pipeline
