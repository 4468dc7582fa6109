#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "imutube/calib3d/pose_io.hpp"
#include "imutube/distmap/rank_map.hpp"
#include "imutube/egomotion/compose.hpp"
#include "imutube/egomotion/depth_io.hpp"
#include "imutube/harlab/window.hpp"
#include "imutube/imusynth/imu_io.hpp"
#include "imutube/imusynth/kinematics.hpp"
#include "imutube/imusynth/noise.hpp"
#include "imutube/pipeline/config.hpp"
#include "imutube/pipeline/manifest.hpp"
#include "imutube/pipeline/render.hpp"

namespace imutube::pipeline {

/// A stage failed while processing one clip.
class StageError : public DataError {
 public:
  StageError(std::string stage, const std::string& what) : DataError(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct TrackResult {
  int track_id = 0;
  egomotion::MotionTrack3D motion;  ///< world frame, Z up, with pelvis and orientations
  std::vector<calib3d::CalibratedPose> calibrated;
  std::vector<imusynth::IMUStream> streams;
};

struct ClipResult {
  std::string clip_id;
  int tracks_total = 0;              ///< tracks that passed filtering
  std::vector<TrackResult> tracks;   ///< tracks kept after background pruning
  egomotion::EgoChain ego;
  std::vector<RigidTransform> world_from_camera;  ///< per clip frame, before the Z-up rotation
  std::vector<std::string> warnings;
};

/// Rotation from first-camera coordinates into the Z-up world.
inline Mat3 world_up_rotation(double camera_pitch_deg) {
  return rot_x(-camera_pitch_deg * std::numbers::pi / 180.0) * level_camera_axes();
}

/// Applies a fitted map to every channel of a stream. Channel names follow
/// harlab::channel_names for the stream's placement.
inline imusynth::IMUStream apply_stream_map(const distmap::DistributionMap& map, imusynth::IMUStream s) {
  const auto names = harlab::channel_names({s.placement});
  std::vector<Vec3>* groups[3] = {&s.accel, &s.gyro, &s.mag};
  for (int g = 0; g < 3; ++g) {
    for (int a = 0; a < 3; ++a) {
      const auto& ch = map.channel(names[static_cast<std::size_t>(3 * g + a)]);
      for (auto& v : *groups[g]) v[a] = ch.apply(v[a]);
    }
  }
  return s;
}

namespace detail {

template <class Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

/// 3D poses for each frame of `track`, matched to the lifted detection whose
/// box best overlaps the track's raw detection. Frames without a match are
/// interpolated from their neighbours.
inline std::vector<calib3d::Pose3D> poses_for_track(const trackio::PersonTrack& filtered, const trackio::PersonTrack& raw,
                                                    const std::map<int, const trackio::KeypointFrame*>& frames,
                                                    const calib3d::PoseStream& lifted) {
  const int n = filtered.frame_count();
  std::vector<std::optional<calib3d::Pose3D>> slots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int f = filtered.first_frame + i;
    const int ri = f - raw.first_frame;
    if (ri < 0 || ri >= raw.frame_count()) continue;
    const auto& det = raw.keypoints[static_cast<std::size_t>(ri)];
    const auto kf = frames.find(f);
    if (kf == frames.end() || trackio::count_present(det) == 0) continue;
    const trackio::BBox box = trackio::keypoint_bbox(det);
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t d = 0; d < kf->second->detections.size(); ++d) {
      const auto& cand = kf->second->detections[d];
      if (trackio::count_present(cand) == 0) continue;
      const double o = trackio::iou(box, trackio::keypoint_bbox(cand));
      if (o > best_iou) {
        best_iou = o;
        best = static_cast<int>(d);
      }
    }
    if (best < 0) continue;
    if (const auto* p = lifted.find(f, best)) {
      calib3d::Pose3D pose = *p;
      pose.track_id = filtered.track_id;
      slots[static_cast<std::size_t>(i)] = std::move(pose);
    }
  }
  std::vector<int> have;
  for (int i = 0; i < n; ++i)
    if (slots[static_cast<std::size_t>(i)]) have.push_back(i);
  if (have.empty()) throw DataError("track " + std::to_string(filtered.track_id) + " has no matching 3D poses");
  std::vector<calib3d::Pose3D> out;
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (slots[static_cast<std::size_t>(i)]) {
      out.push_back(*slots[static_cast<std::size_t>(i)]);
      continue;
    }
    while (k + 1 < have.size() && have[k + 1] < i) ++k;
    const int lo = have[k] < i ? have[k] : -1;
    const int hi = lo >= 0 ? (k + 1 < have.size() ? have[k + 1] : -1) : have[k];
    calib3d::Pose3D p;
    if (lo >= 0 && hi >= 0) {
      const auto& a = *slots[static_cast<std::size_t>(lo)];
      const auto& b = *slots[static_cast<std::size_t>(hi)];
      const double w = static_cast<double>(i - lo) / (hi - lo);
      p = a;
      for (std::size_t j = 0; j < p.joints.size(); ++j) p.joints[j] = (1 - w) * a.joints[j] + w * b.joints[j];
    } else {
      p = *slots[static_cast<std::size_t>(lo >= 0 ? lo : hi)];
    }
    p.frame_index = filtered.first_frame + i;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

/// Runs tracking, calibration, ego-motion, world composition and IMU synthesis
/// for one clip. `map`, when given, is applied to the synthesized streams.
inline ClipResult process_clip(const ClipManifest& m, const PipelineConfig& cfg,
                               const distmap::DistributionMap* map = nullptr) {
  ClipResult res;
  res.clip_id = m.clip_id;
  const auto& tc = cfg.tracking;

  std::vector<trackio::KeypointFrame> frames;
  std::vector<trackio::PersonTrack> raw, filtered;
  detail::run_stage("trackio", [&] {
    trackio::KeypointFormat fmt;
    fmt.min_confidence = tc.min_confidence;
    for (auto& f : trackio::load_keypoint_stream(m.keypoints, fmt))
      if (f.clip_id == m.clip_id) frames.push_back(std::move(f));
    if (frames.empty()) throw DataError("no keypoint frames for clip '" + m.clip_id + "'");
    raw = trackio::build_tracks(frames, m.fps, tc.tracker);
    filtered = trackio::filter_tracks(raw, tc.filter);
    return 0;
  });
  res.tracks_total = static_cast<int>(filtered.size());
  if (filtered.empty()) {
    res.warnings.push_back("no track passed filtering");
    return res;
  }
  std::map<int, const trackio::KeypointFrame*> by_frame;
  for (const auto& f : frames) by_frame[f.frame_index] = &f;

  calib3d::CameraIntrinsics intr;
  std::vector<std::vector<calib3d::CalibratedPose>> calibrated;
  std::vector<const trackio::PersonTrack*> calibrated_src;
  detail::run_stage("calib3d", [&] {
    const auto per_frame = calib3d::load_intrinsics_stream(m.intrinsics);
    intr = calib3d::aggregate_intrinsics(per_frame);
    const auto lifted = calib3d::load_pose_stream(m.poses);
    for (const auto& ft : filtered) {
      const auto rt = std::find_if(raw.begin(), raw.end(), [&](const auto& r) { return r.track_id == ft.track_id; });
      try {
        const auto smoothed = trackio::kalman_smooth(ft, tc.kalman);
        const auto poses = detail::poses_for_track(ft, *rt, by_frame, lifted);
        calibrated.push_back(calib3d::calibrate_track(poses, smoothed, intr, cfg.calibration));
        calibrated_src.push_back(&ft);
      } catch (const DataError& e) {
        res.warnings.push_back("track " + std::to_string(ft.track_id) + " skipped: " + e.what());
      }
    }
    if (calibrated.empty()) throw DataError("no track could be calibrated");
    return 0;
  });
  const auto keep = calib3d::prune_background(calibrated);

  const int n_frames = std::max(m.frames, by_frame.rbegin()->first + 1);
  res.world_from_camera.assign(static_cast<std::size_t>(n_frames), RigidTransform{});
  if (cfg.egomotion.enabled && m.has_depth()) {
    detail::run_stage("egomotion", [&] {
      std::vector<std::vector<trackio::BBox>> boxes(static_cast<std::size_t>(n_frames));
      for (const auto& [f, kf] : by_frame)
        for (const auto& d : kf->detections)
          if (trackio::count_present(d) > 0 && f < n_frames) boxes[static_cast<std::size_t>(f)].push_back(trackio::keypoint_bbox(d));
      for (const auto& ft : filtered) {
        const auto smoothed = trackio::kalman_smooth(ft, tc.kalman);
        for (int i = 0; i < smoothed.frame_count(); ++i) {
          const int f = smoothed.first_frame + i;
          const auto& d = smoothed.keypoints[static_cast<std::size_t>(i)];
          if (f < n_frames && trackio::count_present(d) > 0) boxes[static_cast<std::size_t>(f)].push_back(trackio::keypoint_bbox(d));
        }
      }
      auto load = [&](std::size_t t) {
        egomotion::EgoFrame ef;
        const std::string stem = egomotion::frame_stem(m.clip_id, static_cast<int>(t));
        ef.depth = egomotion::read_dmap(m.depth_dir / (stem + ".dmap"));
        ef.color = egomotion::read_ppm(m.color_dir / (stem + ".ppm"));
        if (ef.depth.width != ef.color.width || ef.depth.height != ef.color.height) {
          throw DataError(stem + ": depth and color sizes differ");
        }
        ef.people = boxes[t];
        return ef;
      };
      res.ego = egomotion::estimate_ego_chain(static_cast<std::size_t>(n_frames), load, intr, cfg.egomotion.params);
      res.world_from_camera = egomotion::accumulate_ego(res.ego.ego);
      const auto failed = std::count(res.ego.failed.begin(), res.ego.failed.end(), 1);
      if (failed > 0) res.warnings.push_back(std::to_string(failed) + " frames failed registration (identity used)");
      return 0;
    });
  } else if (cfg.egomotion.enabled) {
    res.warnings.push_back("no depth frames; camera assumed static");
  }

  const Mat3 up = world_up_rotation(cfg.egomotion.camera_pitch_deg);
  const auto& sk = imusynth::coco_skeleton();
  for (auto idx : keep) {
    const auto& cal = calibrated[idx];
    const auto* ft = calibrated_src[idx];
    TrackResult tr;
    tr.track_id = ft->track_id;
    detail::run_stage("compose", [&] {
      std::vector<RigidTransform> w;
      for (const auto& c : cal) {
        if (c.frame_index >= n_frames) throw DataError("pose frame beyond clip length");
        w.push_back(res.world_from_camera[static_cast<std::size_t>(c.frame_index)]);
      }
      auto motion = egomotion::compose_with_world(cal, w);
      for (auto& f : motion.joints_world)
        for (auto& p : f) p = up * p;
      motion.track_id = ft->track_id;
      motion.clip_id = m.clip_id;
      motion.fps = m.fps;
      motion.label = m.label;
      motion.subject = m.subject;
      tr.motion = imusynth::with_orientations(imusynth::with_pelvis(std::move(motion)), sk);
      return 0;
    });
    detail::run_stage("imusynth", [&] {
      if (tr.motion.frame_count() < 3) throw DataError("track " + std::to_string(tr.track_id) + " too short for synthesis");
      for (const auto& name : cfg.imusynth.placements) {
        auto s = imusynth::synthesize(tr.motion, imusynth::make_placement(name), synth_options(cfg.imusynth));
        s.origin = "virtual";
        if (cfg.imusynth.noise) {
          s = imusynth::sensor_noise(std::move(s),
                                     fnv1a64(m.clip_id + "/" + std::to_string(tr.track_id) + "/" + name, cfg.seed),
                                     cfg.imusynth.noise_params);
        }
        if (s.rate != cfg.imusynth.rate) s = imusynth::resample(s, cfg.imusynth.rate);
        tr.streams.push_back(std::move(s));
      }
      return 0;
    });
    if (map) {
      detail::run_stage("distmap", [&] {
        for (auto& s : tr.streams) s = apply_stream_map(*map, std::move(s));
        return 0;
      });
    }
    tr.calibrated = cal;
    res.tracks.push_back(std::move(tr));
  }
  return res;
}

inline fs::path imu_output_path(const fs::path& out_dir, const imusynth::IMUStream& s) {
  return out_dir / "imu" / (s.clip + "_t" + std::to_string(s.track) + "_" + s.placement + ".csv");
}

struct ClipRecord {
  std::string clip_id;
  fs::path manifest;
  bool ok = false;
  std::string failed_stage;
  std::string error;
  int tracks_total = 0;
  int tracks_kept = 0;
  std::vector<std::string> warnings;
  std::vector<fs::path> outputs;
};

struct RunSummary {
  std::vector<ClipRecord> clips;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t warnings = 0;
  std::size_t outputs = 0;
  fs::path provenance;

  bool partial() const { return failed > 0; }
};

inline nlohmann::ordered_json provenance_json(const PipelineConfig& cfg, const RunSummary& s, const fs::path& out_dir) {
  nlohmann::ordered_json j;
  j["config_fingerprint"] = config_fingerprint(cfg);
  j["stage_fingerprints"] = stage_fingerprints(cfg);
  j["config"] = config_to_json(cfg);
  j["clips"] = nlohmann::ordered_json::array();
  for (const auto& c : s.clips) {
    nlohmann::ordered_json r;
    r["clip_id"] = c.clip_id;
    r["manifest"] = c.manifest.generic_string();
    r["status"] = c.ok ? "ok" : "failed";
    if (!c.ok) {
      r["failed_stage"] = c.failed_stage;
      r["error"] = c.error;
    }
    r["tracks_total"] = c.tracks_total;
    r["tracks_kept"] = c.tracks_kept;
    r["warnings"] = c.warnings;
    auto outs = nlohmann::ordered_json::array();
    for (const auto& o : c.outputs) outs.push_back(fs::relative(o, out_dir).generic_string());
    r["outputs"] = outs;
    j["clips"].push_back(std::move(r));
  }
  j["summary"] = {{"clips", s.clips.size()}, {"ok", s.ok}, {"failed", s.failed}, {"warnings", s.warnings}, {"outputs", s.outputs}};
  return j;
}

/// Processes every manifest, writing out_dir/imu/<clip>_t<track>_<placement>.csv
/// (plus sidecars) and out_dir/provenance.json. A failing clip is recorded and
/// skipped. Clips run on up to cfg.workers threads; output does not depend on
/// the worker count.
inline RunSummary run_pipeline(const std::vector<fs::path>& manifests, const PipelineConfig& cfg, const fs::path& out_dir) {
  std::optional<distmap::DistributionMap> map;
  if (!cfg.distmap.map_path.empty()) map = distmap::load_map(cfg.distmap.map_path);
  fs::create_directories(out_dir / "imu");
  RunSummary summary;
  summary.clips.resize(manifests.size());

  auto work = [&](std::size_t i) {
    ClipRecord& rec = summary.clips[i];
    rec.manifest = manifests[i];
    rec.clip_id = manifests[i].parent_path().filename().string();
    if (rec.clip_id.empty()) rec.clip_id = manifests[i].string();
    try {
      const ClipManifest m = detail::run_stage("manifest", [&] { return load_manifest(manifests[i]); });
      rec.clip_id = m.clip_id;
      spdlog::info("clip {}: processing {} frames", m.clip_id, m.frames);
      const ClipResult r = process_clip(m, cfg, map ? &*map : nullptr);
      rec.tracks_total = r.tracks_total;
      rec.tracks_kept = static_cast<int>(r.tracks.size());
      rec.warnings = r.warnings;
      for (const auto& t : r.tracks) {
        for (const auto& s : t.streams) {
          const fs::path p = imu_output_path(out_dir, s);
          imusynth::write_imu(p, s);
          rec.outputs.push_back(p);
        }
      }
      rec.ok = true;
      for (const auto& w : rec.warnings) spdlog::warn("clip {}: {}", rec.clip_id, w);
    } catch (const StageError& e) {
      rec.failed_stage = e.stage();
      rec.error = e.what();
      spdlog::error("clip {} skipped: {}", rec.clip_id, e.what());
    } catch (const std::exception& e) {
      rec.failed_stage = "output";
      rec.error = e.what();
      spdlog::error("clip {} skipped: {}", rec.clip_id, e.what());
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.workers)), manifests.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < manifests.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < manifests.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& c : summary.clips) {
    (c.ok ? summary.ok : summary.failed)++;
    summary.warnings += c.warnings.size() + (c.ok ? 0 : 1);
    summary.outputs += c.outputs.size();
  }
  summary.provenance = out_dir / "provenance.json";
  write_file_atomic(summary.provenance, provenance_json(cfg, summary, out_dir).dump(2) + "\n");
  return summary;
}

}  // namespace imutube::pipeline
