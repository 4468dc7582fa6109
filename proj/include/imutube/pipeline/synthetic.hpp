#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/calib3d/pose_io.hpp"
#include "imutube/imusynth/imu_io.hpp"
#include "imutube/imusynth/kinematics.hpp"
#include "imutube/imusynth/noise.hpp"
#include "imutube/pipeline/manifest.hpp"
#include "imutube/pipeline/motion.hpp"
#include "imutube/pipeline/render.hpp"
#include "imutube/trackio/keypoint_io.hpp"

namespace imutube::pipeline {

struct SynthSpec {
  std::vector<Scenario> scenarios{Scenario::walk};
  int subjects = 1;
  double duration_s = 10.0;
  CameraMotion camera = CameraMotion::fixed;
  double fps = 30.0;
  int width = 160;
  int height = 120;
  double keypoint_noise_px = 0.0;
  double pose_noise_m = 0.0;
  /// Motionless extra people standing to the side.
  int bystanders = 0;
  bool render_depth = true;
  /// Draw the tracked subject into depth and color frames.
  bool render_person = true;
  std::vector<std::string> placements{"right_wrist", "waist_chest"};
  bool real_sensor_noise = true;
  std::uint64_t seed = 0;
};

/// Ground truth of one generated clip.
struct ClipTruth {
  std::string clip_id;
  Scenario scenario = Scenario::still;
  std::string subject;
  SubjectParams params;
  double fps = 30.0;
  calib3d::CameraIntrinsics intrinsics;
  std::vector<RigidTransform> camera;        ///< world from camera, per frame
  std::vector<std::vector<Vec3>> joints;     ///< world joints (17 COCO + pelvis), per frame
};

struct SynthOutput {
  std::vector<ClipManifest> manifests;
  std::vector<ClipTruth> truth;
  std::vector<fs::path> real_imu;  ///< CSV paths of the reference ("real") sensor streams
};

inline std::string subject_id(int s) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%02d", s + 1);
  return buf;
}

inline calib3d::CameraIntrinsics synthetic_intrinsics(int width, int height) {
  calib3d::CameraIntrinsics c;
  c.fx = c.fy = 0.9 * width;
  c.px = 0.5 * (width - 1);
  c.py = 0.5 * (height - 1);
  c.d = 0.0;
  return c;
}

/// Ground-truth joint motion and camera path of one clip, without files.
inline ClipTruth simulate_clip(Scenario scenario, int subject, const SynthSpec& spec, const CameraRig& rig = {}) {
  if (!(spec.duration_s >= 2.0)) throw DataError("generate_synthetic: duration must be at least 2 s");
  ClipTruth t;
  t.scenario = scenario;
  t.subject = subject_id(subject);
  t.clip_id = to_string(scenario) + "_" + t.subject;
  t.params = SubjectParams::draw(spec.seed, subject);
  t.fps = spec.fps;
  t.intrinsics = synthetic_intrinsics(spec.width, spec.height);
  CameraRig r = rig;
  r.motion = spec.camera;
  const int n = static_cast<int>(std::llround(spec.duration_s * spec.fps));
  for (int i = 0; i < n; ++i) {
    const double time = i / spec.fps;
    t.joints.push_back(body_pose(scenario, time, t.params));
    t.camera.push_back(r.pose(time, t.joints.back()[17]));
  }
  return t;
}

/// Reference sensor streams computed from ground-truth motion.
inline std::vector<imusynth::IMUStream> truth_imu(const ClipTruth& t, const std::vector<std::string>& placements,
                                                  bool noise, std::uint64_t seed) {
  egomotion::MotionTrack3D m;
  m.clip_id = t.clip_id;
  m.fps = t.fps;
  m.joints_world = t.joints;
  m.label = to_string(t.scenario);
  m.subject = t.subject;
  m = imusynth::with_orientations(std::move(m), imusynth::coco_skeleton());
  std::vector<imusynth::IMUStream> out;
  for (const auto& name : placements) {
    auto s = imusynth::synthesize(m, imusynth::make_placement(name));
    s.origin = "real";
    if (noise) s = imusynth::sensor_noise(std::move(s), fnv1a64(t.clip_id + "/" + name, seed));
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json truth_json(const ClipTruth& t) {
  nlohmann::ordered_json j;
  j["clip_id"] = t.clip_id;
  j["scenario"] = to_string(t.scenario);
  j["subject"] = t.subject;
  j["fps"] = t.fps;
  j["camera"] = nlohmann::ordered_json::array();
  for (const auto& c : t.camera) {
    std::vector<double> r(c.R.data(), c.R.data() + 9);
    j["camera"].push_back({{"R", r}, {"T", {c.T.x(), c.T.y(), c.T.z()}}});
  }
  j["joints"] = nlohmann::ordered_json::array();
  for (const auto& f : t.joints) {
    auto frame = nlohmann::ordered_json::array();
    for (const auto& p : f) frame.push_back({p.x(), p.y(), p.z()});
    j["joints"].push_back(std::move(frame));
  }
  return j;
}

}  // namespace detail

/// Writes clips/<clip>/{manifest.json, keypoints.jsonl, poses3d.jsonl,
/// intrinsics.jsonl, depth/, color/}, real/<clip>_t0_<placement>.csv and
/// truth/<clip>.json under `out`. Every random draw derives from spec.seed.
inline SynthOutput generate_synthetic(const SynthSpec& spec, const fs::path& out) {
  if (spec.subjects < 1) throw DataError("generate_synthetic: need at least one subject");
  if (spec.width < 8 || spec.height < 8) throw DataError("generate_synthetic: image too small");
  SynthOutput result;
  const Room room;
  for (Scenario scenario : spec.scenarios) {
    for (int s = 0; s < spec.subjects; ++s) {
      ClipTruth truth = simulate_clip(scenario, s, spec);
      const std::string& clip = truth.clip_id;
      const fs::path dir = out / "clips" / clip;
      fs::create_directories(dir);
      std::mt19937_64 rng(fnv1a64(clip, spec.seed));
      std::normal_distribution<double> kp_noise(0.0, 1.0);
      std::vector<std::vector<Vec3>> others;
      for (int b = 0; b < spec.bystanders; ++b) {
        SubjectParams p = SubjectParams::draw(spec.seed ^ 0xb57a, 100 + b);
        p.centre = Vec3(-2.2 + 4.4 * b / std::max(1, spec.bystanders), 2.0, 0.0);
        others.push_back(body_pose(Scenario::still, 0.0, p));
      }

      ClipManifest m;
      m.clip_id = clip;
      m.fps = spec.fps;
      m.frames = static_cast<int>(truth.joints.size());
      m.label = to_string(scenario);
      m.subject = truth.subject;
      m.keypoints = dir / "keypoints.jsonl";
      m.poses = dir / "poses3d.jsonl";
      m.intrinsics = dir / "intrinsics.jsonl";
      if (spec.render_depth) {
        m.depth_dir = dir / "depth";
        m.color_dir = dir / "color";
        fs::create_directories(m.depth_dir);
        fs::create_directories(m.color_dir);
      }

      std::string kp_text, pose_text, intr_text;
      for (int f = 0; f < m.frames; ++f) {
        const RigidTransform& cam = truth.camera[static_cast<std::size_t>(f)];
        const Mat3 rcw = cam.R.transpose();
        std::vector<const std::vector<Vec3>*> people{&truth.joints[static_cast<std::size_t>(f)]};
        for (const auto& o : others) people.push_back(&o);
        std::vector<std::size_t> order(people.size());
        std::iota(order.begin(), order.end(), 0);
        if (people.size() > 1) std::shuffle(order.begin(), order.end(), rng);

        trackio::KeypointFrame kf;
        kf.clip_id = clip;
        kf.frame_index = f;
        for (std::size_t slot = 0; slot < order.size(); ++slot) {
          const auto& joints = *people[order[slot]];
          trackio::Detection det;
          calib3d::Pose3D pose;
          pose.frame_index = f;
          pose.track_id = static_cast<int>(slot);
          for (int j = 0; j < trackio::kCocoJoints; ++j) {
            const Vec3 pc = rcw * (joints[static_cast<std::size_t>(j)] - cam.T);
            Vec2 uv = calib3d::project(pc, truth.intrinsics);
            if (spec.keypoint_noise_px > 0.0) uv += spec.keypoint_noise_px * Vec2(kp_noise(rng), kp_noise(rng));
            trackio::Keypoint2D k;
            k.x = uv.x();
            k.y = uv.y();
            k.confidence = 0.95;
            k.present = uv.x() >= 0 && uv.y() >= 0 && uv.x() <= spec.width - 1 && uv.y() <= spec.height - 1;
            det.push_back(k);
            Vec3 local = rcw * (joints[static_cast<std::size_t>(j)] - joints[17]);
            if (spec.pose_noise_m > 0.0) local += spec.pose_noise_m * Vec3(kp_noise(rng), kp_noise(rng), kp_noise(rng));
            pose.joints.push_back(local);
          }
          kf.detections.push_back(std::move(det));
          pose_text += calib3d::pose_line(clip, pose) + "\n";
        }
        kp_text += trackio::keypoint_line(kf) + "\n";
        intr_text += calib3d::intrinsics_line(clip, f, truth.intrinsics) + "\n";

        if (spec.render_depth) {
          std::vector<PersonShape> shapes;
          if (spec.render_person) shapes.push_back(person_shape(truth.joints[static_cast<std::size_t>(f)]));
          for (const auto& o : others) shapes.push_back(person_shape(o));
          const auto frame = render_frame(room, cam, truth.intrinsics, spec.width, spec.height, shapes);
          const std::string stem = egomotion::frame_stem(clip, f);
          egomotion::write_dmap(m.depth_dir / (stem + ".dmap"), frame.depth);
          egomotion::write_ppm(m.color_dir / (stem + ".ppm"), frame.color);
        }
      }
      write_file_atomic(m.keypoints, kp_text);
      write_file_atomic(m.poses, pose_text);
      write_file_atomic(m.intrinsics, intr_text);
      m.source = dir / kManifestName;
      write_manifest(m.source, m);

      for (const auto& stream : truth_imu(truth, spec.placements, spec.real_sensor_noise, spec.seed)) {
        const fs::path p = out / "real" / (clip + "_t0_" + stream.placement + ".csv");
        fs::create_directories(p.parent_path());
        imusynth::write_imu(p, stream);
        result.real_imu.push_back(p);
      }
      fs::create_directories(out / "truth");
      write_file_atomic(out / "truth" / (clip + ".json"), detail::truth_json(truth).dump() + "\n");
      result.manifests.push_back(std::move(m));
      result.truth.push_back(std::move(truth));
    }
  }
  return result;
}

}  // namespace imutube::pipeline
