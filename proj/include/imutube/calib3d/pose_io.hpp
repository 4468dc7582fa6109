#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/calib3d/calibrate.hpp"
#include "imutube/core/io.hpp"

namespace imutube::calib3d {

/// 3D poses of one clip keyed by (frame, track). `track` is the index of the
/// lifted detection within its keypoint frame.
struct PoseStream {
  std::string clip_id;
  std::map<std::pair<int, int>, Pose3D> poses;

  const Pose3D* find(int frame, int track) const {
    const auto it = poses.find({frame, track});
    return it == poses.end() ? nullptr : &it->second;
  }
};

namespace detail {

template <class Fn>
void for_each_json_line(const fs::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(path.string(), line_no, "expected an object");
    fn(j, line_no);
  }
}

inline double number_field(const nlohmann::json& j, const char* key, const fs::path& path, std::size_t line) {
  if (!j.contains(key) || !j[key].is_number()) throw ParseError(path.string(), line, std::string("missing number field '") + key + "'");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ParseError(path.string(), line, std::string("non-finite '") + key + "'");
  return v;
}

inline int int_field(const nlohmann::json& j, const char* key, const fs::path& path, std::size_t line) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ParseError(path.string(), line, std::string("missing integer field '") + key + "'");
  }
  return j[key].get<int>();
}

}  // namespace detail

inline PoseStream load_pose_stream(const fs::path& path, int num_joints = 17) {
  PoseStream s;
  detail::for_each_json_line(path, [&](const nlohmann::json& j, std::size_t ln) {
    if (!j.contains("clip") || !j["clip"].is_string()) throw ParseError(path.string(), ln, "missing string field 'clip'");
    if (s.clip_id.empty()) s.clip_id = j["clip"].get<std::string>();
    Pose3D p;
    p.frame_index = detail::int_field(j, "frame", path, ln);
    p.track_id = detail::int_field(j, "track", path, ln);
    if (!j.contains("joints") || !j["joints"].is_array() || static_cast<int>(j["joints"].size()) != num_joints) {
      throw ParseError(path.string(), ln, "expected 'joints' with " + std::to_string(num_joints) + " entries");
    }
    for (const auto& jt : j["joints"]) {
      if (!jt.is_array() || jt.size() != 3 || !jt[0].is_number() || !jt[1].is_number() || !jt[2].is_number()) {
        throw ParseError(path.string(), ln, "joint must be [x, y, z]");
      }
      const Vec3 v(jt[0].get<double>(), jt[1].get<double>(), jt[2].get<double>());
      if (!v.allFinite()) throw ParseError(path.string(), ln, "non-finite joint");
      p.joints.push_back(v);
    }
    const std::pair<int, int> key{p.frame_index, p.track_id};
    if (!s.poses.emplace(key, std::move(p)).second) throw ParseError(path.string(), ln, "duplicate (frame, track)");
  });
  return s;
}

inline std::string pose_line(const std::string& clip, const Pose3D& p) {
  std::ostringstream os;
  os << "{\"clip\":\"" << clip << "\",\"track\":" << p.track_id << ",\"frame\":" << p.frame_index << ",\"joints\":[";
  for (std::size_t i = 0; i < p.joints.size(); ++i) {
    if (i) os << ',';
    os << '[' << format_number(p.joints[i].x(), 12) << ',' << format_number(p.joints[i].y(), 12) << ','
       << format_number(p.joints[i].z(), 12) << ']';
  }
  os << "]}";
  return os.str();
}

/// Per-frame intrinsics estimates, sorted by frame.
inline std::vector<CameraIntrinsics> load_intrinsics_stream(const fs::path& path) {
  std::map<int, CameraIntrinsics> by_frame;
  detail::for_each_json_line(path, [&](const nlohmann::json& j, std::size_t ln) {
    const int frame = detail::int_field(j, "frame", path, ln);
    CameraIntrinsics c;
    c.fx = detail::number_field(j, "fx", path, ln);
    c.fy = detail::number_field(j, "fy", path, ln);
    c.px = detail::number_field(j, "px", path, ln);
    c.py = detail::number_field(j, "py", path, ln);
    c.d = detail::number_field(j, "d", path, ln);
    if (!c.valid()) throw ParseError(path.string(), ln, "focal lengths must be positive");
    if (!by_frame.emplace(frame, c).second) throw ParseError(path.string(), ln, "duplicate frame");
  });
  if (by_frame.empty()) throw ParseError(path.string(), 0, "no intrinsics records");
  std::vector<CameraIntrinsics> out;
  for (const auto& [f, c] : by_frame) out.push_back(c);
  return out;
}

inline std::string intrinsics_line(const std::string& clip, int frame, const CameraIntrinsics& c) {
  std::ostringstream os;
  os << "{\"clip\":\"" << clip << "\",\"frame\":" << frame << ",\"fx\":" << format_number(c.fx, 12)
     << ",\"fy\":" << format_number(c.fy, 12) << ",\"px\":" << format_number(c.px, 12)
     << ",\"py\":" << format_number(c.py, 12) << ",\"d\":" << format_number(c.d, 12) << "}";
  return os.str();
}

}  // namespace imutube::calib3d
