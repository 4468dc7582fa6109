#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/core/error.hpp"
#include "imutube/core/io.hpp"
#include "imutube/trackio/types.hpp"

namespace imutube::trackio {

struct KeypointFormat {
  int num_joints = kCocoJoints;
  /// Joints below this confidence are loaded as absent.
  double min_confidence = 0.1;
};

/// Parses one JSONL line. Throws ParseError naming `source:line`.
inline KeypointFrame parse_keypoint_line(const std::string& line, const KeypointFormat& fmt,
                                         const std::string& source, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
  }
  auto fail = [&](const std::string& msg) { throw ParseError(source, line_no, msg); };
  if (!j.is_object()) fail("expected an object");
  if (!j.contains("clip") || !j["clip"].is_string()) fail("missing string field 'clip'");
  if (!j.contains("frame") || !j["frame"].is_number_integer()) fail("missing integer field 'frame'");
  if (!j.contains("people") || !j["people"].is_array()) fail("missing array field 'people'");

  KeypointFrame frame;
  frame.clip_id = j["clip"].get<std::string>();
  frame.frame_index = j["frame"].get<int>();
  if (frame.frame_index < 0) fail("negative frame index");

  for (const auto& person : j["people"]) {
    if (!person.is_object() || !person.contains("joints") || !person["joints"].is_array()) {
      fail("person entry lacks 'joints' array");
    }
    const auto& joints = person["joints"];
    if (static_cast<int>(joints.size()) != fmt.num_joints) {
      fail("expected " + std::to_string(fmt.num_joints) + " joints, got " + std::to_string(joints.size()));
    }
    Detection det;
    det.reserve(joints.size());
    for (const auto& jt : joints) {
      if (!jt.is_array() || jt.size() != 3) fail("joint must be [x, y, conf]");
      for (const auto& v : jt) {
        if (!v.is_number()) fail("joint component is not a number");
      }
      Keypoint2D k;
      k.x = jt[0].get<double>();
      k.y = jt[1].get<double>();
      k.confidence = jt[2].get<double>();
      if (!std::isfinite(k.x) || !std::isfinite(k.y) || !std::isfinite(k.confidence)) {
        fail("non-finite joint component");
      }
      if (k.confidence < 0.0 || k.confidence > 1.0) fail("confidence outside [0,1]");
      k.present = k.confidence >= fmt.min_confidence && k.confidence > 0.0;
      det.push_back(k);
    }
    frame.detections.push_back(std::move(det));
  }
  return frame;
}

/// Loads a keypoint JSONL stream. Frames are grouped per clip (in order of
/// first appearance) and sorted by frame index.
inline std::vector<KeypointFrame> load_keypoint_stream(const fs::path& path, const KeypointFormat& fmt = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open keypoint stream: " + path.string());
  std::vector<std::string> clip_order;
  std::map<std::string, std::map<int, KeypointFrame>> by_clip;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    KeypointFrame f = parse_keypoint_line(line, fmt, path.string(), line_no);
    auto [it, fresh] = by_clip.try_emplace(f.clip_id);
    if (fresh) clip_order.push_back(f.clip_id);
    if (it->second.contains(f.frame_index)) {
      throw ParseError(path.string(), line_no, "duplicate frame " + std::to_string(f.frame_index));
    }
    it->second.emplace(f.frame_index, std::move(f));
  }
  std::vector<KeypointFrame> out;
  for (const auto& clip : clip_order) {
    for (auto& [idx, f] : by_clip[clip]) out.push_back(std::move(f));
  }
  return out;
}

inline std::string keypoint_line(const KeypointFrame& f) {
  std::ostringstream os;
  os << "{\"clip\":\"" << f.clip_id << "\",\"frame\":" << f.frame_index << ",\"people\":[";
  for (std::size_t p = 0; p < f.detections.size(); ++p) {
    if (p) os << ',';
    os << "{\"joints\":[";
    const auto& det = f.detections[p];
    for (std::size_t i = 0; i < det.size(); ++i) {
      if (i) os << ',';
      if (det[i].present) {
        os << '[' << format_number(det[i].x, 10) << ',' << format_number(det[i].y, 10) << ','
           << format_number(det[i].confidence, 6) << ']';
      } else {
        os << "[0,0,0]";
      }
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

inline void write_keypoint_stream(const fs::path& path, const std::vector<KeypointFrame>& frames) {
  std::string text;
  for (const auto& f : frames) {
    text += keypoint_line(f);
    text += '\n';
  }
  write_file_atomic(path, text);
}

}  // namespace imutube::trackio
