#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/core/io.hpp"

namespace imutube::pipeline {

/// One video clip and the stage inputs extracted from it. Paths are stored
/// resolved; in the file they are relative to the manifest's directory.
struct ClipManifest {
  std::string clip_id;
  double fps = 30.0;
  int frames = 0;
  std::string label;
  std::string subject;
  fs::path keypoints;   ///< 2D keypoint JSONL
  fs::path poses;       ///< 3D pose JSONL
  fs::path intrinsics;  ///< per-frame intrinsics JSONL
  fs::path depth_dir;   ///< <clip>_<frame>.dmap files; empty for a static camera
  fs::path color_dir;   ///< <clip>_<frame>.ppm files
  fs::path source;      ///< the manifest file itself

  bool has_depth() const { return !depth_dir.empty(); }
};

inline constexpr const char* kManifestName = "manifest.json";

inline nlohmann::ordered_json manifest_to_json(const ClipManifest& m, const fs::path& base) {
  auto rel = [&](const fs::path& p) { return p.empty() ? std::string() : fs::relative(p, base).generic_string(); };
  return {{"clip_id", m.clip_id},         {"fps", m.fps},
          {"frames", m.frames},           {"label", m.label},
          {"subject", m.subject},         {"keypoints", rel(m.keypoints)},
          {"poses", rel(m.poses)},        {"intrinsics", rel(m.intrinsics)},
          {"depth_dir", rel(m.depth_dir)}, {"color_dir", rel(m.color_dir)}};
}

/// Loads and validates a manifest; every referenced file or directory must exist.
inline ClipManifest load_manifest(const fs::path& path) {
  const std::string src = path.string();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(src, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(src, 0, "expected an object");
  const fs::path base = path.parent_path();
  auto str = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key)) {
      if (required) throw ParseError(src, 0, std::string("missing field '") + key + "'");
      return {};
    }
    if (!j[key].is_string()) throw ParseError(src, 0, std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  auto file = [&](const char* key, bool required, bool dir) -> fs::path {
    const std::string rel = str(key, required);
    if (rel.empty()) {
      if (required) throw ParseError(src, 0, std::string("field '") + key + "' is empty");
      return {};
    }
    const fs::path p = base / rel;
    if (dir ? !fs::is_directory(p) : !fs::is_regular_file(p)) {
      throw ParseError(src, 0, std::string("field '") + key + "': " + p.string() + " does not exist");
    }
    return p;
  };
  ClipManifest m;
  m.source = path;
  m.clip_id = str("clip_id", true);
  if (m.clip_id.empty()) throw ParseError(src, 0, "field 'clip_id' is empty");
  if (!j.contains("fps") || !j["fps"].is_number() || !(j["fps"].get<double>() > 0.0)) {
    throw ParseError(src, 0, "field 'fps' must be a positive number");
  }
  m.fps = j["fps"].get<double>();
  if (!j.contains("frames") || !j["frames"].is_number_integer() || j["frames"].get<long long>() < 0) {
    throw ParseError(src, 0, "field 'frames' must be a non-negative integer");
  }
  m.frames = j["frames"].get<int>();
  m.label = str("label", true);
  m.subject = str("subject", true);
  m.keypoints = file("keypoints", true, false);
  m.poses = file("poses", true, false);
  m.intrinsics = file("intrinsics", true, false);
  m.depth_dir = file("depth_dir", false, true);
  m.color_dir = file("color_dir", false, true);
  if (m.depth_dir.empty() != m.color_dir.empty()) {
    throw ParseError(src, 0, "fields 'depth_dir' and 'color_dir' must be given together");
  }
  for (const auto& [k, v] : j.items()) {
    static const char* known[] = {"clip_id", "fps",        "frames",    "label",    "subject",
                                  "keypoints", "poses",    "intrinsics", "depth_dir", "color_dir"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* n) { return k == n; })) {
      throw ParseError(src, 0, "unknown field '" + k + "'");
    }
  }
  return m;
}

inline void write_manifest(const fs::path& path, const ClipManifest& m) {
  write_file_atomic(path, manifest_to_json(m, path.parent_path()).dump(2) + "\n");
}

/// All manifest files below `root`, sorted by path.
inline std::vector<fs::path> find_manifests(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("manifest directory " + root.string() + " does not exist");
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() == kManifestName) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace imutube::pipeline
