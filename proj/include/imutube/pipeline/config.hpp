#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/calib3d/calibrate.hpp"
#include "imutube/core/io.hpp"
#include "imutube/egomotion/compose.hpp"
#include "imutube/harlab/loso.hpp"
#include "imutube/imusynth/noise.hpp"
#include "imutube/imusynth/skeleton.hpp"
#include "imutube/trackio/filter.hpp"
#include "imutube/trackio/kalman.hpp"
#include "imutube/trackio/keypoint_io.hpp"
#include "imutube/trackio/sort_tracker.hpp"

namespace imutube::pipeline {

inline constexpr int kConfigVersion = 1;

struct TrackingConfig {
  trackio::TrackerParams tracker{};
  trackio::FilterParams filter{};
  trackio::KalmanParams kalman{};
  double min_confidence = 0.1;
};

struct EgomotionConfig {
  bool enabled = true;
  egomotion::EgoParams params{};
  /// Downward tilt of the first camera; world Z is up.
  double camera_pitch_deg = 0.0;
};

struct ImusynthConfig {
  std::vector<std::string> placements{"right_wrist", "waist_chest"};
  double rate = 30.0;
  bool gravity = true;
  Vec3 field = imusynth::default_magnetic_field();
  int accel_stencil = 7;
  bool noise = true;
  imusynth::NoiseParams noise_params{};
};

struct DistmapConfig {
  std::string map_path;  ///< empty: no mapping applied during `run`
};

struct EvaluationConfig {
  double window_s = 1.0;
  double overlap = 0.5;
  int n_components = 15;
  harlab::GridSpec grid{};
  double map_budget_s = 600.0;
  double real_cap_s = 0.0;
  double virtual_ratio = 1.0;
  std::vector<std::string> protocols{"R2R", "V2R", "Mix2R"};
};

struct PipelineConfig {
  int version = kConfigVersion;
  std::uint64_t seed = 0;
  int workers = 1;
  TrackingConfig tracking{};
  calib3d::CalibrationOptions calibration{};
  EgomotionConfig egomotion{};
  ImusynthConfig imusynth{};
  DistmapConfig distmap{};
  EvaluationConfig evaluation{};
};

inline nlohmann::ordered_json section_json(const TrackingConfig& c) {
  return {{"iou_threshold", c.tracker.iou_threshold},
          {"max_missed", c.tracker.max_missed},
          {"min_duration_s", c.filter.min_duration_s},
          {"min_joint_fraction", c.filter.min_joint_fraction},
          {"min_confidence", c.min_confidence},
          {"kalman_sigma_accel", c.kalman.sigma_accel},
          {"kalman_sigma_meas", c.kalman.sigma_meas}};
}

inline nlohmann::ordered_json section_json(const calib3d::CalibrationOptions& c) {
  return {{"max_iterations", c.pnp.max_iterations},
          {"gradient_tolerance", c.pnp.gradient_tolerance},
          {"initial_damping", c.pnp.initial_damping},
          {"fail_rmse_px", c.fail_rmse_px}};
}

inline nlohmann::ordered_json section_json(const EgomotionConfig& c) {
  return {{"enabled", c.enabled},
          {"delta", c.params.icp.delta},
          {"max_iterations", c.params.icp.max_iterations},
          {"relative_tolerance", c.params.icp.relative_tolerance},
          {"gate_factor", c.params.icp.gate_factor},
          {"coarse_gates", c.params.icp.coarse_gates},
          {"stride", c.params.stride},
          {"normal_neighbors", c.params.normal_neighbors},
          {"mask_margin", c.params.mask_margin},
          {"max_surface_variation", c.params.max_surface_variation},
          {"camera_pitch_deg", c.camera_pitch_deg}};
}

inline nlohmann::ordered_json section_json(const ImusynthConfig& c) {
  return {{"placements", c.placements},
          {"rate", c.rate},
          {"gravity", c.gravity},
          {"field", {c.field.x(), c.field.y(), c.field.z()}},
          {"accel_stencil", c.accel_stencil},
          {"noise",
           {{"enabled", c.noise},
            {"accel_sigma", c.noise_params.accel_sigma},
            {"gyro_sigma", c.noise_params.gyro_sigma},
            {"bias_walk_sigma", c.noise_params.bias_walk_sigma},
            {"accel_range", c.noise_params.accel_range},
            {"gyro_range", c.noise_params.gyro_range},
            {"bits", c.noise_params.bits}}}};
}

inline nlohmann::ordered_json section_json(const DistmapConfig& c) { return {{"map_path", c.map_path}}; }

inline nlohmann::ordered_json section_json(const EvaluationConfig& c) {
  return {{"window_s", c.window_s},         {"overlap", c.overlap},
          {"n_components", c.n_components}, {"trees", c.grid.trees},
          {"min_leaf", c.grid.min_leaf},    {"map_budget_s", c.map_budget_s},
          {"real_cap_s", c.real_cap_s},     {"virtual_ratio", c.virtual_ratio},
          {"protocols", c.protocols}};
}

/// Complete configuration with every default spelled out.
inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  return {{"version", c.version},
          {"seed", c.seed},
          {"workers", c.workers},
          {"tracking", section_json(c.tracking)},
          {"calibration", section_json(c.calibration)},
          {"egomotion", section_json(c.egomotion)},
          {"imusynth", section_json(c.imusynth)},
          {"distmap", section_json(c.distmap)},
          {"evaluation", section_json(c.evaluation)}};
}

inline std::string fingerprint_of(const nlohmann::ordered_json& j) { return hex64(fnv1a64(j.dump())); }

/// Hash of the full configuration; identical configs give identical strings.
inline std::string config_fingerprint(const PipelineConfig& c) { return fingerprint_of(config_to_json(c)); }

/// Per-stage hashes recorded in provenance logs.
inline nlohmann::ordered_json stage_fingerprints(const PipelineConfig& c) {
  return {{"trackio", fingerprint_of(section_json(c.tracking))},
          {"calib3d", fingerprint_of(section_json(c.calibration))},
          {"egomotion", fingerprint_of(section_json(c.egomotion))},
          {"imusynth", fingerprint_of({{"imusynth", section_json(c.imusynth)}, {"seed", c.seed}})},
          {"distmap", fingerprint_of(section_json(c.distmap))},
          {"harlab", fingerprint_of({{"evaluation", section_json(c.evaluation)}, {"seed", c.seed}})}};
}

namespace detail {

/// Reads fields of one JSON object, rejecting unknown keys and out-of-range values.
class Strict {
 public:
  Strict(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail("", "expected an object");
  }

  ~Strict() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError("config: " + join(key) + ": " + msg);
  }

  std::string join(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const nlohmann::json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out, double lo, double hi, bool lo_open = false) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number()) fail(key, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo)) {
      fail(key, "value " + format_number(x) + " outside " + (lo_open ? "(" : "[") + format_number(lo) + ", " +
                    format_number(hi) + "]");
    }
    out = x;
  }

  void integer(const std::string& key, int& out, int lo, int hi) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    const auto x = v->get<long long>();
    if (x < lo || x > hi) fail(key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out = static_cast<int>(x);
  }

  void boolean(const std::string& key, bool& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) fail(key, "expected true or false");
    out = v->get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_string()) fail(key, "expected a string");
    out = v->get<std::string>();
  }

  void strings(const std::string& key, std::vector<std::string>& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of strings");
    out.clear();
    for (const auto& s : *v) {
      if (!s.is_string()) fail(key, "expected a non-empty array of strings");
      out.push_back(s.get<std::string>());
    }
  }

  void integers(const std::string& key, std::vector<int>& out, int lo, int hi) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of integers");
    out.clear();
    for (const auto& s : *v) {
      if (!s.is_number_integer() || s.get<long long>() < lo || s.get<long long>() > hi) {
        fail(key, "entries must be integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      }
      out.push_back(s.get<int>());
    }
  }

  void numbers(const std::string& key, std::vector<double>& out, double lo) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_array()) fail(key, "expected an array of numbers");
    out.clear();
    for (const auto& s : *v) {
      if (!s.is_number() || !(s.get<double>() > lo)) fail(key, "entries must be numbers above " + format_number(lo));
      out.push_back(s.get<double>());
    }
  }

  const nlohmann::json* section(const std::string& key) {
    const auto* v = get(key);
    if (v && !v->is_object()) fail(key, "expected an object");
    return v;
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Strict parse: `version` is required, absent keys keep their defaults,
/// unknown keys and out-of-range values raise ConfigError naming the key.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  detail::Strict root(j, "");
  const auto* ver = root.get("version");
  if (!ver) root.fail("version", "missing (expected " + std::to_string(kConfigVersion) + ")");
  if (!ver->is_number_integer() || ver->get<long long>() != kConfigVersion) {
    root.fail("version", "unsupported version " + ver->dump() + " (expected " + std::to_string(kConfigVersion) + ")");
  }
  if (const auto* s = root.get("seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      root.fail("seed", "expected a non-negative integer");
    }
    c.seed = s->get<std::uint64_t>();
  }
  root.integer("workers", c.workers, 1, 1024);

  if (const auto* s = root.section("tracking")) {
    detail::Strict t(*s, "tracking");
    t.number("iou_threshold", c.tracking.tracker.iou_threshold, 0.0, 1.0, true);
    t.integer("max_missed", c.tracking.tracker.max_missed, 0, 1000);
    t.number("min_duration_s", c.tracking.filter.min_duration_s, 0.0, 1e6);
    t.number("min_joint_fraction", c.tracking.filter.min_joint_fraction, 0.0, 1.0);
    t.number("min_confidence", c.tracking.min_confidence, 0.0, 1.0);
    t.number("kalman_sigma_accel", c.tracking.kalman.sigma_accel, 0.0, 1e9, true);
    t.number("kalman_sigma_meas", c.tracking.kalman.sigma_meas, 0.0, 1e9, true);
  }
  if (const auto* s = root.section("calibration")) {
    detail::Strict t(*s, "calibration");
    t.integer("max_iterations", c.calibration.pnp.max_iterations, 1, 100000);
    t.number("gradient_tolerance", c.calibration.pnp.gradient_tolerance, 0.0, 1.0, true);
    t.number("initial_damping", c.calibration.pnp.initial_damping, 0.0, 1e9, true);
    t.number("fail_rmse_px", c.calibration.fail_rmse_px, 0.0, 1e9, true);
  }
  if (const auto* s = root.section("egomotion")) {
    detail::Strict t(*s, "egomotion");
    auto& e = c.egomotion;
    t.boolean("enabled", e.enabled);
    t.number("delta", e.params.icp.delta, 0.0, 1.0);
    t.integer("max_iterations", e.params.icp.max_iterations, 1, 100000);
    t.number("relative_tolerance", e.params.icp.relative_tolerance, 0.0, 1.0, true);
    t.number("gate_factor", e.params.icp.gate_factor, 0.0, 1e6, true);
    t.numbers("coarse_gates", e.params.icp.coarse_gates, 0.0);
    t.integer("stride", e.params.stride, 1, 1024);
    t.integer("normal_neighbors", e.params.normal_neighbors, 3, 1000);
    t.number("mask_margin", e.params.mask_margin, 0.0, 1e6);
    t.number("max_surface_variation", e.params.max_surface_variation, 0.0, 1.0);
    t.number("camera_pitch_deg", e.camera_pitch_deg, -90.0, 90.0);
  }
  if (const auto* s = root.section("imusynth")) {
    detail::Strict t(*s, "imusynth");
    auto& m = c.imusynth;
    t.strings("placements", m.placements);
    for (const auto& p : m.placements) {
      try {
        imusynth::make_placement(p);
      } catch (const DataError& e) {
        t.fail("placements", e.what());
      }
    }
    t.number("rate", m.rate, 0.0, 1e5, true);
    t.boolean("gravity", m.gravity);
    if (const auto* f = t.get("field")) {
      if (!f->is_array() || f->size() != 3 || !(*f)[0].is_number() || !(*f)[1].is_number() || !(*f)[2].is_number()) {
        t.fail("field", "expected [x, y, z]");
      }
      m.field = Vec3((*f)[0].get<double>(), (*f)[1].get<double>(), (*f)[2].get<double>());
      if (!(m.field.norm() > 0.0) || !m.field.allFinite()) t.fail("field", "must be a finite non-zero vector");
    }
    t.integer("accel_stencil", m.accel_stencil, 3, 15);
    if (m.accel_stencil % 2 == 0) t.fail("accel_stencil", "must be odd");
    if (const auto* n = t.section("noise")) {
      detail::Strict u(*n, "imusynth.noise");
      u.boolean("enabled", m.noise);
      u.number("accel_sigma", m.noise_params.accel_sigma, 0.0, 1e3);
      u.number("gyro_sigma", m.noise_params.gyro_sigma, 0.0, 1e3);
      u.number("bias_walk_sigma", m.noise_params.bias_walk_sigma, 0.0, 1e3);
      u.number("accel_range", m.noise_params.accel_range, 0.0, 1e6);
      u.number("gyro_range", m.noise_params.gyro_range, 0.0, 1e6);
      u.integer("bits", m.noise_params.bits, 0, 32);
    }
  }
  if (const auto* s = root.section("distmap")) {
    detail::Strict t(*s, "distmap");
    t.string("map_path", c.distmap.map_path);
  }
  if (const auto* s = root.section("evaluation")) {
    detail::Strict t(*s, "evaluation");
    auto& e = c.evaluation;
    t.number("window_s", e.window_s, 0.0, 1e4, true);
    t.number("overlap", e.overlap, 0.0, 0.99);
    t.integer("n_components", e.n_components, 1, 1000);
    t.integers("trees", e.grid.trees, 1, 10000);
    t.integers("min_leaf", e.grid.min_leaf, 1, 1000000);
    t.number("map_budget_s", e.map_budget_s, 0.0, 1e9);
    t.number("real_cap_s", e.real_cap_s, 0.0, 1e9);
    t.number("virtual_ratio", e.virtual_ratio, 0.0, 1e6);
    t.strings("protocols", e.protocols);
    for (const auto& p : e.protocols) {
      try {
        harlab::protocol_from_string(p);
      } catch (const DataError& err) {
        t.fail("protocols", err.what());
      }
    }
  }
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + ": invalid JSON: " + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline imusynth::SynthOptions synth_options(const ImusynthConfig& c) {
  imusynth::SynthOptions o;
  o.gravity_on = c.gravity;
  o.field = c.field;
  o.accel_stencil = c.accel_stencil;
  return o;
}

inline harlab::LosoOptions loso_options(const PipelineConfig& c, harlab::Protocol protocol) {
  harlab::LosoOptions o;
  o.protocol = protocol;
  o.grid = c.evaluation.grid;
  o.map_budget_s = c.evaluation.map_budget_s;
  o.real_cap_s = c.evaluation.real_cap_s;
  o.virtual_ratio = c.evaluation.virtual_ratio;
  o.n_components = c.evaluation.n_components;
  o.window_s = c.evaluation.window_s;
  o.overlap = c.evaluation.overlap;
  o.seed = c.seed;
  o.workers = c.workers;
  o.fingerprint = config_fingerprint(c);
  return o;
}

}  // namespace imutube::pipeline
