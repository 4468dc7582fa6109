#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "imutube/core/geometry.hpp"
#include "imutube/core/io.hpp"
#include "imutube/imusynth/skeleton.hpp"

namespace imutube::pipeline {

enum class Scenario { still, walk, run, jump, arm_wave };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::still: return "still";
    case Scenario::walk: return "walk";
    case Scenario::run: return "run";
    case Scenario::jump: return "jump";
    case Scenario::arm_wave: return "arm_wave";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  for (auto v : {Scenario::still, Scenario::walk, Scenario::run, Scenario::jump, Scenario::arm_wave})
    if (to_string(v) == s) return v;
  throw DataError("unknown scenario '" + s + "' (expected still, walk, run, jump or arm_wave)");
}

/// Per-subject variation of body size, tempo and placement.
struct SubjectParams {
  double scale = 1.0;
  double tempo = 1.0;
  double phase = 0.0;
  Vec3 centre = Vec3::Zero();  ///< ground point the motion is centred on
  double heading = std::numbers::pi;  ///< still/jump/wave facing; pi faces -Y

  static SubjectParams draw(std::uint64_t seed, int subject) {
    std::mt19937_64 rng(fnv1a64("subject" + std::to_string(subject), seed));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SubjectParams p;
    p.scale = 1.0 + 0.08 * u(rng);
    p.tempo = 1.0 + 0.1 * u(rng);
    p.phase = std::numbers::pi * (1.0 + u(rng));
    p.centre = Vec3(0.3 * u(rng), 0.3 * u(rng), 0.0);
    p.heading = std::numbers::pi + 0.3 * u(rng);
    return p;
  }
};

namespace detail {

/// Local joint rotations (parent-relative) plus root pose at one instant.
struct BodyAngles {
  Vec3 root = Vec3::Zero();
  double heading = 0.0;
  std::array<Mat3, 18> local;
  BodyAngles() { local.fill(Mat3::Identity()); }
};

inline void legs(BodyAngles& b, double thigh_l, double thigh_r, double knee_l, double knee_r) {
  b.local[13] = rot_x(thigh_l);
  b.local[14] = rot_x(thigh_r);
  b.local[15] = rot_x(-knee_l);
  b.local[16] = rot_x(-knee_r);
}

/// Upper-arm flexion (forward) and abduction (outward), elbow flexion.
inline void arms(BodyAngles& b, double flex_l, double flex_r, double abd_l, double abd_r, double elbow_l, double elbow_r) {
  b.local[7] = rot_y(abd_l) * rot_x(flex_l);
  b.local[8] = rot_y(-abd_r) * rot_x(flex_r);
  b.local[9] = rot_x(elbow_l);
  b.local[10] = rot_x(elbow_r);
}

inline BodyAngles angles(Scenario s, double t, const SubjectParams& p) {
  using std::numbers::pi;
  BodyAngles b;
  const double leg = 0.87 * p.scale;
  const double stand = leg + 0.08;
  b.root = p.centre + Vec3(0, 0, stand);
  b.heading = p.heading;
  arms(b, 0.0, 0.0, 0.08, 0.08, 0.15, 0.15);
  switch (s) {
    case Scenario::still:
      break;
    case Scenario::walk:
    case Scenario::run: {
      const bool run = s == Scenario::run;
      const double radius = run ? 1.5 : 1.2;
      const double speed = (run ? 2.4 : 1.0) * p.tempo;
      const double f = (run ? 1.4 : 0.9) * p.tempo;
      const double ang = speed / radius * t + p.phase;
      const double ph = 2 * pi * f * t + p.phase;
      const double thigh = run ? 0.6 : 0.35, knee = run ? 1.1 : 0.45, swing = run ? 0.6 : 0.3;
      b.root = p.centre + Vec3(radius * std::cos(ang), radius * std::sin(ang), stand - (run ? 0.06 : 0.02) +
                                                                                   (run ? 0.05 : 0.02) * std::cos(2 * ph));
      b.heading = ang;
      legs(b, thigh * std::sin(ph), -thigh * std::sin(ph), knee * std::pow(std::sin(0.5 * ph + 0.6), 2),
           knee * std::pow(std::sin(0.5 * ph + 0.6 + 0.5 * pi), 2));
      const double elbow = run ? 1.3 : 0.3;
      arms(b, -swing * std::sin(ph), swing * std::sin(ph), 0.1, 0.1, elbow + 0.1 * std::sin(ph),
           elbow - 0.1 * std::sin(ph));
      break;
    }
    case Scenario::jump: {
      const double f = 1.0 * p.tempo;
      const double lift = std::pow(std::sin(pi * f * t + p.phase), 2);
      b.root.z() += 0.25 * lift - 0.05;
      legs(b, 0.25 * (1 - lift), 0.25 * (1 - lift), 0.5 * (1 - lift), 0.5 * (1 - lift));
      arms(b, 0.3 + 1.2 * lift, 0.3 + 1.2 * lift, 0.1, 0.1, 0.2, 0.2);
      break;
    }
    case Scenario::arm_wave: {
      const double f = 1.5 * p.tempo;
      const double w = std::sin(2 * pi * f * t + p.phase);
      arms(b, 0.0, 0.2, 0.08, 2.3 + 0.15 * w, 0.15, 0.0);
      b.local[10] = rot_y(-0.6 * w) * rot_x(0.3);
      break;
    }
  }
  return b;
}

}  // namespace detail

/// World joint positions (COCO-17 plus pelvis, Z up) at time t.
inline std::vector<Vec3> body_pose(Scenario s, double t, const SubjectParams& p) {
  const auto& sk = imusynth::coco_skeleton();
  const auto b = detail::angles(s, t, p);
  std::vector<Vec3> pos(sk.size());
  std::vector<Mat3> g(sk.size());
  const int root = sk.root;
  g[static_cast<std::size_t>(root)] = rot_z(b.heading);
  pos[static_cast<std::size_t>(root)] = b.root;
  for (int j : sk.topological_order()) {
    if (j == root) continue;
    const auto ju = static_cast<std::size_t>(j);
    const auto pu = static_cast<std::size_t>(sk.parents[ju]);
    g[ju] = g[pu] * b.local[ju];
    pos[ju] = pos[pu] + g[ju] * (p.scale * sk.offsets[ju]);
  }
  return pos;
}

/// Central-difference world acceleration of every joint, step h seconds.
inline std::vector<Vec3> body_acceleration(Scenario s, double t, const SubjectParams& p, double h = 1e-3) {
  const auto a = body_pose(s, t - h, p), b = body_pose(s, t, p), c = body_pose(s, t + h, p);
  std::vector<Vec3> out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) out[j] = (a[j] - 2.0 * b[j] + c[j]) / (h * h);
  return out;
}

}  // namespace imutube::pipeline
