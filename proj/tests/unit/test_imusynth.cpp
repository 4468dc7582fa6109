#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "imutube/imusynth/imu_io.hpp"
#include "imutube/imusynth/noise.hpp"

using namespace imutube;
using namespace imutube::imusynth;

namespace {

constexpr double kPi = std::numbers::pi;

MotionTrack3D track_of(const std::vector<std::vector<Vec3>>& frames, double fps = 30.0) {
  MotionTrack3D t;
  t.fps = fps;
  t.joints_world = frames;
  return t;
}

std::vector<Vec3> transformed_rest(const RigidTransform& t) {
  auto p = coco_skeleton().rest_positions();
  for (auto& x : p) x = t.apply(x);
  return p;
}

/// Positions implied by joint orientations and rest offsets.
std::vector<Vec3> reconstruct(const std::vector<Mat3>& rot, const Vec3& root_pos) {
  const Skeleton& sk = coco_skeleton();
  std::vector<Vec3> p(sk.size(), Vec3::Zero());
  p[sk.root] = root_pos;
  for (int j : sk.topological_order())
    if (sk.parents[j] >= 0) p[j] = p[sk.parents[j]] + rot[j] * sk.offsets[j];
  return p;
}

IMUStream stream_of(std::size_t n, double rate) {
  IMUStream s;
  s.rate = rate;
  s.accel.assign(n, Vec3(0, 0, kGravity));
  s.gyro.assign(n, Vec3::Zero());
  s.mag.assign(n, Vec3::UnitX());
  return s;
}

}  // namespace

TEST(Skeleton, CocoTreeAndPlacements) {
  const Skeleton& sk = coco_skeleton();
  EXPECT_EQ(sk.size(), 18);
  EXPECT_EQ(sk.topological_order().size(), 18u);
  EXPECT_EQ(sk.names[sk.root], "pelvis");
  EXPECT_EQ(make_placement("forearm").joint_index, 10);
  EXPECT_EQ(make_placement("left_forearm").joint_index, 9);
  EXPECT_EQ(make_placement("left_thigh").joint_index, 13);
  EXPECT_EQ(make_placement("waist_chest").joint_index, 17);
  EXPECT_EQ(make_placement("head").joint_index, 0);
  EXPECT_THROW(make_placement("tail"), DataError);
}

TEST(ForwardKinematics, RestPoseIsIdentityChain) {
  const auto rot = forward_kinematics(track_of({coco_skeleton().rest_positions()}), coco_skeleton());
  for (const auto& r : rot[0]) EXPECT_LT((r - Mat3::Identity()).norm(), 1e-12);
}

TEST(ForwardKinematics, RigidRotationIsEquivariant) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t{exp_so3(Vec3(u(rng), u(rng), u(rng)) * 2.0), Vec3(u(rng), u(rng), u(rng)) * 5.0};
    const auto rot = forward_kinematics(track_of({transformed_rest(t)}), coco_skeleton());
    for (const auto& r : rot[0]) {
      EXPECT_LT((r - t.R).norm(), 1e-9);
      EXPECT_TRUE(is_rotation(r, 1e-9));
    }
  }
}

TEST(ForwardKinematics, ElbowFlexedNinetyDegrees) {
  auto p = coco_skeleton().rest_positions();
  // Right forearm swings forward: rotation of +90 degrees about the lateral (X) axis.
  const Mat3 flex = rot_x(kPi / 2);
  p[10] = p[8] + flex * coco_skeleton().offsets[10];
  EXPECT_LT((p[10] - (p[8] + Vec3(0, 0.25, 0))).norm(), 1e-12);
  const auto rot = forward_kinematics(track_of({p}), coco_skeleton());
  EXPECT_LT((rot[0][10] - flex * rot[0][8]).norm(), 1e-12);
  EXPECT_LT((rot[0][8] - Mat3::Identity()).norm(), 1e-12);
  const auto back = reconstruct(rot[0], p[17]);
  for (int j = 0; j < 18; ++j) EXPECT_LT((back[j] - p[j]).norm(), 1e-12);
}

TEST(ForwardKinematics, ReconstructsRandomBoneRotations) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const Skeleton& sk = coco_skeleton();
  for (int trial = 0; trial < 50; ++trial) {
    // Build a pose by rotating every bone; the root frame stays consistent
    // because hips and shoulders hang off the root with one shared rotation.
    const Mat3 root = exp_so3(Vec3(u(rng), u(rng), u(rng)));
    std::vector<Mat3> rot(sk.size(), root);
    for (int j : sk.topological_order()) {
      const int par = sk.parents[j];
      if (par < 0 || par == sk.root) continue;
      rot[j] = exp_so3(Vec3(u(rng), u(rng), u(rng))) * rot[par];
    }
    const auto p = reconstruct(rot, Vec3(u(rng), u(rng), u(rng)));
    const auto fk = forward_kinematics(track_of({p}), sk);
    const auto back = reconstruct(fk[0], p[sk.root]);
    for (int j = 0; j < sk.size(); ++j) EXPECT_LT((back[j] - p[j]).norm(), 1e-9);
  }
}

TEST(ForwardKinematics, ZeroLengthBoneReusesPreviousRotation) {
  auto a = coco_skeleton().rest_positions();
  a[10] = a[8] + rot_x(kPi / 3) * coco_skeleton().offsets[10];
  auto b = a;
  b[10] = b[8];
  const auto rot = forward_kinematics(track_of({a, b}), coco_skeleton());
  EXPECT_LT((rot[1][10] - rot[0][10]).norm(), 1e-12);
  EXPECT_THROW(forward_kinematics(track_of({std::vector<Vec3>(17)}), coco_skeleton()), DataError);
}

TEST(WorldKinematics, MountingRotation) {
  auto t = with_orientations(track_of({coco_skeleton().rest_positions(), coco_skeleton().rest_positions()}),
                             coco_skeleton());
  const auto id = world_kinematics(t, make_placement("wrist"));
  EXPECT_LT((id.orientations[0] - t.joint_orientations[0][10]).norm(), 1e-15);
  EXPECT_EQ(id.positions[1], t.joints_world[1][10]);
  const auto m = world_kinematics(t, make_placement("wrist", rot_x(kPi / 2)));
  // Sensor Y axis now points along joint Z.
  EXPECT_LT((m.orientations[0].col(1) - Vec3::UnitZ()).norm(), 1e-12);
  const auto m2 = world_kinematics(t, make_placement("wrist", rot_x(kPi / 2) * rot_x(kPi / 2)));
  EXPECT_LT((m2.orientations[0] - m.orientations[0] * rot_x(kPi / 2)).norm(), 1e-12);
}

TEST(Accel, StaticAndFlipped) {
  const std::vector<Vec3> pos(10, Vec3(1, 2, 3));
  const auto a = accel_signal(pos, std::vector<Mat3>(10, Mat3::Identity()), 30.0);
  for (const auto& v : a) EXPECT_LT((v - Vec3(0, 0, 9.81)).norm(), 1e-9);
  const auto f = accel_signal(pos, std::vector<Mat3>(10, rot_x(kPi)), 30.0);
  for (const auto& v : f) EXPECT_LT((v - Vec3(0, 0, -9.81)).norm(), 1e-9);
  EXPECT_THROW(accel_signal({pos[0], pos[1]}, {Mat3::Identity(), Mat3::Identity()}, 30.0), DataError);
}

TEST(Accel, StencilWeightsMatchClassicFormulas) {
  const auto w3 = fd_weights(1.0, {0, 1, 2}, 2);
  EXPECT_NEAR(w3[0], 1.0, 1e-12);
  EXPECT_NEAR(w3[1], -2.0, 1e-12);
  const auto w5 = fd_weights(2.0, {0, 1, 2, 3, 4}, 2);
  const double ref5[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w5[i], ref5[i], 1e-12);
  const auto w7 = fd_weights(3.0, {0, 1, 2, 3, 4, 5, 6}, 2);
  const double ref7[] = {2, -27, 270, -490, 270, -27, 2};
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(w7[i], ref7[i] / 180.0, 1e-12);
  // Any stencil differentiates quadratics exactly, including one-sided ones.
  std::vector<Vec3> quad;
  for (int t = 0; t < 12; ++t) quad.emplace_back(0.5 * 3.0 * (t / 30.0) * (t / 30.0), 0, 0);
  for (const auto& v : accel_signal(quad, std::vector<Mat3>(12, Mat3::Identity()), 30.0, false))
    EXPECT_NEAR(v.x(), 3.0, 1e-8);
}

TEST(Accel, SinusoidMatchesAnalyticSecondDerivative) {
  const double fps = 30.0, amp = 0.2;
  for (double frac : {0.05, 0.1, 0.2}) {
    const double w = frac * 2.0 * kPi * fps;
    std::vector<Vec3> pos;
    for (int t = 0; t < 90; ++t) pos.emplace_back(0, 0, amp * std::sin(w * t / fps));
    const auto a = accel_signal(pos, std::vector<Mat3>(pos.size(), Mat3::Identity()), fps, false);
    double worst = 0.0, edge = 0.0;
    for (int t = 0; t < 90; ++t) {
      const double err = std::abs(a[t].z() + amp * w * w * std::sin(w * t / fps));
      (t >= 3 && t < 87 ? worst : edge) = std::max(t >= 3 && t < 87 ? worst : edge, err);
    }
    EXPECT_LT(worst, 0.02 * amp * w * w) << "frequency fraction " << frac;
    // One-sided windows at the ends are only accurate well below Nyquist.
    if (frac <= 0.1) {
      EXPECT_LT(edge, 0.05 * amp * w * w) << "frequency fraction " << frac;
    }
  }
}

TEST(Gyro, ConstantAndUniformRotation) {
  for (const auto& v : gyro_signal(std::vector<Mat3>(5, rot_y(0.3)), 30.0)) EXPECT_EQ(v.norm(), 0.0);
  std::vector<Mat3> r;
  for (int t = 0; t < 60; ++t) r.push_back(rot_z(t / 30.0));
  for (const auto& v : gyro_signal(r, 30.0)) EXPECT_LT((v - Vec3(0, 0, 1)).norm(), 1e-6);
  EXPECT_THROW(gyro_signal({Mat3::Identity(), rot_x(kPi)}, 30.0), DataError);
  EXPECT_THROW(gyro_signal({Mat3::Identity()}, 30.0), DataError);
}

TEST(Gyro, IntegrationRecoversOrientation) {
  std::vector<Mat3> r;
  for (int t = 0; t <= 30; ++t) {
    const double s = t / 30.0;
    r.push_back(exp_so3(Vec3(0.8 * std::sin(2 * s), 0.5 * s * s, 1.2 * std::cos(s) - 1.2)));
  }
  const auto w = gyro_signal(r, 30.0);
  Mat3 acc = r[0];
  for (std::size_t t = 0; t + 1 < r.size(); ++t) {
    acc = acc * exp_so3(w[t] / 30.0);
    EXPECT_LT(rotation_distance(acc, r[t + 1]), 1e-3);
  }
}

TEST(Mag, Examples) {
  const Vec3 f(1, 0, 0);
  EXPECT_LT((mag_signal({Mat3::Identity()}, f)[0] - f).norm(), 1e-15);
  EXPECT_LT((mag_signal({rot_z(kPi / 2)}, f)[0] - Vec3(0, -1, 0)).norm(), 1e-12);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Mat3> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(exp_so3(Vec3(u(rng), u(rng), u(rng))));
  for (const auto& v : mag_signal(rs, Vec3(3, -1, 2))) EXPECT_NEAR(v.norm(), 1.0, 1e-9);
  EXPECT_THROW(mag_signal(rs, Vec3::Zero()), DataError);
}

TEST(Synthesize, StaticPersonAndWorldTranslationInvariance) {
  std::vector<std::vector<Vec3>> frames, shifted;
  for (int t = 0; t < 40; ++t) {
    auto p = coco_skeleton().rest_positions();
    p[10] = p[8] + rot_x(0.5 * std::sin(t / 5.0)) * coco_skeleton().offsets[10];
    frames.push_back(p);
    for (auto& x : p) x += Vec3(10, -4, 2);
    shifted.push_back(p);
  }
  const auto a = with_orientations(track_of(frames), coco_skeleton());
  const auto b = with_orientations(track_of(shifted), coco_skeleton());
  const auto sa = synthesize(a, make_placement("wrist"));
  const auto sb = synthesize(b, make_placement("wrist"));
  for (std::size_t t = 0; t < sa.size(); ++t) {
    EXPECT_LT((sa.accel[t] - sb.accel[t]).norm(), 1e-9);
    EXPECT_LT((sa.gyro[t] - sb.gyro[t]).norm(), 1e-9);
  }
  const auto still = with_orientations(track_of(std::vector<std::vector<Vec3>>(30, frames[0])), coco_skeleton());
  const auto ss = synthesize(still, make_placement("left_thigh"));
  for (std::size_t t = 0; t < ss.size(); ++t) {
    EXPECT_NEAR(ss.accel[t].norm(), 9.81, 1e-9);
    EXPECT_LT(ss.gyro[t].norm(), 1e-12);
  }
}

TEST(SensorNoise, ZeroParamsDeterminismAndMoments) {
  const IMUStream s = stream_of(10000, 30.0);
  const auto same = sensor_noise(s, 7, NoiseParams::none());
  EXPECT_EQ(same.accel, s.accel);
  EXPECT_EQ(same.gyro, s.gyro);
  EXPECT_EQ(sensor_noise(s, 3).accel, sensor_noise(s, 3).accel);
  EXPECT_NE(sensor_noise(s, 3).accel, sensor_noise(s, 4).accel);
  NoiseParams p = NoiseParams::none();
  p.accel_sigma = 0.05;
  const auto n = sensor_noise(s, 11, p);
  double m = 0, v = 0;
  for (const auto& a : n.accel) m += a.x();
  m /= n.size();
  for (const auto& a : n.accel) v += (a.x() - m) * (a.x() - m);
  EXPECT_NEAR(std::sqrt(v / (n.size() - 1)), 0.05, 0.005);
  // Quantization: 16 bits over +-8 g gives steps of 16 g / 65536.
  NoiseParams q = NoiseParams::none();
  q.accel_range = 8 * kGravity;
  q.bits = 16;
  IMUStream one = stream_of(1, 30.0);
  one.accel[0] = Vec3(1.0, -200.0, 0.3);
  const auto qo = sensor_noise(one, 1, q);
  const double step = 16 * kGravity / 65536.0;
  EXPECT_NEAR(qo.accel[0].x(), std::round(1.0 / step) * step, 1e-12);
  EXPECT_DOUBLE_EQ(qo.accel[0].y(), -8 * kGravity);
}

TEST(Resample, IdentityRampAndSinusoid) {
  IMUStream s = stream_of(16, 15.0);
  for (int i = 0; i < 16; ++i) s.accel[i] = Vec3(i / 15.0, 2.0 * i / 15.0 - 1.0, 0.0);
  EXPECT_EQ(resample(s, 15.0).accel, s.accel);
  const auto up = resample(s, 30.0);
  EXPECT_EQ(up.size(), 31u);
  EXPECT_NEAR(up.duration_s(), s.duration_s(), 1.0 / 30.0);
  for (std::size_t k = 0; k < up.size(); ++k) {
    const double t = k / 30.0;
    EXPECT_NEAR(up.accel[k].x(), t, 1e-9);
    EXPECT_NEAR(up.accel[k].y(), 2 * t - 1, 1e-9);
  }
  IMUStream hi = stream_of(600, 60.0);
  for (int i = 0; i < 600; ++i) hi.gyro[i] = Vec3(std::sin(2 * kPi * 2.0 * i / 60.0), 0, 0);
  const auto lo = resample(hi, 30.0);
  for (std::size_t k = 0; k < lo.size(); ++k) EXPECT_NEAR(lo.gyro[k].x(), std::sin(2 * kPi * 2.0 * k / 30.0), 0.02);
  EXPECT_THROW(resample(hi, 0.0), DataError);
}

TEST(ImuIo, RoundTrip) {
  IMUStream s = stream_of(5, 30.0);
  s.accel[2] = Vec3(0.123456789, -1e-7, 3.5);
  s.subject = "S1";
  s.label = "walk";
  s.placement = "left_wrist";
  s.origin = "real";
  const fs::path p = fs::temp_directory_path() / "imutube_test_imu" / "a.csv";
  write_imu(p, s);
  const auto text = read_file(p);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,ax,ay,az,gx,gy,gz,mx,my,mz");
  const auto back = read_imu(p);
  EXPECT_EQ(back.size(), 5u);
  EXPECT_EQ(back.subject, "S1");
  EXPECT_EQ(back.origin, "real");
  EXPECT_NEAR(back.accel[2].x(), 0.123456789, 1e-12);
  write_file_atomic(p, "t,ax\n0,1\n");
  EXPECT_THROW(read_imu(p), ParseError);
}
