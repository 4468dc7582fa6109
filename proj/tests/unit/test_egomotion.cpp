#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "imutube/egomotion/compose.hpp"

using namespace imutube;
using namespace imutube::egomotion;

namespace {

Vec3 texture(const Vec3& p) {
  return {0.5 + 0.4 * std::sin(2.1 * p.x() + 0.7 * p.y()), 0.5 + 0.4 * std::sin(1.7 * p.y() - 1.3 * p.z()),
          0.5 + 0.4 * std::cos(1.1 * p.z() + 1.9 * p.x())};
}

/// Back wall, floor, side wall and a box, as seen from a camera at the origin
/// looking down +Z with +Y pointing at the floor.
ColoredPointCloud room(double h = 0.08) {
  ColoredPointCloud c;
  auto add = [&](const Vec3& p) {
    c.points.push_back(p);
    c.colors.push_back(texture(p));
  };
  for (double x = -3; x <= 3; x += h)
    for (double y = -2; y <= 1.5; y += h) add({x, y, 6.0});
  for (double x = -3; x <= 3; x += h)
    for (double z = 2; z < 6; z += h) add({x, 1.5, z});
  for (double y = -2; y <= 1.5; y += h)
    for (double z = 2; z < 6; z += h) add({-3.0, y, z});
  for (double x = 0.5; x <= 1.3; x += h)
    for (double y = 0.7; y < 1.5; y += h) add({x, y, 3.5});
  for (double z = 3.5; z <= 4.3; z += h)
    for (double y = 0.7; y < 1.5; y += h) add({0.5, y, z});
  return c;
}

ColoredPointCloud transformed(ColoredPointCloud c, const RigidTransform& t) {
  c.transform(t);
  c.normals.clear();
  return c;
}

DepthMap flat_depth(int w, int h, float z) { return {w, h, std::vector<float>(static_cast<std::size_t>(w) * h, z)}; }
RgbImage gray(int w, int h) { return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, 128)}; }

double trans_err(const RigidTransform& a, const RigidTransform& b) { return (a.T - b.T).norm(); }

}  // namespace

TEST(Backproject, OpticalCenterAndDirectEvaluation) {
  const CameraIntrinsics cam{100, 100, 50, 50, 0};
  DepthMap d = flat_depth(201, 101, 2.0f);
  const auto c = backproject(d, gray(201, 101), cam, 1);
  ASSERT_EQ(c.size(), 201u * 101u);
  EXPECT_LT((c.points[50 * 201 + 50] - Vec3(0, 0, 2)).norm(), 1e-12);
  EXPECT_LT((c.points[50 * 201 + 150] - Vec3(2, 0, 2)).norm(), 1e-12);
  EXPECT_NEAR(c.colors[0].x(), 128.0 / 255.0, 1e-12);
}

TEST(Backproject, InvalidDepthAndMismatch) {
  DepthMap d = flat_depth(8, 6, std::numeric_limits<float>::quiet_NaN());
  d.depth[3] = 0.0f;
  d.depth[4] = -1.0f;
  EXPECT_TRUE(backproject(d, gray(8, 6), {}, 1).empty());
  EXPECT_THROW(backproject(d, gray(8, 5), {}, 1), DataError);
  EXPECT_THROW(backproject(flat_depth(8, 6, 1.0f), gray(8, 6), {}, 0), DataError);
}

TEST(Backproject, StrideGridCount) {
  const auto c = backproject(flat_depth(10, 7, 1.0f), gray(10, 7), CameraIntrinsics{10, 10, 5, 3, 0}, 4);
  EXPECT_EQ(c.size(), 3u * 2u);  // x in {0,4,8}, y in {0,4}
}

TEST(Backproject, ProjectRecoversPixel) {
  const CameraIntrinsics cam{520, 515, 319.5, 241.25, 0};
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> z(0.3f, 20.0f);
  DepthMap d{64, 48, {}};
  for (int i = 0; i < 64 * 48; ++i) d.depth.push_back(z(rng));
  const auto c = backproject(d, gray(64, 48), cam, 1);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) {
      const Vec2 uv = calib3d::project(c.points[y * 64 + x], cam);
      EXPECT_NEAR(uv.x(), x, 1e-9);
      EXPECT_NEAR(uv.y(), y, 1e-9);
    }
}

TEST(MaskForeground, Examples) {
  const auto none = mask_foreground(20, 20, {}, 0);
  EXPECT_EQ(std::count(none.begin(), none.end(), 1), 400);
  const auto full = mask_foreground(20, 20, {{0, 0, 19, 19}}, 0);
  EXPECT_EQ(std::count(full.begin(), full.end(), 0), 400);
  EXPECT_TRUE(backproject(flat_depth(20, 20, 1.0f), gray(20, 20), {}, 1, full).empty());
  const auto ten = mask_foreground(40, 30, {{5, 7, 14, 16}}, 0);
  EXPECT_EQ(std::count(ten.begin(), ten.end(), 0), 100);
  EXPECT_FALSE(ten[7 * 40 + 5]);
  EXPECT_TRUE(ten[7 * 40 + 15]);
  const auto grown = mask_foreground(40, 30, {{5, 7, 14, 16}}, 2);
  EXPECT_EQ(std::count(grown.begin(), grown.end(), 0), 14 * 14);
}

TEST(DepthIo, RoundTripsAndRejectsCorruption) {
  DepthMap d{3, 2, {1.5f, std::numeric_limits<float>::quiet_NaN(), 2.0f, 0.25f, 7.0f, 1e-3f}};
  const DepthMap back = decode_dmap(encode_dmap(d));
  ASSERT_EQ(back.width, 3);
  ASSERT_EQ(back.height, 2);
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    if (std::isnan(d.depth[i])) {
      EXPECT_TRUE(std::isnan(back.depth[i]));
    } else {
      EXPECT_EQ(back.depth[i], d.depth[i]);
    }
  }
  const std::string bytes = encode_dmap(d);
  EXPECT_EQ(bytes.substr(0, 4), "DMAP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3u);
  EXPECT_THROW(decode_dmap(bytes.substr(0, bytes.size() - 1)), ParseError);
  EXPECT_THROW(decode_dmap("XMAP" + bytes.substr(4)), ParseError);

  RgbImage img{2, 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}};
  const RgbImage ib = decode_ppm(encode_ppm(img));
  EXPECT_EQ(ib.data, img.data);
  EXPECT_EQ(decode_ppm("P6\n# comment\n2 1\n255\n" + std::string(6, 'a')).width, 2);
  EXPECT_THROW(decode_ppm("P6\n2 2\n255\nabc"), ParseError);
  EXPECT_EQ(frame_stem("clip7", 42), "clip7_000042");
}

TEST(KdTree, MatchesBruteForce) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Vec3> pts(3000);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  const KdTree tree(pts);
  for (int q = 0; q < 200; ++q) {
    const Vec3 x(u(rng), u(rng), u(rng));
    std::vector<std::pair<double, int>> all;
    for (int i = 0; i < 3000; ++i) all.emplace_back((pts[i] - x).squaredNorm(), i);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(tree.nearest(x).index, all[0].second);
    const auto k = tree.knn(x, 7);
    ASSERT_EQ(k.size(), 7u);
    for (int i = 0; i < 7; ++i) EXPECT_DOUBLE_EQ(k[i].dist2, all[i].first);
  }
}

TEST(Normals, PlaneFacesCamera) {
  ColoredPointCloud c;
  for (double x = -1; x <= 1; x += 0.05)
    for (double y = -1; y <= 1; y += 0.05) {
      c.points.emplace_back(x, y, 5.0);
      c.colors.emplace_back(0.5, 0.5, 0.5);
    }
  const auto n = estimate_normals(c, 30);
  for (const auto& v : n.normals) {
    EXPECT_LT((v - Vec3(0, 0, -1)).norm(), 1e-3);
    EXPECT_NEAR(v.norm(), 1.0, 1e-6);
  }
}

TEST(Normals, SphereNormalsRadial) {
  ColoredPointCloud c;
  const Vec3 centre(0, 0, 5);
  const int m = 4000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double y = 1.0 - 2.0 * (i + 0.5) / m;
    const double r = std::sqrt(1 - y * y);
    c.points.push_back(centre + Vec3(r * std::cos(golden * i), y, r * std::sin(golden * i)));
    c.colors.emplace_back(0.5, 0.5, 0.5);
  }
  const auto n = estimate_normals(c, 30);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 radial = (c.points[i] - centre).normalized();
    EXPECT_GT(std::abs(n.normals[i].dot(radial)), std::cos(5.0 * std::numbers::pi / 180.0));
    EXPECT_GE(n.normals[i].dot(-c.points[i]), 0.0);
  }
}

TEST(Normals, SurfaceVariationSeparatesPlanesFromCorners) {
  // Floor z = 0 meeting wall x = 0, viewed from (1, 1, 1) relative to the corner.
  ColoredPointCloud c;
  for (double a = 0.0; a <= 1.0 + 1e-9; a += 0.05)
    for (double b = -1.0; b <= 1.0 + 1e-9; b += 0.05) {
      c.points.emplace_back(a, b, 0.0);
      c.points.emplace_back(0.0, b, a + 0.05);
    }
  for (auto& p : c.points) {
    p -= Vec3(1, 1, 1);
    c.colors.emplace_back(0.5, 0.5, 0.5);
  }
  std::vector<double> var;
  estimate_normals(c, 30, &var);
  ASSERT_EQ(var.size(), c.size());
  double far_max = 0.0, near_min = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 q = c.points[i] + Vec3(1, 1, 1);
    const double dist = std::max(q.x(), q.z());  // distance from the corner line
    if (std::abs(q.y()) > 0.6) continue;
    if (dist > 0.5) far_max = std::max(far_max, var[i]);
    if (dist < 0.06) near_min = std::min(near_min, var[i]);
    EXPECT_LE(var[i], 1.0 / 3.0 + 1e-12);
  }
  EXPECT_LT(far_max, 1e-12);
  EXPECT_GT(near_min, 0.01);
}

TEST(Normals, TooFewPoints) {
  ColoredPointCloud c;
  for (int i = 0; i < 30; ++i) {
    c.points.emplace_back(i, 0, 1);
    c.colors.emplace_back(0, 0, 0);
  }
  EXPECT_THROW(estimate_normals(c, 30), DataError);
}

TEST(ColoredIcp, SelfAlignmentIsIdentity) {
  const auto tgt = estimate_normals(room(), 30);
  const auto r = colored_icp(tgt, tgt);
  ASSERT_TRUE(r.success);
  EXPECT_LT(rotation_angle(r.transform.R), 1e-8);
  EXPECT_LT(r.transform.T.norm(), 1e-8);
  EXPECT_LT(r.residual, 1e-12);
}

TEST(ColoredIcp, RecoversRotationAboutYAndTranslation) {
  const auto tgt = estimate_normals(room(), 30);
  const RigidTransform motion{rot_y(5.0 * std::numbers::pi / 180.0), Vec3(0.05, 0, 0)};
  // Source is the target scene observed after the motion; ICP should return its inverse.
  const auto src = estimate_normals(transformed(tgt, motion.inverse()), 30);
  const auto r = colored_icp(src, tgt);
  ASSERT_TRUE(r.success);
  EXPECT_LT(rotation_distance(r.transform.R, motion.R), 1e-3);
  EXPECT_LT(trans_err(r.transform, motion), 1e-3);
  EXPECT_TRUE(r.transform.is_valid());
}

TEST(ColoredIcp, RandomSmallPerturbations) {
  const auto tgt = estimate_normals(room(0.1), 30);
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-1, 1);
  int failures = 0;
  for (int i = 0; i < 10; ++i) {
    Vec3 axis(u(rng), u(rng), u(rng));
    Vec3 dir(u(rng), u(rng), u(rng));
    const RigidTransform motion{exp_so3(axis.normalized() * std::abs(u(rng)) * 10.0 * std::numbers::pi / 180.0),
                                dir.normalized() * std::abs(u(rng)) * 0.1};
    auto src = transformed(tgt, motion.inverse());
    src = estimate_normals(src, 30);
    const auto r = colored_icp(src, tgt);
    if (!(r.success && rotation_distance(r.transform.R, motion.R) < 1e-3 && trans_err(r.transform, motion) < 1e-3))
      ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(ColoredIcp, ColorTermResolvesInPlaneTranslation) {
  // Two textureless planes, z = 4 and z = 5, with an intensity ramp along X.
  auto make = [](double shift) {
    ColoredPointCloud c;
    for (double x = -1.5; x <= 1.5; x += 0.04)
      for (double y = -1; y <= 1; y += 0.04)
        for (double z : {4.0, 5.0}) {
          c.points.emplace_back(x + shift, y, z);
          const double v = 0.5 + 0.3 * std::sin(1.3 * x);
          c.colors.emplace_back(v, v, v);
        }
    return estimate_normals(c, 20);
  };
  const auto tgt = make(0.0);
  const auto src = make(0.03);  // source content sits 3 cm further along +X
  IcpParams p;
  p.delta = 0.5;
  const auto r = colored_icp(src, tgt, p);
  ASSERT_TRUE(r.success);
  EXPECT_NEAR(r.transform.T.x(), -0.03, 1e-2);

  // Geometry only: the objective does not depend on in-plane translation.
  p.delta = 1.0;
  const IcpTarget model(tgt, p);
  const double gate = 3.0 * model.median_spacing;
  RigidTransform a, b;
  b.T = Vec3(-0.03, 0, 0);
  const double ea = icp_objective(src, model, find_correspondences(src, model, a, gate), a, 1.0);
  const double eb = icp_objective(src, model, find_correspondences(src, model, b, gate), b, 1.0);
  EXPECT_LT(ea, 1e-20);
  EXPECT_LT(eb, 1e-20);
}

TEST(ColoredIcp, FixedCorrespondenceObjectiveNonIncreasing) {
  const auto tgt = estimate_normals(room(0.1), 30);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform motion{exp_so3(Vec3(u(rng), u(rng), u(rng)) * 0.1), Vec3(u(rng), u(rng), u(rng)) * 0.1};
    const auto src = transformed(tgt, motion.inverse());
    IcpParams p;
    const IcpTarget model(tgt, p);
    RigidTransform t;
    const auto corr = find_correspondences(src, model, t, 1.0);
    const auto hist = refine_fixed(src, model, corr, t, p.delta, 8);
    for (std::size_t k = 1; k < hist.size(); ++k) EXPECT_LE(hist[k], hist[k - 1]);
    EXPECT_TRUE(t.is_valid(1e-9));
  }
}

TEST(ColoredIcp, TooFewCorrespondencesFlagged) {
  const auto tgt = estimate_normals(room(0.2), 10);
  ColoredPointCloud far = transformed(tgt, RigidTransform{Mat3::Identity(), Vec3(100, 0, 0)});
  far = estimate_normals(far, 10);
  EXPECT_FALSE(colored_icp(far, tgt).success);
  EXPECT_THROW(colored_icp(tgt, tgt, IcpParams{.delta = 1.5}), DataError);
}

TEST(ComposeTrack, IdentityChainIsIdentity) {
  std::vector<calib3d::CalibratedPose> cal(5);
  for (int t = 0; t < 5; ++t) {
    cal[t].frame_index = t;
    cal[t].joints = {Vec3(t, 1, 3), Vec3(0, -t, 4)};
  }
  const auto m = compose_track(cal, std::vector<RigidTransform>(5));
  for (int t = 0; t < 5; ++t)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(m.joints_world[t][j], cal[t].joints[j]);
  EXPECT_THROW(compose_track(cal, std::vector<RigidTransform>(4)), DataError);
}

TEST(ComposeTrack, PanningCameraStaticPersonIsConstant) {
  // Camera t has pose C_t (world from camera), yawing at 2 deg/frame and sliding.
  const std::vector<Vec3> body{{0, 0, 4}, {0.2, -0.5, 4.1}, {-0.2, 0.8, 3.9}};
  std::vector<RigidTransform> cam, ego;
  std::vector<calib3d::CalibratedPose> cal;
  for (int t = 0; t < 90; ++t) {
    cam.push_back({rot_y(t * 2.0 * std::numbers::pi / 180.0), Vec3(0.01 * t, 0, 0)});
    calib3d::CalibratedPose c;
    c.frame_index = t;
    for (const auto& p : body) c.joints.push_back(cam[t].inverse().apply(p));
    cal.push_back(c);
    ego.push_back(t == 0 ? RigidTransform{} : cam[t - 1].inverse().compose(cam[t]));
  }
  const auto m = compose_track(cal, ego);
  double uncompensated = 0.0;
  for (int t = 0; t < 90; ++t)
    for (std::size_t j = 0; j < body.size(); ++j) {
      EXPECT_LT((m.joints_world[t][j] - body[j]).norm(), 1e-9);
      uncompensated = std::max(uncompensated, (cal[t].joints[j] - body[j]).norm());
    }
  EXPECT_GT(uncompensated, 1.0);
}
