#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "imutube/core/error.hpp"

namespace imutube {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

/// Rodrigues' formula. Exact for any rotation vector.
inline Mat3 exp_so3(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-8) {
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  return Mat3::Identity() + (std::sin(theta) / theta) * k +
         ((1.0 - std::cos(theta)) / (theta * theta)) * k * k;
}

/// Principal logarithm. Returns a rotation vector with angle in [0, pi].
inline Vec3 log_so3(const Mat3& r) {
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double s = 0.5 * v.norm();
  const double theta = std::atan2(s, 0.5 * (r.trace() - 1.0));
  if (theta < 1e-6) {
    return 0.5 * v;
  }
  if (std::numbers::pi - theta < 1e-6) {
    // Axis from the symmetric part; sign is arbitrary at exactly pi.
    const Mat3 b = 0.5 * (r + Mat3::Identity());
    int i = 0;
    b.diagonal().maxCoeff(&i);
    Vec3 axis = b.col(i) / std::sqrt(std::max(b(i, i), 1e-300));
    axis.normalize();
    if (axis.dot(v) < 0.0) axis = -axis;
    return theta * axis;
  }
  return theta / (2.0 * s) * v;
}

inline double rotation_angle(const Mat3& r) {
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * v.norm(), 0.5 * (r.trace() - 1.0));
}

/// Geodesic distance between two rotations, in radians.
inline double rotation_distance(const Mat3& a, const Mat3& b) {
  return rotation_angle(a.transpose() * b);
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

/// Nearest rotation in the Frobenius sense.
inline Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

/// Smallest rotation taking unit vector `from` onto unit vector `to`.
inline Mat3 minimal_rotation(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const Vec3 axis = a.cross(b);
  const double s = axis.norm();
  const double c = a.dot(b);
  if (s < 1e-12) {
    if (c > 0.0) return Mat3::Identity();
    // Antiparallel: half turn about any axis orthogonal to `a`.
    Vec3 ortho = a.unitOrthogonal();
    return exp_so3(std::numbers::pi * ortho);
  }
  return exp_so3(std::atan2(s, c) * axis / s);
}

inline Mat3 rot_x(double a) { return exp_so3(Vec3(a, 0, 0)); }
inline Mat3 rot_y(double a) { return exp_so3(Vec3(0, a, 0)); }
inline Mat3 rot_z(double a) { return exp_so3(Vec3(0, 0, a)); }

/// Rigid transform acting as p -> R p + T.
struct RigidTransform {
  Mat3 R = Mat3::Identity();
  Vec3 T = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return R * p + T; }

  RigidTransform inverse() const { return {R.transpose(), -(R.transpose() * T)}; }

  /// (this ∘ other)(p) = this(other(p)).
  RigidTransform compose(const RigidTransform& other) const {
    return {R * other.R, R * other.T + T};
  }

  bool is_valid(double tol = 1e-9) const { return is_rotation(R, tol) && T.allFinite(); }
};

/// Geodesic interpolation of rotation, linear of translation; alpha in [0,1].
inline RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double alpha) {
  RigidTransform out;
  out.R = a.R * exp_so3(alpha * log_so3(a.R.transpose() * b.R));
  out.T = (1.0 - alpha) * a.T + alpha * b.T;
  return out;
}

/// SE(3) exponential for a twist (w, v) with left-multiplicative convention.
inline RigidTransform exp_se3(const Vec3& w, const Vec3& v) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  Mat3 jac = Mat3::Identity();
  if (theta > 1e-10) {
    jac += ((1.0 - std::cos(theta)) / (theta * theta)) * k +
           ((theta - std::sin(theta)) / (theta * theta * theta)) * k * k;
  } else {
    jac += 0.5 * k;
  }
  return {exp_so3(w), jac * v};
}

}  // namespace imutube
