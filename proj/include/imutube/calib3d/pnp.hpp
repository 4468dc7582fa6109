#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "imutube/calib3d/camera.hpp"
#include "imutube/core/error.hpp"
#include "imutube/core/geometry.hpp"

namespace imutube::calib3d {

struct PnPOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double initial_damping = 1e-3;
  /// When false the projection scale is held at `fixed_scale`.
  bool estimate_scale = true;
  double fixed_scale = 1.0;
};

struct PnPResult {
  RigidTransform transform;
  double scale = 1.0;
  double rmse = 0.0;  ///< reprojection RMSE over correspondences, px
  bool converged = false;
  int iterations = 0;
  /// Objective value after every accepted step (first entry is the start).
  std::vector<double> cost_history;
};

namespace detail {

struct PnPProblem {
  std::span<const Vec2> p2;
  std::span<const Vec3> p3;
  const CameraIntrinsics& intr;
  bool with_scale;

  int params() const { return with_scale ? 7 : 6; }

  /// Residuals p2 - (1/s) project(R p3 + T); returns +inf when a point falls
  /// behind the camera or outside the distortion domain.
  double cost(const RigidTransform& t, double s, Eigen::VectorXd* res) const {
    const int n = static_cast<int>(p2.size());
    if (res) res->resize(2 * n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 pc = t.apply(p3[i]);
      if (!(pc.z() > 0.0)) return std::numeric_limits<double>::infinity();
      const double xu = pc.x() / pc.z(), yu = pc.y() / pc.z();
      const double disc = 1.0 - 4.0 * intr.d * (xu * xu + yu * yu);
      if (disc <= 0.0) return std::numeric_limits<double>::infinity();
      const Vec2 uv = project(pc, intr) / s;
      const Vec2 r = p2[i] - uv;
      if (res) res->segment<2>(2 * i) = r;
      sum += r.squaredNorm();
    }
    return 0.5 * sum;
  }

  Eigen::MatrixXd jacobian(const RigidTransform& t, double s) const {
    const int n = static_cast<int>(p2.size());
    Eigen::MatrixXd J(2 * n, params());
    for (int i = 0; i < n; ++i) {
      const Vec3 rp = t.R * p3[i];
      const Vec3 pc = rp + t.T;
      const double z = pc.z();
      const double xu = pc.x() / z, yu = pc.y() / z;
      const double r2 = xu * xu + yu * yu;
      const double k = distortion_factor(intr.d, r2);
      const double dk = distortion_factor_derivative(intr.d, r2);
      Eigen::Matrix2d dpi_dn;
      dpi_dn << intr.fx * (k + 2.0 * xu * xu * dk), intr.fx * 2.0 * xu * yu * dk,
          intr.fy * 2.0 * xu * yu * dk, intr.fy * (k + 2.0 * yu * yu * dk);
      Eigen::Matrix<double, 2, 3> dn_dp;
      dn_dp << 1.0 / z, 0.0, -pc.x() / (z * z), 0.0, 1.0 / z, -pc.y() / (z * z);
      const Eigen::Matrix<double, 2, 3> dpi_dp = dpi_dn * dn_dp;
      J.block<2, 3>(2 * i, 0) = -(1.0 / s) * dpi_dp * (-hat(rp));
      J.block<2, 3>(2 * i, 3) = -(1.0 / s) * dpi_dp;
      if (with_scale) {
        const Vec2 uv = project(pc, intr);
        J.block<2, 1>(2 * i, 6) = uv / (s * s);
      }
    }
    return J;
  }
};

/// Linear estimate from normalized coordinates; needs >= 6 non-coplanar points.
inline std::optional<RigidTransform> dlt_estimate(std::span<const Vec2> p2, std::span<const Vec3> p3,
                                                  const CameraIntrinsics& intr) {
  const int n = static_cast<int>(p2.size());
  if (n < 6) return std::nullopt;
  Vec3 c3 = Vec3::Zero();
  for (const auto& p : p3) c3 += p;
  c3 /= n;
  double spread = 0.0;
  for (const auto& p : p3) spread += (p - c3).norm();
  spread /= n;
  if (spread <= 0.0) return std::nullopt;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 12);
  for (int i = 0; i < n; ++i) {
    const Vec2 xn = normalize_pixel(p2[i].x(), p2[i].y(), intr);
    Eigen::Vector4d X;
    X << (p3[i] - c3) / spread, 1.0;
    A.block<1, 4>(2 * i, 0) = X.transpose();
    A.block<1, 4>(2 * i, 8) = -xn.x() * X.transpose();
    A.block<1, 4>(2 * i + 1, 4) = X.transpose();
    A.block<1, 4>(2 * i + 1, 8) = -xn.y() * X.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(10) < 1e-9 * sv(0)) return std::nullopt;  // coplanar or degenerate
  const Eigen::VectorXd v = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> P;
  P << v.segment<4>(0).transpose(), v.segment<4>(4).transpose(), v.segment<4>(8).transpose();
  Mat3 M = P.leftCols<3>();
  if (M.determinant() < 0.0) {
    P = -P;
    M = -M;
  }
  Eigen::JacobiSVD<Mat3> msvd(M);
  const double scale = msvd.singularValues().mean();
  if (scale <= 0.0) return std::nullopt;
  RigidTransform t;
  t.R = orthonormalize(M);
  // Undo the normalization of p3: points were (p - c3) / spread.
  const Vec3 tn = P.col(3) / scale;
  t.T = spread * tn - t.R * c3;
  return t;
}

/// Coarse start when DLT is unavailable: identity-ish rotations about the
/// vertical, depth from the ratio of 3D to image spread.
inline std::vector<RigidTransform> heuristic_starts(std::span<const Vec2> p2, std::span<const Vec3> p3,
                                                    const CameraIntrinsics& intr) {
  const int n = static_cast<int>(p2.size());
  Vec3 c3 = Vec3::Zero();
  Vec2 c2 = Vec2::Zero();
  std::vector<Vec2> xn(n);
  for (int i = 0; i < n; ++i) {
    xn[i] = normalize_pixel(p2[i].x(), p2[i].y(), intr);
    c2 += xn[i];
    c3 += p3[i];
  }
  c2 /= n;
  c3 /= n;
  double s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    s2 += (xn[i] - c2).squaredNorm();
    s3 += (p3[i] - c3).squaredNorm();
  }
  const double depth = s2 > 0.0 ? std::sqrt(s3 / s2) : 1.0;
  std::vector<RigidTransform> starts;
  for (int k = 0; k < 4; ++k) {
    for (const Mat3& base : {Mat3::Identity().eval(), rot_x(-std::numbers::pi / 2).eval()}) {
      RigidTransform t;
      t.R = rot_y(k * std::numbers::pi / 2) * base;
      t.T = Vec3(c2.x() * depth, c2.y() * depth, depth) - t.R * c3;
      starts.push_back(t);
    }
  }
  return starts;
}

inline PnPResult levenberg_marquardt(const PnPProblem& prob, RigidTransform t, double s, const PnPOptions& opt) {
  PnPResult res;
  const int np = prob.params();
  Eigen::VectorXd r;
  double f = prob.cost(t, s, &r);
  res.cost_history.push_back(f);
  if (!std::isfinite(f)) {
    res.transform = t;
    res.scale = s;
    res.rmse = std::numeric_limits<double>::infinity();
    return res;
  }
  Eigen::MatrixXd J = prob.jacobian(t, s);
  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;
  double mu = opt.initial_damping;
  double nu = 2.0;
  int it = 0;
  bool converged = g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance;
  while (!converged && it < opt.max_iterations) {
    ++it;
    Eigen::MatrixXd damped = A;
    for (int i = 0; i < np; ++i) damped(i, i) += mu * std::max(A(i, i), 1e-12);
    const Eigen::VectorXd h = damped.ldlt().solve(-g);
    const double xnorm = 1.0 + t.T.norm() + s;
    if (h.norm() <= 1e-14 * xnorm) {
      converged = true;
      break;
    }
    RigidTransform tn;
    tn.R = exp_so3(h.segment<3>(0)) * t.R;
    tn.T = t.T + h.segment<3>(3);
    const double sn = prob.with_scale ? s + h(6) : s;
    Eigen::VectorXd rn;
    const double fn = sn > 0.0 ? prob.cost(tn, sn, &rn) : std::numeric_limits<double>::infinity();
    Eigen::VectorXd scaled = h;
    for (int i = 0; i < np; ++i) scaled(i) *= mu * std::max(A(i, i), 1e-12);
    const double predicted = 0.5 * h.dot(scaled - g);
    const double rho = std::isfinite(fn) && predicted > 0.0 ? (f - fn) / predicted : -1.0;
    if (rho > 0.0 && fn <= f) {
      t = tn;
      s = sn;
      f = fn;
      r = rn;
      res.cost_history.push_back(f);
      J = prob.jacobian(t, s);
      A = J.transpose() * J;
      g = J.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance || f < 1e-26) converged = true;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (mu > 1e16) break;
    }
  }
  t.R = orthonormalize(t.R);
  res.transform = t;
  res.scale = s;
  res.iterations = it;
  res.converged = converged;
  res.rmse = std::sqrt(2.0 * f / static_cast<double>(prob.p2.size()));
  return res;
}

}  // namespace detail

/// Rigid pose (and optionally projection scale) minimizing squared reprojection
/// error, by Levenberg-Marquardt over a left-multiplied axis-angle rotation
/// update, so every iterate is an exact rotation. Without `init` the start is a
/// DLT estimate (>= 6 non-coplanar points) or a small set of heuristic starts.
inline PnPResult solve_pnp(std::span<const Vec2> p2, std::span<const Vec3> p3, const CameraIntrinsics& intr,
                           const std::optional<RigidTransform>& init = std::nullopt, const PnPOptions& opt = {}) {
  if (p2.size() != p3.size()) throw DataError("solve_pnp: correspondence count mismatch");
  if (p2.size() < 4) throw DataError("solve_pnp: fewer than 4 correspondences");
  if (!intr.valid()) throw DataError("solve_pnp: invalid intrinsics");
  {
    Vec3 c = Vec3::Zero();
    for (const auto& p : p3) c += p;
    c /= static_cast<double>(p3.size());
    Eigen::MatrixXd centered(3, p3.size());
    for (std::size_t i = 0; i < p3.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = p3[i] - c;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(1) < 1e-9 * sv(0)) throw DataError("solve_pnp: 3D points are collinear");
  }
  const detail::PnPProblem prob{p2, p3, intr, opt.estimate_scale};
  const double s0 = opt.estimate_scale ? 1.0 : opt.fixed_scale;

  std::vector<RigidTransform> starts;
  if (init) {
    starts.push_back(*init);
  } else if (auto dlt = detail::dlt_estimate(p2, p3, intr)) {
    starts.push_back(*dlt);
  } else {
    starts = detail::heuristic_starts(p2, p3, intr);
  }
  PnPResult best;
  best.rmse = std::numeric_limits<double>::infinity();
  auto run = [&](const std::vector<RigidTransform>& from) {
    for (const auto& start : from) {
      PnPResult r = detail::levenberg_marquardt(prob, start, s0, opt);
      if (r.rmse < best.rmse || !std::isfinite(best.rmse)) best = std::move(r);
    }
  };
  run(starts);
  if (!std::isfinite(best.rmse) && starts.size() == 1) run(detail::heuristic_starts(p2, p3, intr));
  if (!std::isfinite(best.rmse)) throw DataError("solve_pnp: no start keeps points in front of the camera");
  return best;
}

}  // namespace imutube::calib3d
