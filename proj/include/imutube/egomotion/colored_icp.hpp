#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "imutube/egomotion/kdtree.hpp"
#include "imutube/egomotion/point_cloud.hpp"

namespace imutube::egomotion {

struct IcpParams {
  /// Weight of the point-to-plane term; 1 - delta weights the color term.
  double delta = 0.968;
  int max_iterations = 50;
  double relative_tolerance = 1e-6;
  /// Correspondence gate as a multiple of the target's median point spacing.
  double gate_factor = 3.0;
  /// Wider gates (multiples of the fine gate) run to convergence first so that
  /// larger motions are captured before the fine gate is applied.
  std::vector<double> coarse_gates{16.0, 8.0, 4.0, 2.0};
  int min_correspondences = 10;
  /// Neighbours used to fit each target point's tangent-plane color gradient.
  int gradient_neighbors = 10;
};

struct IcpResult {
  RigidTransform transform;  ///< maps source points into the target frame
  double residual = 0.0;     ///< objective per correspondence at the final iterate
  int iterations = 0;
  int correspondences = 0;
  bool success = false;
  std::vector<double> residual_history;
};

inline double intensity(const Vec3& rgb) { return (rgb.x() + rgb.y() + rgb.z()) / 3.0; }

/// Target-side data reused across iterations: search index, intensities,
/// tangent-plane color gradients and the correspondence gate.
struct IcpTarget {
  const ColoredPointCloud* cloud = nullptr;
  KdTree tree;
  std::vector<double> intensity;
  std::vector<Vec3> gradient;
  double median_spacing = 0.0;

  IcpTarget(const ColoredPointCloud& target, const IcpParams& params) : cloud(&target), tree(target.points) {
    if (!target.has_normals()) throw DataError("colored_icp: target cloud has no normals");
    const std::size_t n = target.size();
    intensity.resize(n);
    for (std::size_t i = 0; i < n; ++i) intensity[i] = egomotion::intensity(target.colors[i]);
    gradient.assign(n, Vec3::Zero());
    std::vector<double> spacing;
    spacing.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = target.points[i];
      const Vec3& nrm = target.normals[i];
      const auto hits = tree.knn(p, params.gradient_neighbors + 1);
      if (hits.size() > 1) spacing.push_back(std::sqrt(hits[1].dist2));
      // Orthonormal tangent basis, gradient constrained to the tangent plane.
      const Vec3 a = std::abs(nrm.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 u = nrm.cross(a).normalized();
      const Vec3 v = nrm.cross(u);
      Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
      Eigen::Vector2d atb = Eigen::Vector2d::Zero();
      for (std::size_t h = 1; h < hits.size(); ++h) {
        const Vec3 d = target.points[hits[h].index] - p;
        const Eigen::Vector2d row(d.dot(u), d.dot(v));
        ata += row * row.transpose();
        atb += row * (intensity[hits[h].index] - intensity[i]);
      }
      const double reg = 1e-9 * std::max(ata.trace(), 1e-12);
      ata += reg * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d g = ata.ldlt().solve(atb);
      gradient[i] = g.x() * u + g.y() * v;
    }
    if (!spacing.empty()) {
      std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
      median_spacing = spacing[spacing.size() / 2];
    }
  }
};

struct Correspondence {
  int source = 0;
  int target = 0;
};

namespace detail {

/// Geometric and color residuals of one correspondence under transform t.
inline std::pair<double, double> icp_residuals(const ColoredPointCloud& src, const IcpTarget& tgt, const Correspondence& c,
                                               const RigidTransform& t) {
  const Vec3 s = t.apply(src.points[c.source]);
  const Vec3& p = tgt.cloud->points[c.target];
  const Vec3 diff = s - p;
  const double rg = diff.dot(tgt.cloud->normals[c.target]);
  const double rc = tgt.intensity[c.target] + tgt.gradient[c.target].dot(diff) - intensity(src.colors[c.source]);
  return {rg, rc};
}

}  // namespace detail

/// Sum over correspondences of delta * r_G^2 + (1 - delta) * r_C^2.
inline double icp_objective(const ColoredPointCloud& src, const IcpTarget& tgt, const std::vector<Correspondence>& corr,
                            const RigidTransform& t, double delta) {
  double e = 0.0;
  for (const auto& c : corr) {
    const auto [rg, rc] = detail::icp_residuals(src, tgt, c, t);
    e += delta * rg * rg + (1.0 - delta) * rc * rc;
  }
  return e;
}

/// Nearest-neighbour pairs of the transformed source within `gate` meters.
inline std::vector<Correspondence> find_correspondences(const ColoredPointCloud& src, const IcpTarget& tgt,
                                                        const RigidTransform& t, double gate) {
  std::vector<Correspondence> out;
  out.reserve(src.size());
  const double g2 = gate * gate;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto hit = tgt.tree.nearest(t.apply(src.points[i]));
    if (hit.index >= 0 && hit.dist2 <= g2) out.push_back({static_cast<int>(i), hit.index});
  }
  return out;
}

/// One Gauss-Newton step on SE(3) for fixed correspondences, with step halving
/// so the objective never increases. Returns the new transform.
inline RigidTransform icp_step(const ColoredPointCloud& src, const IcpTarget& tgt, const std::vector<Correspondence>& corr,
                               const RigidTransform& t, double delta, double* cost_out = nullptr) {
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  Mat6 h = Mat6::Zero();
  Vec6 g = Vec6::Zero();
  double e0 = 0.0;
  for (const auto& c : corr) {
    const Vec3 s = t.apply(src.points[c.source]);
    const auto [rg, rc] = detail::icp_residuals(src, tgt, c, t);
    const Vec3& n = tgt.cloud->normals[c.target];
    const Vec3& dp = tgt.gradient[c.target];
    Vec6 jg, jc;
    jg << s.cross(n), n;
    jc << s.cross(dp), dp;
    h += delta * jg * jg.transpose() + (1.0 - delta) * jc * jc.transpose();
    g += delta * jg * rg + (1.0 - delta) * jc * rc;
    e0 += delta * rg * rg + (1.0 - delta) * rc * rc;
  }
  const double reg = 1e-12 * std::max(h.trace(), 1e-300);
  h += reg * Mat6::Identity();
  const Vec6 xi = h.ldlt().solve(-g);
  double step = 1.0;
  for (int k = 0; k < 30; ++k, step *= 0.5) {
    const Vec6 x = step * xi;
    const RigidTransform cand = RigidTransform{exp_so3(x.head<3>()), x.tail<3>()}.compose(t);
    const double e = icp_objective(src, tgt, corr, cand, delta);
    if (e <= e0) {
      if (cost_out) *cost_out = e;
      return cand;
    }
  }
  if (cost_out) *cost_out = e0;
  return t;
}

/// Gauss-Newton iterations with correspondences held fixed; the history holds
/// the objective before the first step and after each step.
inline std::vector<double> refine_fixed(const ColoredPointCloud& src, const IcpTarget& tgt,
                                        const std::vector<Correspondence>& corr, RigidTransform& t, double delta,
                                        int iterations) {
  std::vector<double> history{icp_objective(src, tgt, corr, t, delta)};
  for (int i = 0; i < iterations; ++i) {
    double e = 0.0;
    t = icp_step(src, tgt, corr, t, delta, &e);
    history.push_back(e);
  }
  return history;
}

/// Colored ICP: alternates nearest-neighbour correspondence search with a
/// Gauss-Newton step on the blended point-to-plane and tangent-plane color
/// objective. The result maps source (frame t) points into the target (frame
/// t-1) frame. On too few correspondences `success` is false.
inline IcpResult colored_icp(const ColoredPointCloud& source, const ColoredPointCloud& target,
                             const IcpParams& params = {}, const RigidTransform& init = {}) {
  if (params.delta < 0.0 || params.delta > 1.0) throw DataError("colored_icp: delta must lie in [0,1]");
  IcpResult res;
  res.transform = init;
  if (source.size() < static_cast<std::size_t>(params.min_correspondences) ||
      target.size() < static_cast<std::size_t>(params.min_correspondences)) {
    return res;
  }
  const IcpTarget tgt(target, params);
  const double fine_gate = params.gate_factor * tgt.median_spacing;
  std::vector<double> gates;
  for (double f : params.coarse_gates) gates.push_back(f * fine_gate);
  gates.push_back(fine_gate);

  RigidTransform t = init;
  for (double gate : gates) {
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < params.max_iterations; ++it) {
      const auto corr = find_correspondences(source, tgt, t, gate);
      if (static_cast<int>(corr.size()) < params.min_correspondences) {
        res.transform = t;
        res.correspondences = static_cast<int>(corr.size());
        return res;
      }
      const double mean = icp_objective(source, tgt, corr, t, params.delta) / static_cast<double>(corr.size());
      res.residual_history.push_back(mean);
      res.residual = mean;
      res.correspondences = static_cast<int>(corr.size());
      ++res.iterations;
      if (mean == 0.0) break;
      if (std::isfinite(prev) && std::abs(prev - mean) <= params.relative_tolerance * prev) break;
      prev = mean;
      t = icp_step(source, tgt, corr, t, params.delta);
    }
  }
  t.R = orthonormalize(t.R);
  res.transform = t;
  res.success = true;
  return res;
}

}  // namespace imutube::egomotion
