#pragma once

#include <Eigen/Eigenvalues>

#include "imutube/egomotion/kdtree.hpp"
#include "imutube/egomotion/point_cloud.hpp"

namespace imutube::egomotion {

/// Smallest principal axis of each point's neighbourhood (the point plus its
/// k nearest neighbours), flipped to face the camera at the origin.
/// `variation`, when given, receives each neighbourhood's surface variation
/// lambda_min / (lambda_0 + lambda_1 + lambda_2): 0 on a plane, 1/3 at most.
inline ColoredPointCloud estimate_normals(ColoredPointCloud cloud, int k = 30, std::vector<double>* variation = nullptr) {
  if (k < 2) throw DataError("estimate_normals: k must be >= 2");
  if (cloud.size() < static_cast<std::size_t>(k) + 1) {
    throw DataError("estimate_normals: need at least k+1 = " + std::to_string(k + 1) + " points, got " +
                    std::to_string(cloud.size()));
  }
  const KdTree tree(cloud.points);
  cloud.normals.assign(cloud.size(), Vec3::UnitZ());
  if (variation) variation->assign(cloud.size(), 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto hits = tree.knn(cloud.points[i], k + 1);
    Vec3 mean = Vec3::Zero();
    for (const auto& h : hits) mean += cloud.points[h.index];
    mean /= static_cast<double>(hits.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& h : hits) {
      const Vec3 d = cloud.points[h.index] - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 n = eig.eigenvectors().col(0).normalized();
    if (n.dot(-cloud.points[i]) < 0.0) n = -n;
    cloud.normals[i] = n;
    if (variation) {
      const double total = eig.eigenvalues().sum();
      (*variation)[i] = total > 0.0 ? eig.eigenvalues()[0] / total : 0.0;
    }
  }
  return cloud;
}

}  // namespace imutube::egomotion
