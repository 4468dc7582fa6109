#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "imutube/core/error.hpp"

namespace imutube::distmap {

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const { return mean.size(); }
};

/// Sample mean and unbiased covariance of row vectors. Needs dim + 1 rows.
inline GaussianStats fit_gaussian(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows(), d = rows.cols();
  if (d == 0) throw DataError("fit_gaussian: zero-dimensional features");
  if (n < d + 1) {
    throw DataError("fit_gaussian: need at least " + std::to_string(d + 1) + " vectors, got " + std::to_string(n));
  }
  GaussianStats g;
  g.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - g.mean.transpose();
  g.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return g;
}

inline GaussianStats fit_gaussian(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw DataError("fit_gaussian: no vectors");
  const std::size_t d = vectors.front().size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) throw DataError("fit_gaussian: vectors differ in dimension");
    for (std::size_t k = 0; k < d; ++k) rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = vectors[i][k];
  }
  return fit_gaussian(rows);
}

namespace detail {

/// Symmetric PSD square root; small negative eigenvalues are treated as zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}). The trace of the
/// product's square root is taken from the symmetric form S_a^{1/2} S_b S_a^{1/2},
/// which has the same eigenvalues.
inline double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim() != b.dim() || a.cov.rows() != a.dim() || b.cov.rows() != b.dim()) {
    throw DataError("frechet_distance: dimension mismatch");
  }
  const Eigen::MatrixXd ra = detail::psd_sqrt(a.cov);
  const Eigen::MatrixXd m = ra * b.cov * ra;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double tr_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, d);
}

}  // namespace imutube::distmap
