#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imutube/trackio/types.hpp"

namespace imutube::trackio {

/// Minimum-cost assignment on a rectangular cost matrix (Kuhn-Munkres with
/// potentials, O(n^2 m)). Returns, for every row, the assigned column or -1.
/// Every row is assigned when rows <= cols, every column otherwise.
inline std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  std::vector<int> result(rows, -1);
  if (rows == 0 || cols == 0) return result;
  if (rows > cols) {
    const std::vector<int> t = solve_assignment(cost.transpose());
    for (int c = 0; c < cols; ++c) {
      if (t[c] >= 0) result[t[c]] = c;
    }
    return result;
  }
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] is the row matched to column j, column 0 is a sentinel.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= cols; ++j) {
    if (p[j] != 0) result[p[j] - 1] = j - 1;
  }
  return result;
}

struct Matching {
  std::vector<std::pair<int, int>> pairs;  ///< (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// Maximum-IoU bipartite matching; pairs below `iou_threshold` are dropped.
inline Matching assign_tracks(const std::vector<BBox>& prev_tracks, const std::vector<BBox>& detections,
                              double iou_threshold) {
  const int nt = static_cast<int>(prev_tracks.size());
  const int nd = static_cast<int>(detections.size());
  Eigen::MatrixXd weight(nt, nd);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nd; ++j) weight(i, j) = iou(prev_tracks[i], detections[j]);
  }
  const std::vector<int> assign = solve_assignment(-weight);
  Matching m;
  std::vector<char> det_used(nd, 0);
  for (int i = 0; i < nt; ++i) {
    const int j = assign[i];
    if (j >= 0 && weight(i, j) >= iou_threshold && weight(i, j) > 0.0) {
      m.pairs.emplace_back(i, j);
      det_used[j] = 1;
    } else {
      m.unmatched_tracks.push_back(i);
    }
  }
  for (int j = 0; j < nd; ++j) {
    if (!det_used[j]) m.unmatched_detections.push_back(j);
  }
  return m;
}

}  // namespace imutube::trackio
