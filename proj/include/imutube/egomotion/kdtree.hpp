#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "imutube/core/geometry.hpp"

namespace imutube::egomotion {

/// Static 3D kd-tree over a borrowed point array (the array must outlive it).
class KdTree {
 public:
  struct Hit {
    int index = -1;
    double dist2 = std::numeric_limits<double>::infinity();
  };

  KdTree() = default;
  explicit KdTree(const std::vector<Vec3>& points) : pts_(&points) {
    idx_.resize(points.size());
    std::iota(idx_.begin(), idx_.end(), 0);
    nodes_.reserve(2 * points.size() / kLeaf + 2);
    if (!points.empty()) build(0, static_cast<int>(points.size()));
  }

  std::size_t size() const { return idx_.size(); }

  Hit nearest(const Vec3& q) const {
    Hit best;
    if (!nodes_.empty()) search_nn(0, q, best);
    return best;
  }

  /// k nearest points sorted by distance (fewer if the tree is smaller).
  std::vector<Hit> knn(const Vec3& q, int k) const {
    std::priority_queue<std::pair<double, int>> heap;
    if (!nodes_.empty() && k > 0) search_knn(0, q, static_cast<std::size_t>(k), heap);
    std::vector<Hit> out(heap.size());
    for (auto i = static_cast<int>(out.size()) - 1; i >= 0; --i) {
      out[i] = {heap.top().second, heap.top().first};
      heap.pop();
    }
    return out;
  }

 private:
  static constexpr int kLeaf = 12;

  struct Node {
    int begin, end;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (int i = begin; i < end; ++i) {
      lo = lo.cwiseMin((*pts_)[idx_[i]]);
      hi = hi.cwiseMax((*pts_)[idx_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [&](int a, int b) { return (*pts_)[a][axis] < (*pts_)[b][axis]; });
    const double split = (*pts_)[idx_[mid]][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search_nn(int id, const Vec3& q, Hit& best) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const double d = ((*pts_)[idx_[i]] - q).squaredNorm();
        if (d < best.dist2) best = {idx_[i], d};
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    search_nn(near, q, best);
    if (diff * diff < best.dist2) search_nn(far, q, best);
  }

  void search_knn(int id, const Vec3& q, std::size_t k, std::priority_queue<std::pair<double, int>>& heap) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const double d = ((*pts_)[idx_[i]] - q).squaredNorm();
        if (heap.size() < k) {
          heap.emplace(d, idx_[i]);
        } else if (d < heap.top().first) {
          heap.pop();
          heap.emplace(d, idx_[i]);
        }
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    search_knn(near, q, k, heap);
    if (heap.size() < k || diff * diff < heap.top().first) search_knn(far, q, k, heap);
  }

  const std::vector<Vec3>* pts_ = nullptr;
  std::vector<int> idx_;
  std::vector<Node> nodes_;
};

}  // namespace imutube::egomotion
