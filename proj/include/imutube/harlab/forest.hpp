#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "imutube/core/error.hpp"

namespace imutube::harlab {

using FeatureRows = std::vector<std::vector<double>>;

/// Node of a classification tree. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> histogram;  ///< class counts of the training samples reaching the node

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  const TreeNode& leaf_for(const std::vector<double>& x) const {
    const TreeNode* n = &nodes.front();
    while (!n->is_leaf()) n = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
    return *n;
  }
};

struct ForestParams {
  int n_trees = 10;
  int min_leaf = 1;
  std::uint64_t seed = 0;
  bool bootstrap = true;
  int workers = 1;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
  std::size_t n_features = 0;
  int n_trees = 0;
  int min_leaf = 1;
  std::uint64_t seed = 0;
};

namespace detail {

inline int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureRows& x, const std::vector<int>& y, int n_classes, int min_leaf, std::mt19937_64& rng)
      : x_(x), y_(y), k_(n_classes), min_leaf_(static_cast<std::size_t>(std::max(1, min_leaf))), rng_(rng) {
    const std::size_t f = x.front().size();
    n_candidates_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(f)))));
    order_.resize(f);
    std::iota(order_.begin(), order_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> idx) {
    tree_.nodes.clear();
    grow(idx);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  ///< weighted child Gini * n, lower is better
  };

  std::vector<double> histogram(const std::vector<std::size_t>& idx) const {
    std::vector<double> h(static_cast<std::size_t>(k_), 0.0);
    for (auto i : idx) h[static_cast<std::size_t>(y_[i])] += 1.0;
    return h;
  }

  static double gini_mass(const std::vector<double>& h, double n) {
    if (n <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : h) s += c * c;
    return n - s / n;  // n * gini
  }

  int grow(const std::vector<std::size_t>& idx) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes.back().histogram = histogram(idx);
    const auto& h = tree_.nodes.back().histogram;
    const bool pure = std::count_if(h.begin(), h.end(), [](double c) { return c > 0.0; }) <= 1;
    if (pure || idx.size() < 2 * min_leaf_) return id;
    const Split s = best_split(idx);
    if (s.feature < 0) return id;
    std::vector<std::size_t> l, r;
    for (auto i : idx) (x_[i][static_cast<std::size_t>(s.feature)] <= s.threshold ? l : r).push_back(i);
    const int left = grow(l);
    const int right = grow(r);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& idx) {
    std::shuffle(order_.begin(), order_.end(), rng_);
    Split best;
    best.score = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    std::vector<std::pair<double, int>> vals(idx.size());
    std::vector<double> left(static_cast<std::size_t>(k_)), right(static_cast<std::size_t>(k_));
    for (std::size_t f : order_) {
      if (visited >= n_candidates_) break;
      for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = {x_[idx[i]][f], y_[idx[i]]};
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;
      ++visited;
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (const auto& v : vals) right[static_cast<std::size_t>(v.second)] += 1.0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left[static_cast<std::size_t>(vals[i].second)] += 1.0;
        right[static_cast<std::size_t>(vals[i].second)] -= 1.0;
        if (vals[i].first == vals[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = vals.size() - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double score = gini_mass(left, static_cast<double>(nl)) + gini_mass(right, static_cast<double>(nr));
        if (score < best.score) {
          best.score = score;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          // Guard against the midpoint rounding onto the upper value.
          if (!(best.threshold < vals[i + 1].first)) best.threshold = vals[i].first;
        }
      }
    }
    return best;
  }

  const FeatureRows& x_;
  const std::vector<int>& y_;
  int k_;
  std::size_t min_leaf_;
  std::mt19937_64& rng_;
  std::size_t n_candidates_ = 1;
  std::vector<std::size_t> order_;
  DecisionTree tree_;
};

inline void check_rows(const FeatureRows& x, std::size_t dim, const char* who) {
  for (const auto& row : x) {
    if (row.size() != dim) {
      throw DataError(std::string(who) + ": feature dimension " + std::to_string(row.size()) + ", expected " +
                      std::to_string(dim));
    }
  }
}

}  // namespace detail

/// Random forest with Gini splits over sqrt(F) candidate features per node.
/// Labels are class indices in [0, max label]. Each tree uses its own RNG
/// stream derived from (seed, tree index), so results do not depend on the
/// worker count.
inline ForestModel forest_train(const FeatureRows& x, const std::vector<int>& y, const ForestParams& p) {
  if (x.empty() || x.size() != y.size()) throw DataError("forest_train: need matching, non-empty features and labels");
  if (p.n_trees < 1) throw DataError("forest_train: n_trees must be >= 1");
  if (p.min_leaf < 1) throw DataError("forest_train: min_leaf must be >= 1");
  const std::size_t dim = x.front().size();
  if (dim == 0) throw DataError("forest_train: zero-dimensional features");
  detail::check_rows(x, dim, "forest_train");
  int n_classes = 0;
  for (int c : y) {
    if (c < 0) throw DataError("forest_train: negative class label");
    n_classes = std::max(n_classes, c + 1);
  }
  std::vector<char> present(static_cast<std::size_t>(n_classes), 0);
  for (int c : y) present[static_cast<std::size_t>(c)] = 1;
  if (std::count(present.begin(), present.end(), 1) < 2) throw DataError("forest_train: need at least 2 classes");

  ForestModel m;
  m.n_classes = n_classes;
  m.n_features = dim;
  m.n_trees = p.n_trees;
  m.min_leaf = p.min_leaf;
  m.seed = p.seed;
  m.trees.resize(static_cast<std::size_t>(p.n_trees));

  auto train_one = [&](int t) {
    std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> idx(x.size());
    if (p.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
      for (auto& i : idx) i = pick(rng);
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    detail::TreeBuilder b(x, y, n_classes, p.min_leaf, rng);
    m.trees[static_cast<std::size_t>(t)] = b.build(std::move(idx));
  };

  const int workers = std::clamp(p.workers, 1, p.n_trees);
  if (workers == 1) {
    for (int t = 0; t < p.n_trees; ++t) train_one(t);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (int t = w; t < p.n_trees; t += workers) train_one(t);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  return m;
}

struct ForestPrediction {
  std::vector<int> labels;
  std::vector<std::vector<double>> probabilities;
};

/// Majority vote over trees (ties to the lower class index); probabilities are
/// the mean of the normalised leaf histograms.
inline ForestPrediction forest_predict(const ForestModel& m, const FeatureRows& x) {
  if (m.trees.empty()) throw DataError("forest_predict: empty model");
  detail::check_rows(x, m.n_features, "forest_predict");
  ForestPrediction out;
  out.labels.reserve(x.size());
  out.probabilities.reserve(x.size());
  const auto k = static_cast<std::size_t>(m.n_classes);
  for (const auto& row : x) {
    std::vector<double> votes(k, 0.0), prob(k, 0.0);
    for (const auto& t : m.trees) {
      const auto& h = t.leaf_for(row).histogram;
      const double total = std::accumulate(h.begin(), h.end(), 0.0);
      votes[static_cast<std::size_t>(detail::argmax(h))] += 1.0;
      for (std::size_t c = 0; c < k; ++c) prob[c] += h[c] / total;
    }
    for (auto& v : prob) v /= static_cast<double>(m.trees.size());
    out.labels.push_back(detail::argmax(votes));
    out.probabilities.push_back(std::move(prob));
  }
  return out;
}

}  // namespace imutube::harlab
