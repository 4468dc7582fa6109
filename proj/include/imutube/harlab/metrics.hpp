#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imutube/core/error.hpp"

namespace imutube::harlab {

/// confusion(t, p): count of samples with truth class t predicted as p.
template <class Label>
Eigen::MatrixXi confusion_matrix(const std::vector<Label>& predictions, const std::vector<Label>& truth,
                                 const std::vector<Label>& classes) {
  if (predictions.size() != truth.size()) throw DataError("confusion_matrix: prediction and truth lengths differ");
  const auto k = static_cast<Eigen::Index>(classes.size());
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(k, k);
  auto index = [&](const Label& l) {
    const auto it = std::find(classes.begin(), classes.end(), l);
    if (it == classes.end()) throw DataError("confusion_matrix: label outside the class list");
    return static_cast<Eigen::Index>(it - classes.begin());
  };
  for (std::size_t i = 0; i < truth.size(); ++i) ++m(index(truth[i]), index(predictions[i]));
  return m;
}

/// Unweighted mean of per-class F1 over classes that occur in the truth.
inline double macro_f1(const Eigen::MatrixXi& confusion) {
  double sum = 0.0;
  int counted = 0;
  for (Eigen::Index c = 0; c < confusion.rows(); ++c) {
    const double support = confusion.row(c).sum();
    if (support == 0) continue;
    const double tp = confusion(c, c);
    const double predicted = confusion.col(c).sum();
    sum += tp == 0 ? 0.0 : 2.0 * tp / (support + predicted);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / counted;
}

template <class Label>
double macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& truth, const std::vector<Label>& classes) {
  return macro_f1(confusion_matrix(predictions, truth, classes));
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.96) {
  if (n == 0) throw DataError("wilson_interval: n must be positive");
  if (successes > n) throw DataError("wilson_interval: successes exceed n");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  double lo = centre - half, hi = centre + half;
  if (successes == 0) lo = 0.0;
  if (successes == n) hi = 1.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

}  // namespace imutube::harlab
