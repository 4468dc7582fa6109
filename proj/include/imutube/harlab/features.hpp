#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "imutube/harlab/window.hpp"

namespace imutube::harlab {

/// Probe probabilities k / (n + 1), k = 1..n.
inline std::vector<double> ecdf_probes(int n_components) {
  std::vector<double> p(static_cast<std::size_t>(n_components));
  for (int k = 0; k < n_components; ++k) p[static_cast<std::size_t>(k)] = (k + 1.0) / (n_components + 1.0);
  return p;
}

/// Per channel: inverse ECDF at the probe probabilities (linear interpolation
/// over positions p * (L - 1)), followed by the channel mean. Channels are
/// concatenated in column order, so the length is C * (n_components + 1).
inline std::vector<double> ecdf_features(const Window& w, int n_components = 15) {
  if (n_components < 1) throw DataError("ecdf_features: need at least one component");
  if (w.length() < 1) throw DataError("ecdf_features: empty window");
  const auto probes = ecdf_probes(n_components);
  const auto len = static_cast<std::size_t>(w.length());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w.channels()) * (probes.size() + 1));
  std::vector<double> col(len);
  for (Eigen::Index c = 0; c < w.channels(); ++c) {
    for (std::size_t i = 0; i < len; ++i) col[i] = w.samples(static_cast<Eigen::Index>(i), c);
    std::sort(col.begin(), col.end());
    for (double p : probes) {
      const double h = p * static_cast<double>(len - 1);
      const auto i = static_cast<std::size_t>(std::floor(h));
      const std::size_t j = std::min(i + 1, len - 1);
      out.push_back(col[i] + (h - static_cast<double>(i)) * (col[j] - col[i]));
    }
    out.push_back(w.samples.col(c).mean());
  }
  return out;
}

inline std::vector<std::vector<double>> feature_matrix(const std::vector<Window>& windows, int n_components = 15) {
  std::vector<std::vector<double>> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(ecdf_features(w, n_components));
  return out;
}

}  // namespace imutube::harlab
