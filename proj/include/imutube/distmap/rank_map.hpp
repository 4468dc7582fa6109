#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/core/error.hpp"
#include "imutube/core/io.hpp"

namespace imutube::distmap {

/// Empirical CDF over sorted samples with Hazen plotting positions: the i-th
/// order statistic (1-based) sits at probability (i - 0.5) / n, and values in
/// between are linearly interpolated.
class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  explicit EmpiricalCDF(std::vector<double> samples) : v_(std::move(samples)) {
    if (v_.size() < 2) throw DataError("EmpiricalCDF: need at least 2 samples, got " + std::to_string(v_.size()));
    for (double x : v_)
      if (!std::isfinite(x)) throw DataError("EmpiricalCDF: non-finite sample");
    std::sort(v_.begin(), v_.end());
  }

  std::size_t size() const { return v_.size(); }
  const std::vector<double>& values() const { return v_; }
  double min() const { return v_.front(); }
  double max() const { return v_.back(); }

  double p_min() const { return 0.5 / static_cast<double>(v_.size()); }
  double p_max() const { return 1.0 - p_min(); }

  /// F(x), clamped to [p_min, p_max]. Within a run of tied samples the
  /// probability is the midpoint of the run's positions.
  double cdf(double x) const {
    const double n = static_cast<double>(v_.size());
    if (x < v_.front()) return p_min();
    if (x > v_.back()) return p_max();
    const auto lo = std::lower_bound(v_.begin(), v_.end(), x);
    const auto hi = std::upper_bound(v_.begin(), v_.end(), x);
    if (lo != hi) {
      // Exact hit on one or more order statistics.
      const double first = static_cast<double>(lo - v_.begin()) + 0.5;
      const double last = static_cast<double>(hi - v_.begin()) - 0.5;
      return 0.5 * (first + last) / n;
    }
    const std::size_t j = static_cast<std::size_t>(hi - v_.begin());  // v_[j-1] < x < v_[j]
    const double a = (x - v_[j - 1]) / (v_[j] - v_[j - 1]);
    return (static_cast<double>(j) - 0.5 + a) / n;
  }

  /// G^{-1}(p): linear interpolation between order statistics; probabilities
  /// outside [p_min, p_max] return the extremes.
  double quantile(double p) const {
    const double n = static_cast<double>(v_.size());
    const double h = p * n - 0.5;  // 0-based fractional index
    if (!(h > 0.0)) return v_.front();
    if (h >= n - 1.0) return v_.back();
    const auto i = static_cast<std::size_t>(std::floor(h));
    const double a = h - static_cast<double>(i);
    return v_[i] + a * (v_[i + 1] - v_[i]);
  }

 private:
  std::vector<double> v_;
};

/// One channel's source (virtual) and target (real) distributions.
struct ChannelMap {
  std::string name;
  EmpiricalCDF source;
  EmpiricalCDF target;

  /// x_r = G^{-1}(F(x_v)).
  double apply(double x) const { return target.quantile(source.cdf(x)); }
};

/// Per-channel rank-transform map from virtual to real distributions.
struct DistributionMap {
  std::vector<ChannelMap> channels;

  const ChannelMap& channel(const std::string& name) const {
    for (const auto& c : channels)
      if (c.name == name) return c;
    throw DataError("DistributionMap: no channel named '" + name + "'");
  }

  bool has_channel(const std::string& name) const {
    return std::any_of(channels.begin(), channels.end(), [&](const ChannelMap& c) { return c.name == name; });
  }

  double apply(std::size_t channel, double x) const { return channels.at(channel).apply(x); }
  double apply(const std::string& name, double x) const { return channel(name).apply(x); }
};

/// One map per channel. `names` may be empty, giving channels "0", "1", ...
inline DistributionMap fit_map(const std::vector<std::vector<double>>& virtual_samples,
                               const std::vector<std::vector<double>>& real_samples,
                               const std::vector<std::string>& names = {}) {
  if (virtual_samples.size() != real_samples.size()) throw DataError("fit_map: channel counts differ");
  if (!names.empty() && names.size() != real_samples.size()) throw DataError("fit_map: name count differs");
  DistributionMap m;
  for (std::size_t c = 0; c < real_samples.size(); ++c) {
    const std::string name = names.empty() ? std::to_string(c) : names[c];
    if (virtual_samples[c].size() < 2 || real_samples[c].size() < 2) {
      throw DataError("fit_map: channel '" + name + "' needs at least 2 samples on each side");
    }
    m.channels.push_back({name, EmpiricalCDF(virtual_samples[c]), EmpiricalCDF(real_samples[c])});
  }
  return m;
}

inline std::vector<double> apply_map(const DistributionMap& m, std::size_t channel, const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(m.apply(channel, x));
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DataError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline constexpr std::string_view kMapSchema = "dmap_v1";

inline nlohmann::ordered_json map_to_json(const DistributionMap& m) {
  nlohmann::ordered_json j;
  j["schema"] = kMapSchema;
  j["channels"] = nlohmann::ordered_json::array();
  for (const auto& c : m.channels) {
    j["channels"].push_back({{"name", c.name}, {"source", c.source.values()}, {"target", c.target.values()}});
  }
  return j;
}

inline DistributionMap map_from_json(const nlohmann::json& j, const std::string& source = "<map>") {
  try {
    if (j.at("schema").get<std::string>() != kMapSchema) {
      throw ParseError(source, 0, "unsupported schema '" + j.at("schema").get<std::string>() + "'");
    }
    DistributionMap m;
    for (const auto& c : j.at("channels")) {
      m.channels.push_back({c.at("name").get<std::string>(), EmpiricalCDF(c.at("source").get<std::vector<double>>()),
                            EmpiricalCDF(c.at("target").get<std::vector<double>>())});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const DataError& e) {
    throw ParseError(source, 0, e.what());
  }
}

inline void save_map(const fs::path& path, const DistributionMap& m) {
  write_file_atomic(path, map_to_json(m).dump() + "\n");
}

inline DistributionMap load_map(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return map_from_json(j, path.string());
}

}  // namespace imutube::distmap
