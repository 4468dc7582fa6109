#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "imutube/harlab/window.hpp"

namespace imutube::harlab {

/// Windows needed to cover `seconds` of stream with the given geometry.
inline std::size_t windows_for_seconds(double seconds, double length_s, double overlap) {
  if (seconds < length_s) return 0;
  return static_cast<std::size_t>(std::floor((seconds - length_s) / (length_s * (1.0 - overlap)) + 1e-9)) + 1;
}

namespace detail {

inline std::map<std::string, std::vector<std::size_t>> by_label(const std::vector<Window>& w) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < w.size(); ++i) out[w[i].label].push_back(i);
  return out;
}

inline std::vector<std::size_t> draw(std::vector<std::size_t> pool, std::size_t k, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// Per class, `per_class` windows drawn uniformly without replacement; output
/// ordered by class, original order within a class. Throws listing every
/// class that falls short.
inline std::vector<Window> subsample_per_class(const std::vector<Window>& windows, std::size_t per_class,
                                               std::uint64_t seed, const std::vector<std::string>& classes = {},
                                               const std::string& what = "windows") {
  auto idx = detail::by_label(windows);
  for (const auto& c : classes) idx[c];
  std::string shortfalls;
  for (const auto& [label, v] : idx) {
    if (v.size() < per_class) {
      shortfalls += " " + label + " " + what + " " + std::to_string(v.size()) + "/" + std::to_string(per_class) + ";";
    }
  }
  if (!shortfalls.empty()) throw DataError("insufficient windows:" + shortfalls);
  std::mt19937_64 rng(seed);
  std::vector<Window> out;
  for (const auto& [label, v] : idx)
    for (auto i : detail::draw(v, per_class, rng)) out.push_back(windows[i]);
  return out;
}

/// Per class, draws `real_per_class` real windows and
/// round(real_per_class * virtual_ratio) virtual windows. Classes are those
/// present in `real`. Real windows precede virtual ones; the real subset is the
/// same as subsample_per_class(real, real_per_class, seed).
inline std::vector<Window> mix_datasets(const std::vector<Window>& real, const std::vector<Window>& virt,
                                        std::size_t real_per_class, double virtual_ratio, std::uint64_t seed) {
  if (!(virtual_ratio >= 0.0)) throw DataError("mix_datasets: virtual ratio must be non-negative");
  const auto virt_per_class = static_cast<std::size_t>(std::llround(static_cast<double>(real_per_class) * virtual_ratio));
  std::vector<std::string> classes;
  for (const auto& [label, v] : detail::by_label(real)) classes.push_back(label);
  std::vector<Window> virt_in;
  for (const auto& w : virt)
    if (std::find(classes.begin(), classes.end(), w.label) != classes.end()) virt_in.push_back(w);
  std::string shortfalls;
  std::vector<Window> out, vout;
  try {
    out = subsample_per_class(real, real_per_class, seed, {}, "real");
  } catch (const DataError& e) {
    shortfalls += e.what();
  }
  if (virt_per_class > 0) {
    try {
      vout = subsample_per_class(virt_in, virt_per_class, seed ^ 0x9e3779b97f4a7c15ULL, classes, "virtual");
    } catch (const DataError& e) {
      shortfalls += e.what();
    }
  }
  if (!shortfalls.empty()) throw DataError("mix_datasets: " + shortfalls);
  out.insert(out.end(), vout.begin(), vout.end());
  return out;
}

}  // namespace imutube::harlab
