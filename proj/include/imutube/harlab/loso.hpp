#pragma once

#include <algorithm>
#include <cstdint>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imutube/core/io.hpp"
#include "imutube/distmap/rank_map.hpp"
#include "imutube/harlab/features.hpp"
#include "imutube/harlab/forest.hpp"
#include "imutube/harlab/metrics.hpp"
#include "imutube/harlab/mix.hpp"

namespace imutube::harlab {

enum class Protocol { R2R, V2R, Mix2R };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::R2R: return "R2R";
    case Protocol::V2R: return "V2R";
    case Protocol::Mix2R: return "Mix2R";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "R2R") return Protocol::R2R;
  if (s == "V2R") return Protocol::V2R;
  if (s == "Mix2R") return Protocol::Mix2R;
  throw DataError("unknown protocol '" + s + "' (expected R2R, V2R or Mix2R)");
}

struct GridSpec {
  std::vector<int> trees{3, 10, 25, 50};
  std::vector<int> min_leaf{1, 5, 20, 50};
};

struct LosoOptions {
  Protocol protocol = Protocol::R2R;
  GridSpec grid;
  bool use_mapping = true;
  double map_budget_s = 600.0;  ///< real seconds per class used to fit the map
  double real_cap_s = 0.0;      ///< real training seconds per class; 0 keeps all
  double virtual_ratio = 1.0;   ///< Mix2R virtual windows per real window
  int n_components = 15;
  double window_s = 1.0;
  double overlap = 0.5;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string fingerprint;  ///< recorded in the report
};

struct FoldResult {
  std::string test_subject;
  std::string validation_subject;
  std::vector<std::string> train_subjects;  ///< subjects of every training window
  std::vector<std::string> map_subjects;    ///< subjects of the real data the map saw
  std::size_t train_windows = 0;
  int n_trees = 0;
  int min_leaf = 0;
  double validation_f1 = 0.0;
  double test_f1 = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  Eigen::MatrixXi confusion;
};

struct EvalReport {
  Protocol protocol = Protocol::R2R;
  std::vector<std::string> classes;
  std::vector<FoldResult> folds;
  double mean_f1 = 0.0;
  double accuracy = 0.0;  ///< pooled window accuracy, the Wilson point estimate
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  Eigen::MatrixXi confusion;
  std::string fingerprint;
};

namespace detail {

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class Pred>
std::vector<Window> select(const std::vector<Window>& w, Pred keep) {
  std::vector<Window> out;
  for (const auto& x : w)
    if (keep(x)) out.push_back(x);
  return out;
}

inline std::vector<std::string> subjects_of(const std::vector<Window>& w) {
  std::vector<std::string> s;
  for (const auto& x : w) s.push_back(x.subject);
  return sorted_unique(std::move(s));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Fits one rank map per column: virtual windows as the source, real as the target.
inline distmap::DistributionMap fit_window_map(const std::vector<Window>& virt, const std::vector<Window>& real) {
  if (virt.empty() || real.empty()) throw DataError("distribution map: no windows to fit on");
  const auto cols = virt.front().channels();
  std::vector<std::vector<double>> vs(static_cast<std::size_t>(cols)), rs(static_cast<std::size_t>(cols));
  for (const auto& w : virt)
    for (Eigen::Index c = 0; c < cols; ++c)
      vs[static_cast<std::size_t>(c)].insert(vs[static_cast<std::size_t>(c)].end(), w.samples.col(c).data(),
                                             w.samples.col(c).data() + w.length());
  for (const auto& w : real) {
    if (w.channels() != cols) throw DataError("distribution map: real and virtual channel counts differ");
    for (Eigen::Index c = 0; c < cols; ++c)
      rs[static_cast<std::size_t>(c)].insert(rs[static_cast<std::size_t>(c)].end(), w.samples.col(c).data(),
                                             w.samples.col(c).data() + w.length());
  }
  return distmap::fit_map(vs, rs);
}

inline std::vector<Window> apply_window_map(const distmap::DistributionMap& m, std::vector<Window> w) {
  for (auto& x : w)
    for (Eigen::Index c = 0; c < x.channels(); ++c)
      for (Eigen::Index r = 0; r < x.length(); ++r) x.samples(r, c) = m.apply(static_cast<std::size_t>(c), x.samples(r, c));
  return w;
}

inline std::vector<int> label_indices(const std::vector<Window>& w, const std::vector<std::string>& classes) {
  std::vector<int> y;
  y.reserve(w.size());
  for (const auto& x : w) {
    const auto it = std::find(classes.begin(), classes.end(), x.label);
    if (it == classes.end()) throw DataError("evaluate_loso: label '" + x.label + "' absent from real data");
    y.push_back(static_cast<int>(it - classes.begin()));
  }
  return y;
}

inline void require_absent(const std::vector<std::string>& subjects, const std::string& held_out, const char* where) {
  if (std::find(subjects.begin(), subjects.end(), held_out) != subjects.end()) {
    throw std::logic_error(std::string("evaluate_loso: held-out subject '") + held_out + "' leaked into " + where);
  }
}

inline FoldResult run_fold(const std::vector<Window>& real, const std::vector<Window>& virt,
                           const std::vector<std::string>& subjects, const std::vector<std::string>& classes,
                           std::size_t fold, const LosoOptions& o) {
  FoldResult r;
  r.test_subject = subjects[fold];
  r.validation_subject = subjects[(fold + 1) % subjects.size()];
  const auto in_train = [&](const Window& w) { return w.subject != r.test_subject && w.subject != r.validation_subject; };
  const std::uint64_t fold_seed = mix_seed(o.seed, fold);

  std::vector<Window> real_train = select(real, in_train);
  if (o.real_cap_s > 0.0) {
    real_train = subsample_per_class(real_train, windows_for_seconds(o.real_cap_s, o.window_s, o.overlap),
                                     mix_seed(fold_seed, 1), classes, "real");
  }

  std::vector<Window> train;
  if (o.protocol == Protocol::R2R) {
    train = real_train;
  } else {
    std::vector<Window> virt_train = select(virt, in_train);
    if (virt_train.empty()) throw DataError("evaluate_loso: no virtual training windows for fold " + std::to_string(fold));
    if (o.use_mapping) {
      const auto budget = windows_for_seconds(o.map_budget_s, o.window_s, o.overlap);
      std::vector<Window> map_real;
      for (const auto& c : classes) {
        const auto of_class = select(real_train, [&](const Window& w) { return w.label == c; });
        const auto take = std::min(budget, of_class.size());
        const auto part = subsample_per_class(of_class, take, mix_seed(fold_seed, 2));
        map_real.insert(map_real.end(), part.begin(), part.end());
      }
      r.map_subjects = subjects_of(map_real);
      require_absent(r.map_subjects, r.test_subject, "the distribution map");
      const auto map = fit_window_map(virt_train, map_real);
      virt_train = apply_window_map(map, std::move(virt_train));
    }
    if (o.protocol == Protocol::V2R) {
      train = std::move(virt_train);
    } else {
      const auto by_class = detail::by_label(real_train);
      std::size_t k = std::numeric_limits<std::size_t>::max();
      for (const auto& c : classes) k = std::min(k, by_class.count(c) ? by_class.at(c).size() : std::size_t{0});
      train = mix_datasets(real_train, virt_train, k, o.virtual_ratio, mix_seed(fold_seed, 3));
    }
  }
  r.train_subjects = subjects_of(train);
  r.train_windows = train.size();
  require_absent(r.train_subjects, r.test_subject, "training");

  const auto val = select(real, [&](const Window& w) { return w.subject == r.validation_subject; });
  const auto test = select(real, [&](const Window& w) { return w.subject == r.test_subject; });
  const auto xtr = feature_matrix(train, o.n_components);
  const auto ytr = label_indices(train, classes);
  const auto xval = feature_matrix(val, o.n_components);
  const auto yval = label_indices(val, classes);
  std::vector<int> class_ids(classes.size());
  std::iota(class_ids.begin(), class_ids.end(), 0);

  ForestModel best;
  double best_f1 = -1.0;
  for (int trees : o.grid.trees) {
    for (int leaf : o.grid.min_leaf) {
      ForestParams fp;
      fp.n_trees = trees;
      fp.min_leaf = leaf;
      fp.seed = mix_seed(fold_seed, 4);
      auto model = forest_train(xtr, ytr, fp);
      const double f1 = val.empty() ? 0.0 : macro_f1(forest_predict(model, xval).labels, yval, class_ids);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = std::move(model);
        r.n_trees = trees;
        r.min_leaf = leaf;
      }
    }
  }
  r.validation_f1 = best_f1;

  const auto ytest = label_indices(test, classes);
  const auto pred = forest_predict(best, feature_matrix(test, o.n_components)).labels;
  r.confusion = confusion_matrix(pred, ytest, class_ids);
  r.test_f1 = macro_f1(r.confusion);
  r.total = test.size();
  r.correct = static_cast<std::size_t>(r.confusion.trace());
  return r;
}

}  // namespace detail

/// Leave-one-subject-out evaluation. Real windows provide the held-out test
/// subject, the validation subject (next subject in sorted order) and, for R2R
/// and Mix2R, training data; virtual windows are used for V2R and Mix2R. The
/// distribution map sees only real windows of training subjects.
inline EvalReport evaluate_loso(const std::vector<Window>& dataset, const LosoOptions& o) {
  if (o.grid.trees.empty() || o.grid.min_leaf.empty()) throw DataError("evaluate_loso: empty hyperparameter grid");
  if (o.protocol != Protocol::R2R && o.use_mapping && !(o.map_budget_s > 0.0)) {
    throw DataError("evaluate_loso: distribution mapping requires a positive real-data budget (map_budget_s > 0)");
  }
  const auto real = detail::select(dataset, [](const Window& w) { return w.origin == "real"; });
  const auto virt = detail::select(dataset, [](const Window& w) { return w.origin == "virtual"; });
  const auto subjects = detail::subjects_of(real);
  if (subjects.size() < 3) {
    throw DataError("evaluate_loso: need at least 3 subjects with real data, got " + std::to_string(subjects.size()));
  }
  std::vector<std::string> labels;
  for (const auto& w : real) labels.push_back(w.label);
  EvalReport rep;
  rep.protocol = o.protocol;
  rep.classes = detail::sorted_unique(labels);
  rep.fingerprint = o.fingerprint;
  rep.folds.resize(subjects.size());

  const int workers = std::clamp(o.workers, 1, static_cast<int>(subjects.size()));
  if (workers == 1) {
    for (std::size_t f = 0; f < subjects.size(); ++f) rep.folds[f] = detail::run_fold(real, virt, subjects, rep.classes, f, o);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t f = static_cast<std::size_t>(w); f < subjects.size(); f += static_cast<std::size_t>(workers)) {
          rep.folds[f] = detail::run_fold(real, virt, subjects, rep.classes, f, o);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }

  const auto k = static_cast<Eigen::Index>(rep.classes.size());
  rep.confusion = Eigen::MatrixXi::Zero(k, k);
  std::size_t correct = 0, total = 0;
  for (const auto& f : rep.folds) {
    rep.mean_f1 += f.test_f1 / static_cast<double>(rep.folds.size());
    rep.confusion += f.confusion;
    correct += f.correct;
    total += f.total;
  }
  if (total == 0) throw DataError("evaluate_loso: no test windows");
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  std::tie(rep.wilson_low, rep.wilson_high) = wilson_interval(correct, total);
  return rep;
}

inline nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(r.protocol);
  j["config_fingerprint"] = r.fingerprint;
  j["classes"] = r.classes;
  j["mean_macro_f1"] = r.mean_f1;
  j["accuracy"] = r.accuracy;
  j["wilson_low"] = r.wilson_low;
  j["wilson_high"] = r.wilson_high;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : r.folds) {
    j["folds"].push_back({{"test_subject", f.test_subject},
                          {"validation_subject", f.validation_subject},
                          {"train_subjects", f.train_subjects},
                          {"map_subjects", f.map_subjects},
                          {"train_windows", f.train_windows},
                          {"n_trees", f.n_trees},
                          {"min_leaf", f.min_leaf},
                          {"validation_f1", f.validation_f1},
                          {"test_f1", f.test_f1},
                          {"correct", f.correct},
                          {"total", f.total}});
  }
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(r.confusion.cols()));
    for (Eigen::Index c = 0; c < r.confusion.cols(); ++c) row[static_cast<std::size_t>(c)] = r.confusion(i, c);
    rows.push_back(row);
  }
  j["confusion"] = rows;
  return j;
}

inline std::string report_text(const EvalReport& r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "protocol " << to_string(r.protocol) << "  fingerprint " << r.fingerprint << "\n";
  s << std::left << std::setw(12) << "test" << std::setw(12) << "validation" << std::right << std::setw(7) << "trees"
    << std::setw(9) << "min_leaf" << std::setw(10) << "val_f1" << std::setw(10) << "test_f1" << std::setw(10)
    << "windows" << "\n";
  for (const auto& f : r.folds) {
    s << std::left << std::setw(12) << f.test_subject << std::setw(12) << f.validation_subject << std::right
      << std::setw(7) << f.n_trees << std::setw(9) << f.min_leaf << std::setw(10) << f.validation_f1 << std::setw(10)
      << f.test_f1 << std::setw(10) << f.total << "\n";
  }
  s << "mean macro F1 " << r.mean_f1 << "  accuracy " << r.accuracy << "  95% Wilson [" << r.wilson_low << ", "
    << r.wilson_high << "]\n";
  return s.str();
}

/// Rows are true classes, columns predicted classes.
inline std::string confusion_csv(const EvalReport& r) {
  std::string out = "truth";
  for (const auto& c : r.classes) out += "," + c;
  out += '\n';
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    out += r.classes[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < r.confusion.cols(); ++c) out += "," + std::to_string(r.confusion(i, c));
    out += '\n';
  }
  return out;
}

/// Writes <stem>.json, <stem>.txt and <stem>_confusion.csv into `dir`.
inline void write_report(const fs::path& dir, const std::string& stem, const EvalReport& r) {
  write_file_atomic(dir / (stem + ".json"), report_json(r).dump(2) + "\n");
  write_file_atomic(dir / (stem + ".txt"), report_text(r));
  write_file_atomic(dir / (stem + "_confusion.csv"), confusion_csv(r));
}

}  // namespace imutube::harlab
