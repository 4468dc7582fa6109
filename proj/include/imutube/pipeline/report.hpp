#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "imutube/harlab/loso.hpp"
#include "imutube/pipeline/config.hpp"
#include "imutube/pipeline/dataset.hpp"

namespace imutube::pipeline {

/// Runs each protocol in `protocols` (or the config's list when empty) over
/// `windows` and writes <protocol>.json/.txt/_confusion.csv plus summary.json
/// into `out_dir`.
inline std::vector<harlab::EvalReport> run_report(const std::vector<harlab::Window>& windows, const PipelineConfig& cfg,
                                                  const fs::path& out_dir, std::vector<std::string> protocols = {}) {
  if (protocols.empty()) protocols = cfg.evaluation.protocols;
  std::vector<harlab::Protocol> parsed;
  for (const auto& p : protocols) parsed.push_back(harlab::protocol_from_string(p));
  fs::create_directories(out_dir);
  std::vector<harlab::EvalReport> reports;
  nlohmann::ordered_json summary;
  summary["config_fingerprint"] = config_fingerprint(cfg);
  summary["windows"] = windows.size();
  summary["protocols"] = nlohmann::ordered_json::object();
  for (const auto p : parsed) {
    spdlog::info("evaluating {}", harlab::to_string(p));
    auto r = harlab::evaluate_loso(windows, loso_options(cfg, p));
    harlab::write_report(out_dir, harlab::to_string(p), r);
    summary["protocols"][harlab::to_string(p)] = {{"mean_macro_f1", r.mean_f1},
                                                   {"accuracy", r.accuracy},
                                                   {"wilson_low", r.wilson_low},
                                                   {"wilson_high", r.wilson_high},
                                                   {"folds", r.folds.size()}};
    spdlog::info("{}: mean macro F1 {:.4f}", harlab::to_string(p), r.mean_f1);
    reports.push_back(std::move(r));
  }
  write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  return reports;
}

/// Loads the IMU directories and evaluates them.
inline std::vector<harlab::EvalReport> report(const std::vector<fs::path>& dataset_dirs, const PipelineConfig& cfg,
                                              const fs::path& out_dir, const std::vector<std::string>& protocols = {}) {
  const auto windows = load_windows(dataset_dirs, cfg.imusynth.placements, cfg.imusynth.rate, cfg.evaluation.window_s,
                                    cfg.evaluation.overlap);
  if (windows.empty()) throw DataError("no IMU windows found in the given dataset directories");
  return run_report(windows, cfg, out_dir, protocols);
}

}  // namespace imutube::pipeline
