// Minimal end-to-end run: generate a few synthetic clips, turn the tracked
// person into virtual IMU streams, and compare training on real vs virtual data.
//
//   ./quickstart [output-dir]

#include <iostream>

#include <spdlog/spdlog.h>

#include "imutube/imutube.hpp"

int main(int argc, char** argv) {
  using namespace imutube;
  using namespace imutube::pipeline;
  spdlog::set_level(spdlog::level::warn);

  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "imutube_quickstart";
  fs::remove_all(out);

  SynthSpec spec;
  spec.scenarios = {Scenario::still, Scenario::walk, Scenario::arm_wave};
  spec.subjects = 3;
  spec.duration_s = 8.0;
  spec.width = 64;
  spec.height = 48;
  spec.seed = 7;
  const auto gen = generate_synthetic(spec, out / "data");
  std::cout << "generated " << gen.manifests.size() << " clips\n";

  PipelineConfig cfg;
  cfg.imusynth.placements = spec.placements;
  std::vector<fs::path> manifests = find_manifests(out / "data");
  const RunSummary run = run_pipeline(manifests, cfg, out / "virtual");
  std::cout << "pipeline: " << run.ok << " ok, " << run.failed << " failed, " << run.outputs << " IMU files\n";

  try {
    const auto reports = report({out / "data", out / "virtual"}, cfg, out / "report", {"R2R", "V2R"});
    for (const auto& r : reports) std::cout << harlab::report_text(r) << "\n";
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::cout << "outputs under " << out.string() << "\n";
}
