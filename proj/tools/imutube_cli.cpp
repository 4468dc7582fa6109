// imutube: command-line front end.
//
//   imutube synth-gen      generate a synthetic clip set (stage inputs + reference IMU)
//   imutube run            clips -> virtual IMU streams
//   imutube distmap-fit    fit a virtual->real distribution map
//   imutube distmap-apply  apply a map to IMU streams
//   imutube evaluate       LOSO evaluation of one protocol
//   imutube report         LOSO evaluation of several protocols plus a summary
//
// Exit codes: 0 success, 1 configuration or usage error, 2 data error,
// 3 partial failure (some clips skipped, at least one processed).

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "imutube/imutube.hpp"

namespace {

using namespace imutube;
using namespace imutube::pipeline;

enum Exit { kOk = 0, kConfig = 1, kData = 2, kPartial = 3 };

struct Globals {
  std::string config;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string out = "imutube_out";
  std::string log_level = "info";
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.workers) {
    if (*g.workers < 1) throw ConfigError("--workers must be at least 1");
    cfg.workers = *g.workers;
  }
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

/// Per-placement-channel samples of every stream of the given origin.
std::map<std::string, std::vector<double>> channel_samples(const std::vector<imusynth::IMUStream>& streams) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& s : streams) {
    const auto names = harlab::channel_names({s.placement});
    const std::vector<Vec3>* groups[3] = {&s.accel, &s.gyro, &s.mag};
    for (int g = 0; g < 3; ++g)
      for (int a = 0; a < 3; ++a) {
        auto& dst = out[names[static_cast<std::size_t>(3 * g + a)]];
        for (const auto& v : *groups[g]) dst.push_back(v[a]);
      }
  }
  return out;
}

std::vector<imusynth::IMUStream> load_streams(const std::vector<fs::path>& dirs) {
  std::vector<imusynth::IMUStream> out;
  for (const auto& d : dirs)
    for (const auto& f : find_imu_files(d)) out.push_back(load_imu_checked(f));
  return out;
}

/// Keeps at most `seconds` of each class's streams (whole streams, in path
/// order, the last one truncated).
std::vector<imusynth::IMUStream> limit_per_class(std::vector<imusynth::IMUStream> streams, double seconds) {
  if (!(seconds > 0.0)) return streams;
  std::map<std::pair<std::string, std::string>, double> used;
  std::vector<imusynth::IMUStream> out;
  for (auto& s : streams) {
    double& u = used[{s.label, s.placement}];
    const double left = seconds - u;
    if (left <= 0.0) continue;
    const auto keep = std::min(s.size(), static_cast<std::size_t>(std::floor(left * s.rate)) + 1);
    s.accel.resize(keep);
    s.gyro.resize(keep);
    s.mag.resize(keep);
    u += static_cast<double>(keep) / s.rate;
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_synth_gen(const Globals& g, const SynthSpec& spec_in) {
  const PipelineConfig cfg = resolve_config(g);
  SynthSpec spec = spec_in;
  spec.seed = cfg.seed;
  spec.placements = cfg.imusynth.placements;
  const auto out = generate_synthetic(spec, g.out);
  spdlog::info("wrote {} clips and {} reference streams to {}", out.manifests.size(), out.real_imu.size(), g.out);
  return kOk;
}

int cmd_run(const Globals& g, const std::vector<std::string>& inputs) {
  const PipelineConfig cfg = resolve_config(g);
  std::vector<fs::path> manifests;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      const auto found = find_manifests(p);
      manifests.insert(manifests.end(), found.begin(), found.end());
    } else {
      manifests.push_back(p);
    }
  }
  const auto s = run_pipeline(manifests, cfg, g.out);
  std::cout << "clips: " << s.clips.size() << "  ok: " << s.ok << "  failed: " << s.failed
            << "  warnings: " << s.warnings << "  imu files: " << s.outputs << "\n";
  for (const auto& c : s.clips)
    if (!c.ok) std::cout << "  skipped " << c.clip_id << " [" << c.failed_stage << "] " << c.error << "\n";
  std::cout << "provenance: " << s.provenance.string() << "\n";
  if (s.ok == 0 && s.failed > 0) return kData;
  return s.partial() ? kPartial : kOk;
}

int cmd_distmap_fit(const Globals& g, const std::vector<std::string>& virt_dirs, const std::vector<std::string>& real_dirs,
                    double budget_s) {
  resolve_config(g);
  auto virt = load_streams(to_paths(virt_dirs));
  auto real = limit_per_class(load_streams(to_paths(real_dirs)), budget_s);
  std::erase_if(virt, [](const auto& s) { return s.origin != "virtual"; });
  std::erase_if(real, [](const auto& s) { return s.origin != "real"; });
  if (virt.empty() || real.empty()) throw DataError("distmap-fit: need both virtual and real streams");
  const auto vs = channel_samples(virt), rs = channel_samples(real);
  std::vector<std::vector<double>> v, r;
  std::vector<std::string> names;
  for (const auto& [name, samples] : vs) {
    const auto it = rs.find(name);
    if (it == rs.end()) throw DataError("distmap-fit: no real samples for channel '" + name + "'");
    names.push_back(name);
    v.push_back(samples);
    r.push_back(it->second);
  }
  const auto map = distmap::fit_map(v, r, names);
  fs::create_directories(g.out);
  const fs::path path = fs::path(g.out) / "map.json";
  distmap::save_map(path, map);
  std::cout << "fitted " << names.size() << " channels -> " << path.string() << "\n";
  return kOk;
}

int cmd_distmap_apply(const Globals& g, const std::string& map_path, const std::vector<std::string>& dirs) {
  resolve_config(g);
  const auto map = distmap::load_map(map_path);
  std::size_t n = 0;
  for (auto& s : load_streams(to_paths(dirs))) {
    if (s.origin != "virtual") continue;
    imusynth::write_imu(imu_output_path(g.out, s), apply_stream_map(map, s));
    ++n;
  }
  std::cout << "mapped " << n << " streams into " << (fs::path(g.out) / "imu").string() << "\n";
  return kOk;
}

int cmd_evaluate(const Globals& g, const std::vector<std::string>& dirs, const std::vector<std::string>& protocols,
                 bool summary_only) {
  const PipelineConfig cfg = resolve_config(g);
  const auto reports = report(to_paths(dirs), cfg, g.out, protocols);
  for (const auto& r : reports) {
    if (summary_only) {
      std::cout << harlab::to_string(r.protocol) << ": mean macro F1 " << format_number(r.mean_f1) << "\n";
    } else {
      std::cout << harlab::report_text(r) << "\n";
    }
  }
  return kOk;
}

spdlog::level::level_enum parse_level(const std::string& s) {
  const auto lvl = spdlog::level::from_str(s);
  if (lvl == spdlog::level::off && s != "off") throw ConfigError("--log-level: unknown level '" + s + "'");
  return lvl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMU synthesis from pose tracks and activity-recognition evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "pipeline configuration (JSON)");
  app.add_option("--workers", g.workers, "worker threads (overrides config)");
  app.add_option("--seed", g.seed, "random seed (overrides config)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, critical or off")->capture_default_str();

  SynthSpec spec;
  std::vector<std::string> scenarios{"still", "walk", "arm_wave"};
  std::string camera = "static";
  auto* gen = app.add_subcommand("synth-gen", "generate synthetic clips and reference IMU streams");
  gen->add_option("--scenarios", scenarios, "still, walk, run, jump, arm_wave")->capture_default_str();
  gen->add_option("--subjects", spec.subjects)->capture_default_str();
  gen->add_option("--duration", spec.duration_s, "seconds per clip (>= 2)")->capture_default_str();
  gen->add_option("--camera", camera, "static, pan or follow")->capture_default_str();
  gen->add_option("--width", spec.width)->capture_default_str();
  gen->add_option("--height", spec.height)->capture_default_str();
  gen->add_option("--bystanders", spec.bystanders, "motionless extra people")->capture_default_str();
  gen->add_option("--keypoint-noise", spec.keypoint_noise_px, "pixels")->capture_default_str();
  gen->add_option("--pose-noise", spec.pose_noise_m, "meters")->capture_default_str();
  gen->add_flag("!--no-depth", spec.render_depth, "skip depth and color frames");
  gen->add_flag("!--clean-reference", spec.real_sensor_noise, "no sensor noise on the reference streams");

  std::vector<std::string> run_inputs;
  auto* run = app.add_subcommand("run", "process clips into virtual IMU streams");
  run->add_option("inputs", run_inputs, "manifest files or directories to search")->required();

  std::vector<std::string> virt_dirs, real_dirs, map_inputs;
  double budget_s = 0.0;
  auto* fit = app.add_subcommand("distmap-fit", "fit a virtual-to-real distribution map");
  fit->add_option("--virtual", virt_dirs, "directories of virtual streams")->required();
  fit->add_option("--real", real_dirs, "directories of real streams")->required();
  fit->add_option("--budget", budget_s, "real seconds per class and placement (0 = all)")->capture_default_str();

  std::string map_path;
  auto* apply = app.add_subcommand("distmap-apply", "apply a distribution map to virtual streams");
  apply->add_option("--map", map_path)->required();
  apply->add_option("inputs", map_inputs, "directories of virtual streams")->required();

  std::vector<std::string> eval_dirs, eval_protocols;
  std::string protocol = "R2R";
  auto* evaluate = app.add_subcommand("evaluate", "leave-one-subject-out evaluation of one protocol");
  evaluate->add_option("datasets", eval_dirs, "directories of real and virtual streams")->required();
  evaluate->add_option("--protocol", protocol, "R2R, V2R or Mix2R")->capture_default_str();

  std::vector<std::string> report_dirs;
  auto* rep = app.add_subcommand("report", "evaluate several protocols and write a summary");
  rep->add_option("datasets", report_dirs, "directories of real and virtual streams")->required();
  rep->add_option("--protocols", eval_protocols, "defaults to the configured list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    spdlog::set_level(parse_level(g.log_level));
    spdlog::set_pattern("[%l] %v");
    if (gen->parsed()) {
      spec.scenarios.clear();
      for (const auto& s : scenarios) spec.scenarios.push_back(scenario_from_string(s));
      spec.camera = camera_from_string(camera);
      return cmd_synth_gen(g, spec);
    }
    if (run->parsed()) return cmd_run(g, run_inputs);
    if (fit->parsed()) return cmd_distmap_fit(g, virt_dirs, real_dirs, budget_s);
    if (apply->parsed()) return cmd_distmap_apply(g, map_path, map_inputs);
    if (evaluate->parsed()) return cmd_evaluate(g, eval_dirs, {protocol}, false);
    if (rep->parsed()) return cmd_evaluate(g, report_dirs, eval_protocols, true);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kConfig;
}
