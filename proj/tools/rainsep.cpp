#include "rainsep/detection.hpp"
#include "rainsep/metrics.hpp"
#include "rainsep/morphology.hpp"
#include "rainsep/raster.hpp"
#include "rainsep/run_config.hpp"
#include "rainsep/separation.hpp"
#include "rainsep/synthesis.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace {

using namespace rainsep;

// exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

/// Defers renames until every output encoded cleanly, so a failing command
/// never leaves new files behind.
class OutputStager {
 public:
  std::string stage(const std::string& final_path) {
    staged_.emplace_back(final_path + ".stage", final_path);
    return staged_.back().first;
  }

  void commit() {
    for (const auto& [tmp, final_path] : staged_)
      if (std::rename(tmp.c_str(), final_path.c_str()) != 0)
        throw IoError("cannot move staged output onto '" + final_path + "'");
    staged_.clear();
  }

  ~OutputStager() {
    for (const auto& [tmp, final_path] : staged_) std::remove(tmp.c_str());
  }

 private:
  std::vector<std::pair<std::string, std::string>> staged_;
};

struct ConfigCli {
  std::string config_path;
  // registration order preserved so later flags override earlier ones predictably
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value configuration file");
    static const char* kKeys[] = {
        "detection.window_side", "detection.kmeans_iters", "detection.T1",
        "detection.T2",          "detection.mu",           "detection.c",
        "separation.lambda",     "separation.eta",         "separation.irls_iters",
        "separation.epsilon_irls", "separation.solver_tol", "separation.clamp_rain",
        "synth.seed",            "synth.streak_count",     "synth.angle_mean",
        "synth.angle_jitter",    "synth.length_min",       "synth.length_max",
        "synth.thickness_min",   "synth.thickness_max",    "synth.intensity_min",
        "synth.intensity_max",   "synth.blur_sigma"};
    for (const char* key : kKeys)
      options.emplace_back(key, cmd->add_option("--" + std::string(key), values[key]));
  }

  /// flag > config file > built-in default
  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, option] : options)
      if (option->count() > 0) cfg.set(key, values.at(key));
    cfg.validate();
    return cfg;
  }
};

void write_report(const std::string& path, const DetectionTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report file '" + path + "'");
  const auto survivor_set = [](const std::vector<int>& ids) {
    return std::unordered_set<int>(ids.begin(), ids.end());
  };
  const auto width = survivor_set(trace.after_width);
  const auto direction = survivor_set(trace.after_direction);
  const auto color = survivor_set(trace.after_color);
  const auto aspect = survivor_set(trace.after_aspect);

  out << "# id N lambda1 lambda2 D W survived-stage\n";
  for (size_t p = 0; p < trace.stats.size(); ++p) {
    const int id = int(p);
    const char* stage = "kept";
    if (!width.contains(id)) stage = "width";
    else if (!direction.contains(id)) stage = "direction";
    else if (!color.contains(id)) stage = "color";
    else if (!aspect.contains(id)) stage = "aspect";
    const auto& s = trace.stats[p];
    out << id + 1 << ' ' << trace.labeling.pixel_lists[p].size() << ' ' << s.lambda1 << ' '
        << s.lambda2 << ' ' << s.direction_degrees << ' ' << s.width << ' ' << stage << '\n';
  }
  if (!out) throw IoError("failed writing report file '" + path + "'");
}

int cmd_detect(const std::string& input, const std::string& out_mask, const std::string& report,
               const ConfigCli& cli) {
  const RunConfig cfg = cli.resolve();
  const Raster image = load_png(input);
  const DetectionTrace trace = detect_rain_traced(image, cfg.detection);

  OutputStager stager;
  save_mask_png(stager.stage(out_mask), trace.final_mask);
  if (!report.empty()) write_report(stager.stage(report), trace);
  stager.commit();
  return kExitOk;
}

int cmd_derain(const std::string& input, const std::string& output, const std::string& rain_out,
               const std::string& mask_out, const ConfigCli& cli) {
  const RunConfig cfg = cli.resolve();
  const Raster image = load_png(input);

  const auto start = std::chrono::steady_clock::now();
  const Mask rain_mask = detect_rain(image, cfg.detection);
  std::vector<ChannelSolveInfo> info;
  const LayerPair layers = separate_layers(image, rain_mask, cfg.separation, &info);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  for (const auto& channel : info)
    if (channel.anchored_all_pixels)
      std::cerr << "warning: rain mask covers every pixel; anchoring all pixels\n";
  std::fprintf(stderr, "derain: %.2f s\n", elapsed.count());

  OutputStager stager;
  save_png(stager.stage(output), layers.background);
  if (!rain_out.empty()) save_png(stager.stage(rain_out), layers.rain);
  if (!mask_out.empty()) save_mask_png(stager.stage(mask_out), rain_mask);
  stager.commit();
  return kExitOk;
}

int cmd_synth(const std::string& clean_path, const std::string& rainy_path,
              const std::string& mask_path, const ConfigCli& cli) {
  const RunConfig cfg = cli.resolve();
  const Raster clean = load_png(clean_path);
  const SynthResult result = synth_rain(clean, cfg.synth);

  OutputStager stager;
  save_png(stager.stage(rainy_path), result.rainy);
  save_mask_png(stager.stage(mask_path), result.truth);
  stager.commit();
  return kExitOk;
}

int cmd_eval(const std::string& clean_path, const std::string& test_path) {
  const Raster clean = load_png(clean_path);
  const Raster test = load_png(test_path);
  const QualityReport report = evaluate_quality(clean, test);
  std::printf("PSNR=%.2fdB SSIM=%.4f\n", report.psnr_db, report.ssim);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-image rain streak removal (detection + L1 layer separation)"};
  app.require_subcommand(1);

  std::string input, output, mask_path, rain_path, report_path, clean_path, test_path;

  auto* detect = app.add_subcommand("detect", "write the detected rain-location mask");
  detect->add_option("input", input, "input RGB PNG")->required();
  detect->add_option("mask", output, "output mask PNG")->required();
  detect->add_option("--report", report_path, "per-component text report");
  ConfigCli detect_cfg;
  detect_cfg.attach(detect);

  auto* derain = app.add_subcommand("derain", "detect rain and write the rain-removed image");
  derain->add_option("input", input, "input RGB PNG")->required();
  derain->add_option("output", output, "rain-removed output PNG")->required();
  derain->add_option("--rain-layer", rain_path, "also write the rain layer PNG");
  derain->add_option("--mask", mask_path, "also write the detected mask PNG");
  ConfigCli derain_cfg;
  derain_cfg.attach(derain);

  auto* synth = app.add_subcommand("synth", "render synthetic rain onto a clean image");
  synth->add_option("clean", clean_path, "clean input PNG")->required();
  synth->add_option("rainy", output, "rainy output PNG")->required();
  synth->add_option("mask", mask_path, "ground-truth streak mask PNG")->required();
  ConfigCli synth_cfg;
  synth_cfg.attach(synth);

  auto* eval = app.add_subcommand("eval", "print PSNR/SSIM of a test image against a reference");
  eval->add_option("reference", clean_path, "reference PNG")->required();
  eval->add_option("test", test_path, "test PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (detect->parsed()) return cmd_detect(input, output, report_path, detect_cfg);
    if (derain->parsed()) return cmd_derain(input, output, rain_path, mask_path, derain_cfg);
    if (synth->parsed()) return cmd_synth(clean_path, output, mask_path, synth_cfg);
    if (eval->parsed()) return cmd_eval(clean_path, test_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
