// hyperghost: command-line front end.
//
//   hyperghost optimize
//   hyperghost angles --alpha 0.43 --beta 0.9
//   hyperghost image   --preset noise-free --out out/
//   hyperghost acquire --preset paper-noisy --seed 7 --out out/
//   hyperghost analyze --in out/ --preset paper-noisy
//   hyperghost run     --config exp.cfg --set detector.frames=500 --out out/

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperghost/parallel.hpp"
#include "hyperghost/pipeline.hpp"
#include "hyperghost/text_format.hpp"

namespace hg = hyperghost;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  unsigned threads{0};
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_out) {
  cmd->add_option("--config", o.config_path, "key = value experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "start from a named preset")->check(CLI::IsMember(hg::preset_names()));
  cmd->add_option("--set", o.settings, "override one config key (key=value), repeatable");
  cmd->add_option("--seed", o.seed, "detector seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  auto* out = cmd->add_option("--out", o.out_dir, "output directory");
  if (needs_out) out->required();
}

hg::ExperimentConfig build_config(const CommonOptions& o) {
  hg::ExperimentConfig cfg = o.preset.empty() ? hg::ExperimentConfig{} : hg::preset(o.preset);
  if (!o.config_path.empty()) cfg = hg::parse_config(hg::read_text_file(o.config_path), cfg);
  for (const std::string& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw hg::Error(hg::ErrorCode::invalid_config, "--set expects key=value, got '" + s + "'");
    hg::apply_setting(cfg, std::string_view(s).substr(0, eq), std::string_view(s).substr(eq + 1));
  }
  if (o.seed) cfg.detector.seed = *o.seed;
  cfg.validate();
  return cfg;
}

void print_summary(const hg::AnalysisResult& a) {
  write_report(std::cout, a.report);
  for (std::size_t m = 0; m < 4; ++m)
    std::cout << "cnr." << hg::channel_name(hg::kPipelineChannels[m]) << " = "
              << (a.cnr[m] ? hg::format_double(*a.cnr[m]) : "undefined") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyper-entangled ghost imaging and Hardy nonlocality simulator"};
  app.require_subcommand(1);

  auto* optimize = app.add_subcommand("optimize", "maximize the Hardy probability over alpha");
  double tolerance = 1e-12;
  optimize->add_option("--tolerance", tolerance, "golden-section bracket width")->check(CLI::PositiveNumber);

  auto* angles = app.add_subcommand("angles", "analyzer angles for a state alpha|HH> - beta|VV>");
  double alpha = 0.43, beta = 0.9;
  angles->add_option("--alpha", alpha, "HH amplitude");
  angles->add_option("--beta", beta, "VV amplitude");

  CommonOptions image_opts, acquire_opts, analyze_opts, run_opts;
  auto* image = app.add_subcommand("image", "noise-free channel images");
  add_common(image, image_opts, true);
  auto* acquire = app.add_subcommand("acquire", "Monte Carlo camera acquisition");
  add_common(acquire, acquire_opts, true);
  auto* analyze = app.add_subcommand("analyze", "Hardy report and CNR from a saved bundle");
  add_common(analyze, analyze_opts, false);
  std::string in_dir;
  analyze->add_option("--in", in_dir, "bundle written by acquire or run")->required()->check(CLI::ExistingDirectory);
  auto* run = app.add_subcommand("run", "full pipeline");
  add_common(run, run_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << hg::to_string(hg::ErrorCode::invalid_argument) << ": " << e.what() << '\n';
    return 2;
  }

  try {
    if (*optimize) {
      const auto best = hg::optimize_hardy(tolerance);
      std::cout << "alpha = " << hg::format_double(best.alpha) << '\n'
                << "beta = " << hg::format_double(best.beta) << '\n'
                << "theta0_deg = " << hg::format_double(hg::degrees(best.angles.theta0)) << '\n'
                << "theta1_deg = " << hg::format_double(hg::degrees(best.angles.theta1)) << '\n'
                << "probability = " << hg::format_double(best.probability) << '\n';
    } else if (*angles) {
      const auto a = hg::solve_hardy_angles(alpha, beta);
      std::cout << "theta0_deg = " << hg::format_double(hg::degrees(a.theta0)) << '\n'
                << "theta1_deg = " << hg::format_double(hg::degrees(a.theta1)) << '\n'
                << "barred_theta0_deg = " << hg::format_double(hg::degrees(a.barred_theta0())) << '\n'
                << "barred_theta1_deg = " << hg::format_double(hg::degrees(a.barred_theta1())) << '\n'
                << "hardy_probability = " << hg::format_double(hg::hardy_probability(alpha, beta)) << '\n';
      const auto state = hg::PolarizationState<double>::from_hardy(alpha, beta, hg::radians(180.0));
      std::cout << "p11_normalized = "
                << hg::format_double(hg::channel_probability(state, a, hg::Channel::a1_b1)) << '\n';
    } else if (*image) {
      const auto cfg = build_config(image_opts);
      hg::set_thread_count(image_opts.threads);
      const hg::Scene scene = hg::prepare_scene(cfg);
      hg::write_scene(image_opts.out_dir, scene);
      hg::write_text_file(std::filesystem::path(image_opts.out_dir) / "manifest.txt", hg::manifest(scene, nullptr));
    } else if (*acquire) {
      const auto cfg = build_config(acquire_opts);
      hg::set_thread_count(acquire_opts.threads);
      const hg::Scene scene = hg::prepare_scene(cfg);
      const hg::Acquisition acq = hg::acquire(scene);
      hg::write_scene(acquire_opts.out_dir, scene);
      hg::write_acquisition(acquire_opts.out_dir, acq);
      hg::write_text_file(std::filesystem::path(acquire_opts.out_dir) / "manifest.txt", hg::manifest(scene, &acq));
    } else if (*analyze) {
      const auto cfg = build_config(analyze_opts);
      hg::set_thread_count(analyze_opts.threads);
      const auto result = hg::analyze_bundle(in_dir, cfg);
      hg::write_analysis(analyze_opts.out_dir.empty() ? in_dir : analyze_opts.out_dir, result);
      print_summary(result);
    } else if (*run) {
      const auto cfg = build_config(run_opts);
      hg::set_thread_count(run_opts.threads);
      const auto out = hg::run_pipeline(cfg, run_opts.out_dir);
      print_summary(out.analysis);
    }
  } catch (const hg::Error& e) {
    std::cerr << "error: " << hg::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << hg::to_string(hg::ErrorCode::io_error) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
