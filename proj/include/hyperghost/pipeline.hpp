#pragma once

// calibrate -> image -> acquire -> analyze, and the on-disk artifact bundle.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hyperghost/config.hpp"
#include "hyperghost/image_io.hpp"

namespace hyperghost {

/// Channel slots used throughout the pipeline: ch1..ch4, hh, vv.
inline constexpr std::array<Channel, 6> kPipelineChannels{Channel::a0_b0,    Channel::abar0_b1, Channel::a1_bbar0,
                                                          Channel::a1_b1,    Channel::hh,       Channel::vv};

enum class AngleMethod { closed_form, numeric, override_ };

struct Scene {
  ExperimentConfig config;
  PolarizationState<double> state;
  HardyAngles<double> angles;
  AngleMethod angle_method{AngleMethod::closed_form};
  double angle_residual{0};
  ObjectField object;
  ObjectMask mask;
  std::vector<Roi> rois;
  bool slit_merged{false};
  ModeDecomposition decomposition;
  ModeDecomposition idler;
  Image spatial;
  std::array<double, 6> channel_probabilities{};
  std::array<Image, 6> rate_maps;
};

struct Acquisition {
  double reference_max{0};
  std::array<GrayImage, 6> raw;
  std::array<GrayImage, 6> background;
  std::array<GrayImage, 6> subtracted;
};

struct AnalysisResult {
  std::array<std::optional<double>, 4> cnr;
  std::array<std::optional<double>, 4> cnr_difference;
  HardyReport report;
  Histogram histogram;
};

/// Resolves the state and analyzer angles without touching the spatial part.
void resolve_polarization(const ExperimentConfig& config, PolarizationState<double>& state, HardyAngles<double>& angles,
                          AngleMethod& method, double& residual);

Scene prepare_scene(const ExperimentConfig& config);
Acquisition acquire(const Scene& scene);
AnalysisResult analyze(const std::array<GrayImage, 6>& images, const ObjectMask& mask, std::span<const Roi> rois,
                       int histogram_bins);

/// Every resolved parameter plus derived quantities, as key = value lines.
std::string manifest(const Scene& scene, const Acquisition* acquisition);

void write_scene(const std::filesystem::path& dir, const Scene& scene);
void write_acquisition(const std::filesystem::path& dir, const Acquisition& acquisition);
void write_analysis(const std::filesystem::path& dir, const AnalysisResult& analysis);

struct PipelineOutput {
  Scene scene;
  Acquisition acquisition;
  AnalysisResult analysis;
};

/// Full run; writes the bundle when out_dir is non-empty.
PipelineOutput run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

/// Re-analyzes the subtracted CSV images of an existing bundle.
AnalysisResult analyze_bundle(const std::filesystem::path& bundle_dir, const ExperimentConfig& config);

}  // namespace hyperghost
