#pragma once

// Flat key = value experiment configuration with dotted sections, e.g.
//
//   state.alpha = 0.43
//   detector.frames = 2500
//
// Unknown or duplicate keys are rejected. serialize_config writes every key
// with its resolved value in a fixed order.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperghost/analysis.hpp"

namespace hyperghost {

enum class SpectrumModel { flat, gaussian };
enum class ObjectSource { double_slit, file };

struct ExperimentConfig {
  double alpha{0.43};
  double beta{0.9};
  double phi_deg{180.0};
  std::optional<double> theta0_deg;  ///< analyzer overrides; both or neither
  std::optional<double> theta1_deg;

  int grid_n{256};
  double half_extent_mm{0.9};
  std::optional<double> waist_mm;  ///< defaults to GridSpec::kWaistFraction * half extent

  Truncation truncation{10, 6};

  SpectrumModel spectrum{SpectrumModel::flat};
  double sigma_ell{5.0};
  double radial_ratio{0.8};

  ObjectSource object_source{ObjectSource::double_slit};
  std::string object_path;
  double slit_width_um{275.0};
  double slit_height_um{1275.0};
  double separation_um{550.0};

  std::vector<Roi> rois;  ///< empty: derived from the object

  DetectorConfig detector;
  int histogram_bins{40};

  GridSpec grid() const;
  void validate() const;
};

/// Applies key = value lines on top of base.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
std::string serialize_config(const ExperimentConfig& config);

/// "noise-free" or "paper-noisy".
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

std::string format_rois(const std::vector<Roi>& rois);
std::vector<Roi> parse_rois(std::string_view text);

}  // namespace hyperghost
