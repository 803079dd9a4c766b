#pragma once

// Heralded, gated camera model: per-frame Poisson photon events from a rate
// map, binarized by the intensifier threshold and accumulated over frames.

#include <cstdint>

#include "hyperghost/spatial_modes.hpp"

namespace hyperghost {

enum class DetectorModel {
  thresholded_poisson,  ///< per-frame Poisson events, binarized, summed
  ideal,                ///< expected linear counts frames * mean; no shot noise
};

struct DetectorConfig {
  int frames{2500};
  double exposure_s{5.0};
  double flux_scale{0.05};  ///< mean signal events per frame at the reference maximum
  double dark_rate{0.0};    ///< mean dark events per pixel per frame
  int threshold{1};         ///< events in a frame needed to register a count
  double saturation_quantile{0.999};
  std::uint64_t seed{0};
  DetectorModel model{DetectorModel::thresholded_poisson};

  void validate() const;
};

enum class Provenance { raw, background, subtracted };

struct GrayImage {
  Image values;
  Provenance provenance{Provenance::raw};
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Key of the (seed, stream, frame) substream; pixels are counters within it.
constexpr std::uint64_t frame_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t frame) {
  return splitmix64(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL)) ^ frame);
}

/// Uniform in [0, 1) for one pixel of one frame.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t pixel) {
  return double(splitmix64(key ^ splitmix64(pixel)) >> 11) * 0x1.0p-53;
}

double poisson_cdf(int k, double mean);

/// Smallest k with F(k) >= u.
int poisson_by_inversion(double u, double mean);

/// P(events >= threshold) for one frame.
double detection_probability(double mean, int threshold);

/// frames * P(events >= threshold): the mean gray value of a pixel.
double expected_gray_value(double mean, const DetectorConfig& config);

/// Rate map scaled so reference_max maps to flux_scale, plus dark events.
/// Streams separate acquisitions that share a seed.
GrayImage simulate_acquisition_scaled(const Image& rate_map, const DetectorConfig& config, double reference_max,
                                      std::uint64_t stream = 0);

/// Normalizes by the map's own maximum.
GrayImage simulate_acquisition(const Image& rate_map, const DetectorConfig& config, std::uint64_t stream = 0);

/// Dark events only, as recorded with a deliberately wrong gate delay.
GrayImage background_image(int rows, int cols, const DetectorConfig& config, std::uint64_t stream = 0);

/// raw - bg clamped at 0; pixels above the saturation quantile of the result
/// are replaced by their 3x3 median. A quantile of 1 disables replacement.
GrayImage subtract_background(const GrayImage& raw, const GrayImage& bg, double saturation_quantile = 0.999);

}  // namespace hyperghost
