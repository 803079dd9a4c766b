#include "hyperghost/detection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyperghost/parallel.hpp"

namespace hyperghost {

void DetectorConfig::validate() const {
  if (frames < 1) throw Error(ErrorCode::invalid_argument, "detector.frames must be >= 1");
  if (!(exposure_s > 0)) throw Error(ErrorCode::invalid_argument, "detector.exposure_s must be > 0");
  if (!(flux_scale > 0)) throw Error(ErrorCode::invalid_argument, "detector.flux_scale must be > 0");
  if (!(dark_rate >= 0)) throw Error(ErrorCode::invalid_argument, "detector.dark_rate must be >= 0");
  if (threshold < 1) throw Error(ErrorCode::invalid_argument, "detector.threshold must be >= 1");
  if (!(saturation_quantile > 0) || saturation_quantile > 1)
    throw Error(ErrorCode::invalid_argument, "detector.saturation_quantile must be in (0, 1]");
}

double poisson_cdf(int k, double mean) {
  if (k < 0) return 0.0;
  if (mean <= 0) return 1.0;
  double term = std::exp(-mean);
  double sum = term;
  for (int i = 1; i <= k; ++i) {
    term *= mean / i;
    sum += term;
  }
  return std::min(sum, 1.0);
}

int poisson_by_inversion(double u, double mean) {
  if (mean <= 0) return 0;
  double term = std::exp(-mean);
  double cdf = term;
  int k = 0;
  while (cdf < u && term > 0) {
    ++k;
    term *= mean / k;
    cdf += term;
  }
  return k;
}

double detection_probability(double mean, int threshold) { return 1.0 - poisson_cdf(threshold - 1, mean); }

double expected_gray_value(double mean, const DetectorConfig& config) {
  if (config.model == DetectorModel::ideal) return config.frames * mean;
  return config.frames * detection_probability(mean, config.threshold);
}

namespace {

GrayImage acquire_means(const Image& means, const DetectorConfig& config, std::uint64_t stream, Provenance tag) {
  config.validate();
  GrayImage out{Image::Zero(means.rows(), means.cols()), tag};
  if (config.model == DetectorModel::ideal) {
    out.values = means * double(config.frames);
    return out;
  }
  std::vector<std::uint64_t> keys(std::size_t(config.frames));
  for (int f = 0; f < config.frames; ++f) keys[std::size_t(f)] = frame_key(config.seed, stream, std::uint64_t(f));

  const Eigen::Index cols = means.cols();
  parallel_for(0, std::size_t(means.rows()), [&](std::size_t row) {
    for (Eigen::Index col = 0; col < cols; ++col) {
      const double mean = means(Eigen::Index(row), col);
      if (!(mean > 0)) continue;
      // Inversion sampling: events >= threshold exactly when u > F(threshold - 1).
      const double below = poisson_cdf(config.threshold - 1, mean);
      const std::uint64_t pixel = std::uint64_t(row) * std::uint64_t(cols) + std::uint64_t(col);
      int hits = 0;
      for (const std::uint64_t key : keys) hits += counter_uniform(key, pixel) > below;
      out.values(Eigen::Index(row), col) = hits;
    }
  });
  return out;
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

GrayImage simulate_acquisition_scaled(const Image& rate_map, const DetectorConfig& config, double reference_max,
                                      std::uint64_t stream) {
  if ((rate_map < 0).any()) throw Error(ErrorCode::invalid_argument, "rate map must be nonnegative");
  if (reference_max < 0) throw Error(ErrorCode::invalid_argument, "reference maximum must be nonnegative");
  const double scale = reference_max > 0 ? config.flux_scale / reference_max : 0.0;
  return acquire_means(rate_map * scale + config.dark_rate, config, stream, Provenance::raw);
}

GrayImage simulate_acquisition(const Image& rate_map, const DetectorConfig& config, std::uint64_t stream) {
  const double peak = rate_map.size() > 0 ? rate_map.maxCoeff() : 0.0;
  return simulate_acquisition_scaled(rate_map, config, peak, stream);
}

GrayImage background_image(int rows, int cols, const DetectorConfig& config, std::uint64_t stream) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::invalid_argument, "background dimensions must be positive");
  return acquire_means(Image::Constant(rows, cols, config.dark_rate), config, stream, Provenance::background);
}

GrayImage subtract_background(const GrayImage& raw, const GrayImage& bg, double saturation_quantile) {
  if (raw.values.rows() != bg.values.rows() || raw.values.cols() != bg.values.cols())
    throw Error(ErrorCode::dimension_mismatch, "raw and background images differ in size");
  if (!(saturation_quantile > 0) || saturation_quantile > 1)
    throw Error(ErrorCode::invalid_argument, "saturation quantile must be in (0, 1]");
  const Image diff = (raw.values - bg.values).max(0.0);
  GrayImage out{diff, Provenance::subtracted};
  if (saturation_quantile >= 1 || diff.size() == 0) return out;

  std::vector<double> sorted(diff.data(), diff.data() + diff.size());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = std::size_t(std::ceil(saturation_quantile * double(sorted.size())));
  const double cutoff = sorted[std::max<std::size_t>(rank, 1) - 1];

  const Eigen::Index rows = diff.rows(), cols = diff.cols();
  std::vector<double> window;
  window.reserve(9);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(diff(r, c) > cutoff)) continue;
      window.clear();
      for (Eigen::Index dr = -1; dr <= 1; ++dr)
        for (Eigen::Index dc = -1; dc <= 1; ++dc)
          if (r + dr >= 0 && r + dr < rows && c + dc >= 0 && c + dc < cols) window.push_back(diff(r + dr, c + dc));
      out.values(r, c) = median_of(window);
    }
  }
  return out;
}

}  // namespace hyperghost
