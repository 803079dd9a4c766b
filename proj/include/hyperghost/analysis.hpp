#pragma once

// Figures of merit on gray images: CNR, ROI photon sums, Hardy
// probabilities, the macroscopic S witness and its per-pixel map.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperghost/detection.hpp"

namespace hyperghost {

/// Pixel rectangle: columns [x0, x0 + width), rows [y0, y0 + height).
struct Roi {
  int x0{0};
  int y0{0};
  int width{1};
  int height{1};

  int pixel_count() const { return width * height; }
  bool contains(int row, int col) const { return col >= x0 && col < x0 + width && row >= y0 && row < y0 + height; }
  void validate(Eigen::Index rows, Eigen::Index cols) const;
  friend bool operator==(const Roi&, const Roi&) = default;
};

using ObjectMask = ImageT<bool>;

/// Transmissive pixels: |psi| > 0.5.
ObjectMask object_mask(const ObjectField& object);

/// (<G_in> + <G_out>) / sqrt(var_in + var_out) with population variances.
/// Empty when both classes have zero variance.
std::optional<double> cnr(const GrayImage& image, const ObjectMask& mask);

/// Conventional contrast with a difference numerator, (<G_in> - <G_out>) / sqrt(...).
std::optional<double> cnr_difference(const GrayImage& image, const ObjectMask& mask);

double roi_sum(const GrayImage& image, const Roi& roi);

struct PixelValue {
  int row{0};
  int col{0};
  double value{0};
};

struct HardyReport {
  double p_00{0};   ///< P(theta0, theta0)
  double p_b01{0};  ///< P(theta0-bar, theta1)
  double p_1b0{0};  ///< P(theta1, theta0-bar)
  double p_11{0};   ///< P(theta1, theta1)
  double s_value{0};
  double n_total{0};
  /// S_ij over ROI pixels with a nonzero HH+VV total.
  std::vector<PixelValue> s_map;
  /// Every ROI pixel; zero-total pixels contribute S_ij = 0.
  std::vector<PixelValue> s_map_all;
  int roi_pixels{0};
  int excluded_pixels{0};
  /// #{S_ij > 0} / roi_pixels.
  double positive_fraction{0};
};

/// Channels ordered 1..4: (A0,B0), (A0-bar,B1), (A1,B0-bar), (A1,B1).
/// The ROI set is treated as a union.
HardyReport hardy_from_images(const std::array<GrayImage, 4>& channels, const GrayImage& hh, const GrayImage& vv,
                              std::span<const Roi> rois);
HardyReport hardy_from_images(const std::array<GrayImage, 4>& channels, const GrayImage& hh, const GrayImage& vv,
                              const Roi& roi);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 entries
  std::vector<int> counts;
};

Histogram s_histogram(const HardyReport& report, int bins);

/// Fraction of s_map entries with lo < S_ij <= hi.
double s_band_fraction(const HardyReport& report, double lo, double hi);

void write_report(std::ostream& os, const HardyReport& report);
void write_pixel_csv(std::ostream& os, std::span<const PixelValue> values);
void write_histogram_csv(std::ostream& os, const Histogram& histogram);

}  // namespace hyperghost
