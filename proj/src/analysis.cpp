#include "hyperghost/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hyperghost/text_format.hpp"

namespace hyperghost {

namespace {

struct ClassStats {
  double mean_in{0}, mean_out{0}, var_in{0}, var_out{0};
};

ClassStats class_stats(const GrayImage& image, const ObjectMask& mask) {
  if (image.values.rows() != mask.rows() || image.values.cols() != mask.cols())
    throw Error(ErrorCode::dimension_mismatch, "mask and image differ in size");
  const Eigen::Index n_in = mask.count();
  const Eigen::Index n_out = mask.size() - n_in;
  if (n_in < 2 || n_out < 2) throw Error(ErrorCode::invalid_argument, "CNR needs at least two pixels in each class");
  ClassStats s;
  const Image& v = image.values;
  s.mean_in = mask.select(v, 0.0).sum() / double(n_in);
  s.mean_out = mask.select(0.0, v).sum() / double(n_out);
  s.var_in = mask.select((v - s.mean_in).square(), 0.0).sum() / double(n_in);
  s.var_out = mask.select(0.0, (v - s.mean_out).square()).sum() / double(n_out);
  return s;
}

void check_same_size(const GrayImage& a, const GrayImage& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw Error(ErrorCode::dimension_mismatch, "images differ in size");
}

}  // namespace

void Roi::validate(Eigen::Index rows, Eigen::Index cols) const {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "ROI must cover at least one pixel");
  if (x0 < 0 || y0 < 0 || x0 + width > cols || y0 + height > rows)
    throw Error(ErrorCode::invalid_argument, "ROI extends outside the image");
}

ObjectMask object_mask(const ObjectField& object) { return object.values().abs() > 0.5; }

std::optional<double> cnr(const GrayImage& image, const ObjectMask& mask) {
  const ClassStats s = class_stats(image, mask);
  const double noise = std::sqrt(s.var_in + s.var_out);
  if (!(noise > 0)) return std::nullopt;
  return (s.mean_in + s.mean_out) / noise;
}

std::optional<double> cnr_difference(const GrayImage& image, const ObjectMask& mask) {
  const ClassStats s = class_stats(image, mask);
  const double noise = std::sqrt(s.var_in + s.var_out);
  if (!(noise > 0)) return std::nullopt;
  return (s.mean_in - s.mean_out) / noise;
}

double roi_sum(const GrayImage& image, const Roi& roi) {
  roi.validate(image.values.rows(), image.values.cols());
  return image.values.block(roi.y0, roi.x0, roi.height, roi.width).sum();
}

HardyReport hardy_from_images(const std::array<GrayImage, 4>& channels, const GrayImage& hh, const GrayImage& vv,
                              std::span<const Roi> rois) {
  for (const auto& c : channels) check_same_size(c, hh);
  check_same_size(vv, hh);
  if (rois.empty()) throw Error(ErrorCode::invalid_argument, "at least one ROI is required");
  const Eigen::Index rows = hh.values.rows(), cols = hh.values.cols();
  ObjectMask in_roi = ObjectMask::Constant(rows, cols, false);
  for (const Roi& roi : rois) {
    roi.validate(rows, cols);
    in_roi.block(roi.y0, roi.x0, roi.height, roi.width) = true;
  }

  const Image total = hh.values + vv.values;
  HardyReport report;
  report.n_total = in_roi.select(total, 0.0).sum();
  if (!(report.n_total > 0)) throw Error(ErrorCode::no_report, "HH+VV total over the ROI is zero");

  std::array<double, 4> p{};
  for (std::size_t m = 0; m < 4; ++m) p[m] = in_roi.select(channels[m].values, 0.0).sum() / report.n_total;
  report.p_00 = p[0];
  report.p_b01 = p[1];
  report.p_1b0 = p[2];
  report.p_11 = p[3];
  report.s_value = p[3] - p[1] - p[2] - p[0];

  int positive = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!in_roi(r, c)) continue;
      ++report.roi_pixels;
      const double t = total(r, c);
      if (!(t > 0)) {
        ++report.excluded_pixels;
        report.s_map_all.push_back({int(r), int(c), 0.0});
        continue;
      }
      const double s = (channels[3].values(r, c) - channels[1].values(r, c) - channels[2].values(r, c) -
                        channels[0].values(r, c)) /
                       t;
      report.s_map.push_back({int(r), int(c), s});
      report.s_map_all.push_back({int(r), int(c), s});
      positive += s > 0;
    }
  }
  report.positive_fraction = double(positive) / report.roi_pixels;
  return report;
}

HardyReport hardy_from_images(const std::array<GrayImage, 4>& channels, const GrayImage& hh, const GrayImage& vv,
                              const Roi& roi) {
  return hardy_from_images(channels, hh, vv, std::span<const Roi>(&roi, 1));
}

Histogram s_histogram(const HardyReport& report, int bins) {
  if (bins < 1) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");
  if (report.s_map.empty()) throw Error(ErrorCode::invalid_argument, "S map is empty");
  const auto [lo_it, hi_it] = std::minmax_element(report.s_map.begin(), report.s_map.end(),
                                                  [](const auto& a, const auto& b) { return a.value < b.value; });
  double lo = lo_it->value, hi = hi_it->value;
  if (!(hi > lo)) {
    const double pad = 1e-12 * std::max(1.0, std::abs(lo));
    lo -= pad;
    hi += pad;
  }
  Histogram h;
  h.edges.resize(std::size_t(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[std::size_t(b)] = lo + (hi - lo) * b / bins;
  h.counts.assign(std::size_t(bins), 0);
  for (const auto& px : report.s_map) {
    auto b = int(std::floor((px.value - lo) / (hi - lo) * bins));
    h.counts[std::size_t(std::clamp(b, 0, bins - 1))] += 1;
  }
  return h;
}

double s_band_fraction(const HardyReport& report, double lo, double hi) {
  if (report.s_map.empty()) return 0.0;
  const auto n = std::count_if(report.s_map.begin(), report.s_map.end(),
                               [&](const auto& px) { return px.value > lo && px.value <= hi; });
  return double(n) / double(report.s_map.size());
}

void write_report(std::ostream& os, const HardyReport& r) {
  os << "p_00 = " << format_double(r.p_00) << '\n'
     << "p_b01 = " << format_double(r.p_b01) << '\n'
     << "p_1b0 = " << format_double(r.p_1b0) << '\n'
     << "p_11 = " << format_double(r.p_11) << '\n'
     << "s_value = " << format_double(r.s_value) << '\n'
     << "n_total = " << format_double(r.n_total) << '\n'
     << "roi_pixels = " << r.roi_pixels << '\n'
     << "excluded_pixels = " << r.excluded_pixels << '\n'
     << "positive_pixels = " << std::llround(r.positive_fraction * r.roi_pixels) << '\n'
     << "positive_fraction = " << format_double(r.positive_fraction) << '\n';
}

void write_pixel_csv(std::ostream& os, std::span<const PixelValue> values) {
  os << "row,col,s\n";
  for (const auto& px : values) os << px.row << ',' << px.col << ',' << format_double(px.value) << '\n';
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    os << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
}

}  // namespace hyperghost
