#pragma once

// Portable file formats: ASCII "P2" graymaps (with a float-scale sidecar),
// wide CSV image dumps, complex object CSVs, plus the built-in double slit.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperghost/analysis.hpp"

namespace hyperghost {

struct Graymap {
  int width{0};
  int height{0};
  int maxval{255};
  std::vector<int> values;  ///< row-major
};

Graymap read_p2(std::istream& is);
void write_p2(std::ostream& os, const Graymap& map);

/// Quantizes a nonnegative image to [0, maxval]; value = gray * scale.
struct QuantizedImage {
  Graymap map;
  double scale{1.0};
};
QuantizedImage quantize(const Image& values, int maxval);

/// Writes <path> as P2 and <path>.scale as key = value lines.
void save_gray_p2(const std::filesystem::path& path, const Image& values, int maxval = 65535);

/// Wide CSV: header c0..c{n-1}, one image row per line, exact doubles.
void write_image_csv(std::ostream& os, const Image& values);
Image read_image_csv(std::istream& is);
void save_image_csv(const std::filesystem::path& path, const Image& values);
Image load_image_csv(const std::filesystem::path& path);

/// Long CSV with header row,col,re,im.
void write_object_csv(std::ostream& os, const ComplexImage& values);
ComplexImage read_object_csv(std::istream& is);

/// |psi| quantized to 0..255 as P2.
void save_object_p2(const std::filesystem::path& path, const ObjectField& object);

/// Nearest-neighbour resampling of an arbitrary-size field onto grid.n x grid.n.
ComplexImage resample_nearest(const ComplexImage& source, int n);

/// Accepts a P2 graymap (real transmission in [0,1]) or a complex CSV.
ObjectField load_object(const std::filesystem::path& path, const GridSpec& grid);

struct DoubleSlit {
  ObjectField object;
  std::vector<Roi> rois;
  bool merged{false};  ///< separation too small to keep the slits apart
};

/// Two binary rectangles rasterized to whole pixels (round(size / pitch)),
/// symmetric about the grid center. The matching ROIs cover the openings.
DoubleSlit make_double_slit(const GridSpec& grid, double slit_width_um = 275.0, double slit_height_um = 1275.0,
                            double separation_um = 550.0);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hyperghost
