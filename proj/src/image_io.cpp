#include "hyperghost/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "hyperghost/text_format.hpp"

namespace hyperghost {

namespace {

// Next whitespace-separated token, skipping '#' comments.
bool next_token(std::istream& is, std::string& tok) {
  tok.clear();
  char ch;
  while (is.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(is, rest);
      if (!tok.empty()) return true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) return true;
      continue;
    }
    tok.push_back(ch);
  }
  return !tok.empty();
}

int parse_int_token(std::istream& is, const char* what) {
  std::string tok;
  if (!next_token(is, tok)) throw Error(ErrorCode::parse_error, std::string("P2: missing ") + what);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error, std::string("P2: bad ") + what + " '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Graymap read_p2(std::istream& is) {
  std::string magic;
  if (!next_token(is, magic) || magic != "P2") throw Error(ErrorCode::parse_error, "not an ASCII graymap (magic P2)");
  Graymap map;
  map.width = parse_int_token(is, "width");
  map.height = parse_int_token(is, "height");
  map.maxval = parse_int_token(is, "maxval");
  if (map.width < 1 || map.height < 1) throw Error(ErrorCode::parse_error, "P2: non-positive dimensions");
  if (map.maxval < 1 || map.maxval > 65535) throw Error(ErrorCode::parse_error, "P2: maxval must be in 1..65535");
  const std::size_t count = std::size_t(map.width) * std::size_t(map.height);
  map.values.reserve(count);
  std::string tok;
  while (next_token(is, tok)) {
    if (map.values.size() == count) throw Error(ErrorCode::parse_error, "P2: more samples than width*height");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty()) throw Error(ErrorCode::parse_error, "P2: bad sample '" + tok + "'");
    if (v < 0 || v > map.maxval) throw Error(ErrorCode::parse_error, "P2: sample outside [0, maxval]");
    map.values.push_back(v);
  }
  if (map.values.size() != count) throw Error(ErrorCode::parse_error, "P2: fewer samples than width*height");
  return map;
}

void write_p2(std::ostream& os, const Graymap& map) {
  os << "P2\n" << map.width << ' ' << map.height << '\n' << map.maxval << '\n';
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      if (c) os << ' ';
      os << map.values[std::size_t(r) * map.width + c];
    }
    os << '\n';
  }
}

QuantizedImage quantize(const Image& values, int maxval) {
  if ((values < 0).any()) throw Error(ErrorCode::invalid_argument, "graymap values must be nonnegative");
  QuantizedImage q;
  q.map.width = int(values.cols());
  q.map.height = int(values.rows());
  q.map.maxval = maxval;
  const double peak = values.size() ? values.maxCoeff() : 0.0;
  // Integer gray values that already fit are stored verbatim.
  const bool exact = peak <= maxval && (values == values.round()).all();
  q.scale = exact || peak <= 0 ? 1.0 : peak / maxval;
  q.map.values.resize(std::size_t(values.size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      q.map.values[std::size_t(r * values.cols() + c)] =
          std::clamp(int(std::lround(values(r, c) / q.scale)), 0, maxval);
  return q;
}

void save_gray_p2(const std::filesystem::path& path, const Image& values, int maxval) {
  const QuantizedImage q = quantize(values, maxval);
  std::ostringstream body;
  write_p2(body, q.map);
  write_text_file(path, body.str());
  write_text_file(path.string() + ".scale", "scale = " + format_double(q.scale) + "\nmaxval = " +
                                               std::to_string(maxval) + "\n");
}

void write_image_csv(std::ostream& os, const Image& values) {
  for (Eigen::Index c = 0; c < values.cols(); ++c) os << (c ? ",c" : "c") << c;
  os << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) os << ',';
      os << format_double(values(r, c));
    }
    os << '\n';
  }
}

Image read_image_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::parse_error, "image CSV: missing header");
  const std::size_t cols = split(strip_cr(line), ',').size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols) throw Error(ErrorCode::parse_error, "image CSV: non-rectangular data");
    for (const auto& f : fields) data.push_back(parse_double(f));
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::parse_error, "image CSV: no data rows");
  Image out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(data.begin(), data.end(), out.data());
  return out;
}

void save_image_csv(const std::filesystem::path& path, const Image& values) {
  std::ostringstream os;
  write_image_csv(os, values);
  write_text_file(path, os.str());
}

Image load_image_csv(const std::filesystem::path& path) {
  std::istringstream is(read_text_file(path));
  return read_image_csv(is);
}

void write_object_csv(std::ostream& os, const ComplexImage& values) {
  os << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      os << r << ',' << c << ',' << format_double(values(r, c).real()) << ',' << format_double(values(r, c).imag())
         << '\n';
}

ComplexImage read_object_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::parse_error, "object CSV: missing header");
  if (strip_cr(line) != "row,col,re,im") throw Error(ErrorCode::parse_error, "object CSV: header must be row,col,re,im");
  std::map<std::pair<long, long>, std::complex<double>> cells;
  long max_row = -1, max_col = -1;
  while (std::getline(is, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw Error(ErrorCode::parse_error, "object CSV: expected 4 fields per line");
    const double rr = parse_double(f[0]), cc = parse_double(f[1]);
    if (rr < 0 || cc < 0 || rr != std::floor(rr) || cc != std::floor(cc))
      throw Error(ErrorCode::parse_error, "object CSV: row/col must be nonnegative integers");
    const auto key = std::make_pair(long(rr), long(cc));
    if (!cells.emplace(key, std::complex<double>(parse_double(f[2]), parse_double(f[3]))).second)
      throw Error(ErrorCode::parse_error, "object CSV: duplicate cell");
    max_row = std::max(max_row, key.first);
    max_col = std::max(max_col, key.second);
  }
  if (cells.empty()) throw Error(ErrorCode::parse_error, "object CSV: no data");
  if (std::size_t(max_row + 1) * std::size_t(max_col + 1) != cells.size())
    throw Error(ErrorCode::parse_error, "object CSV: non-rectangular data");
  ComplexImage out(max_row + 1, max_col + 1);
  for (const auto& [key, v] : cells) out(key.first, key.second) = v;
  return out;
}

void save_object_p2(const std::filesystem::path& path, const ObjectField& object) {
  Graymap map;
  map.width = map.height = object.grid().n;
  map.maxval = 255;
  const Image mag = object.values().abs();
  for (Eigen::Index r = 0; r < mag.rows(); ++r)
    for (Eigen::Index c = 0; c < mag.cols(); ++c)
      map.values.push_back(std::clamp(int(std::lround(mag(r, c) * 255.0)), 0, 255));
  std::ostringstream os;
  write_p2(os, map);
  write_text_file(path, os.str());
}

ComplexImage resample_nearest(const ComplexImage& source, int n) {
  ComplexImage out(n, n);
  const Eigen::Index h = source.rows(), w = source.cols();
  for (int r = 0; r < n; ++r) {
    const auto sr = std::min<Eigen::Index>(h - 1, Eigen::Index(std::floor((r + 0.5) * double(h) / n)));
    for (int c = 0; c < n; ++c) {
      const auto sc = std::min<Eigen::Index>(w - 1, Eigen::Index(std::floor((c + 0.5) * double(w) / n)));
      out(r, c) = source(sr, sc);
    }
  }
  return out;
}

ObjectField load_object(const std::filesystem::path& path, const GridSpec& grid) {
  grid.validate();
  const std::string text = read_text_file(path);
  std::istringstream is(text);
  std::string first;
  is >> first;
  is.clear();
  is.seekg(0);
  ComplexImage source;
  if (first == "P2") {
    const Graymap map = read_p2(is);
    source.resize(map.height, map.width);
    for (int r = 0; r < map.height; ++r)
      for (int c = 0; c < map.width; ++c)
        source(r, c) = double(map.values[std::size_t(r) * map.width + c]) / map.maxval;
  } else {
    source = read_object_csv(is);
  }
  return ObjectField(grid, resample_nearest(source, grid.n));
}

DoubleSlit make_double_slit(const GridSpec& grid, double slit_width_um, double slit_height_um, double separation_um) {
  grid.validate();
  if (!(slit_width_um > 0) || !(slit_height_um > 0) || !(separation_um >= 0))
    throw Error(ErrorCode::invalid_argument, "slit dimensions must be positive");
  const double pitch_um = grid.pitch_mm() * 1000.0;
  const int w = std::max(1, int(std::lround(slit_width_um / pitch_um)));
  const int h = std::max(1, int(std::lround(slit_height_um / pitch_um)));
  const int sep = int(std::lround(separation_um / pitch_um));
  if (sep + w > grid.n) throw Error(ErrorCode::invalid_argument, "double slit is wider than the field");
  if (h > grid.n) throw Error(ErrorCode::invalid_argument, "slit is taller than the field");

  const int left = (grid.n - (sep + w)) / 2;
  const int top = (grid.n - h) / 2;
  const bool merged = sep <= w;
  std::vector<Roi> rois;
  if (merged)
    rois.push_back({left, top, sep + w, h});
  else
    rois = {{left, top, w, h}, {left + sep, top, w, h}};

  ComplexImage values = ComplexImage::Zero(grid.n, grid.n);
  for (const Roi& roi : rois) values.block(roi.y0, roi.x0, roi.height, roi.width) = std::complex<double>(1.0, 0.0);
  return DoubleSlit{ObjectField(grid, std::move(values)), std::move(rois), merged};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace hyperghost
