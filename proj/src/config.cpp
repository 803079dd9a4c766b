#include "hyperghost/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "hyperghost/text_format.hpp"

namespace hyperghost {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view why) {
  throw Error(ErrorCode::invalid_config, std::string(key) + ": " + std::string(why));
}

double as_double(std::string_view key, std::string_view v) {
  double d = 0;
  try {
    d = parse_double(v);
  } catch (const Error&) {
    bad(key, "expected a number, got '" + std::string(v) + "'");
  }
  if (!std::isfinite(d)) bad(key, "must be finite");
  return d;
}

long long as_integer(std::string_view key, std::string_view v) {
  const double d = as_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) bad(key, "expected an integer");
  return static_cast<long long>(d);
}

int as_int(std::string_view key, std::string_view v) {
  const long long x = as_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) bad(key, "out of range");
  return int(x);
}

std::uint64_t as_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  if (v.empty()) bad(key, "expected an unsigned integer");
  for (char c : v) {
    if (c < '0' || c > '9') bad(key, "expected an unsigned integer");
    const std::uint64_t digit = std::uint64_t(c - '0');
    if (out > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) bad(key, "out of range");
    out = out * 10 + digit;
  }
  return out;
}

std::optional<double> as_auto_double(std::string_view key, std::string_view v) {
  if (v == "auto") return std::nullopt;
  return as_double(key, v);
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

const char* model_name(DetectorModel m) {
  return m == DetectorModel::ideal ? "ideal" : "thresholded_poisson";
}

}  // namespace

GridSpec ExperimentConfig::grid() const {
  return GridSpec{grid_n, half_extent_mm, waist_mm.value_or(GridSpec::kWaistFraction * half_extent_mm)};
}

void ExperimentConfig::validate() const {
  if (!(alpha >= 0) || !(beta >= 0)) throw Error(ErrorCode::invalid_config, "state.alpha and state.beta must be >= 0");
  if (!(alpha > 0 || beta > 0)) throw Error(ErrorCode::invalid_config, "state.alpha and state.beta cannot both be 0");
  if (theta0_deg.has_value() != theta1_deg.has_value())
    throw Error(ErrorCode::invalid_config, "angles.theta0_deg and angles.theta1_deg must be set together");
  try {
    grid().validate();
    detector.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::invalid_config, e.what());
  }
  if (truncation.ell_max < 0 || truncation.p_max < 0)
    throw Error(ErrorCode::invalid_config, "modes.ell_max and modes.p_max must be >= 0");
  if (!(sigma_ell > 0)) throw Error(ErrorCode::invalid_config, "spectrum.sigma_ell must be > 0");
  if (!(radial_ratio > 0) || radial_ratio > 1) throw Error(ErrorCode::invalid_config, "spectrum.radial_ratio must be in (0, 1]");
  if (object_source == ObjectSource::file && object_path.empty())
    throw Error(ErrorCode::invalid_config, "object.path is required when object.source = file");
  if (!(slit_width_um > 0) || !(slit_height_um > 0) || !(separation_um >= 0))
    throw Error(ErrorCode::invalid_config, "slit dimensions must be positive");
  if (histogram_bins < 1) throw Error(ErrorCode::invalid_config, "analysis.histogram_bins must be >= 1");
  for (const Roi& roi : rois) {
    try {
      roi.validate(grid_n, grid_n);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_config, std::string("roi.list: ") + e.what());
    }
  }
}

std::string format_rois(const std::vector<Roi>& rois) {
  if (rois.empty()) return "auto";
  std::string out;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(rois[i].x0) + ',' + std::to_string(rois[i].y0) + ',' + std::to_string(rois[i].width) + ',' +
           std::to_string(rois[i].height);
  }
  return out;
}

std::vector<Roi> parse_rois(std::string_view text) {
  text = trim(text);
  std::vector<Roi> out;
  if (text == "auto") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const std::string_view item = trim(text.substr(start, end - start));
    std::vector<int> parts;
    std::size_t pos = 0;
    while (pos <= item.size()) {
      const std::size_t comma = std::min(item.find(',', pos), item.size());
      parts.push_back(as_int("roi.list", trim(item.substr(pos, comma - pos))));
      pos = comma + 1;
    }
    if (parts.size() != 4) bad("roi.list", "each ROI needs x0,y0,width,height");
    out.push_back({parts[0], parts[1], parts[2], parts[3]});
    start = end + 1;
  }
  return out;
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "state.alpha") c.alpha = as_double(key, v);
  else if (key == "state.beta") c.beta = as_double(key, v);
  else if (key == "state.phi_deg") c.phi_deg = as_double(key, v);
  else if (key == "angles.theta0_deg") c.theta0_deg = as_auto_double(key, v);
  else if (key == "angles.theta1_deg") c.theta1_deg = as_auto_double(key, v);
  else if (key == "grid.n") c.grid_n = as_int(key, v);
  else if (key == "grid.half_extent_mm") c.half_extent_mm = as_double(key, v);
  else if (key == "grid.waist_mm") c.waist_mm = as_auto_double(key, v);
  else if (key == "modes.ell_max") c.truncation.ell_max = as_int(key, v);
  else if (key == "modes.p_max") c.truncation.p_max = as_int(key, v);
  else if (key == "spectrum.model") {
    if (v == "flat") c.spectrum = SpectrumModel::flat;
    else if (v == "gaussian") c.spectrum = SpectrumModel::gaussian;
    else bad(key, "expected flat or gaussian");
  } else if (key == "spectrum.sigma_ell") c.sigma_ell = as_double(key, v);
  else if (key == "spectrum.radial_ratio") c.radial_ratio = as_double(key, v);
  else if (key == "object.source") {
    if (v == "double_slit") c.object_source = ObjectSource::double_slit;
    else if (v == "file") c.object_source = ObjectSource::file;
    else bad(key, "expected double_slit or file");
  } else if (key == "object.path") c.object_path = std::string(v);
  else if (key == "object.slit_width_um") c.slit_width_um = as_double(key, v);
  else if (key == "object.slit_height_um") c.slit_height_um = as_double(key, v);
  else if (key == "object.separation_um") c.separation_um = as_double(key, v);
  else if (key == "roi.list") c.rois = parse_rois(v);
  else if (key == "detector.model") {
    if (v == "thresholded_poisson") c.detector.model = DetectorModel::thresholded_poisson;
    else if (v == "ideal") c.detector.model = DetectorModel::ideal;
    else bad(key, "expected thresholded_poisson or ideal");
  } else if (key == "detector.frames") c.detector.frames = as_int(key, v);
  else if (key == "detector.exposure_s") c.detector.exposure_s = as_double(key, v);
  else if (key == "detector.flux_scale") c.detector.flux_scale = as_double(key, v);
  else if (key == "detector.dark_rate") c.detector.dark_rate = as_double(key, v);
  else if (key == "detector.threshold") c.detector.threshold = as_int(key, v);
  else if (key == "detector.saturation_quantile") c.detector.saturation_quantile = as_double(key, v);
  else if (key == "detector.seed") c.detector.seed = as_u64(key, v);
  else if (key == "analysis.histogram_bins") c.histogram_bins = as_int(key, v);
  else throw Error(ErrorCode::invalid_config, "unknown key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::set<std::string, std::less<>> seen;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::invalid_config, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!seen.emplace(key).second) throw Error(ErrorCode::invalid_config, "duplicate key '" + std::string(key) + "'");
    apply_setting(base, key, line.substr(eq + 1));
  }
  base.validate();
  return base;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const GridSpec g = c.grid();
  os << "state.alpha = " << format_double(c.alpha) << '\n'
     << "state.beta = " << format_double(c.beta) << '\n'
     << "state.phi_deg = " << format_double(c.phi_deg) << '\n'
     << "angles.theta0_deg = " << fmt_opt(c.theta0_deg) << '\n'
     << "angles.theta1_deg = " << fmt_opt(c.theta1_deg) << '\n'
     << "grid.n = " << c.grid_n << '\n'
     << "grid.half_extent_mm = " << format_double(c.half_extent_mm) << '\n'
     << "grid.waist_mm = " << format_double(g.waist_mm) << '\n'
     << "modes.ell_max = " << c.truncation.ell_max << '\n'
     << "modes.p_max = " << c.truncation.p_max << '\n'
     << "spectrum.model = " << (c.spectrum == SpectrumModel::flat ? "flat" : "gaussian") << '\n'
     << "spectrum.sigma_ell = " << format_double(c.sigma_ell) << '\n'
     << "spectrum.radial_ratio = " << format_double(c.radial_ratio) << '\n'
     << "object.source = " << (c.object_source == ObjectSource::file ? "file" : "double_slit") << '\n'
     << "object.path = " << c.object_path << '\n'
     << "object.slit_width_um = " << format_double(c.slit_width_um) << '\n'
     << "object.slit_height_um = " << format_double(c.slit_height_um) << '\n'
     << "object.separation_um = " << format_double(c.separation_um) << '\n'
     << "roi.list = " << format_rois(c.rois) << '\n'
     << "detector.model = " << model_name(c.detector.model) << '\n'
     << "detector.frames = " << c.detector.frames << '\n'
     << "detector.exposure_s = " << format_double(c.detector.exposure_s) << '\n'
     << "detector.flux_scale = " << format_double(c.detector.flux_scale) << '\n'
     << "detector.dark_rate = " << format_double(c.detector.dark_rate) << '\n'
     << "detector.threshold = " << c.detector.threshold << '\n'
     << "detector.saturation_quantile = " << format_double(c.detector.saturation_quantile) << '\n'
     << "detector.seed = " << c.detector.seed << '\n'
     << "analysis.histogram_bins = " << c.histogram_bins << '\n';
  return os.str();
}

std::vector<std::string> preset_names() { return {"noise-free", "paper-noisy"}; }

ExperimentConfig preset(std::string_view name) {
  // Both presets image the double slit on a 25 um camera pitch, so each
  // 275 um x 1275 um opening covers 11 x 51 pixels.
  ExperimentConfig c;
  c.grid_n = 256;
  c.half_extent_mm = 3.2;
  c.waist_mm = 0.2;
  if (name == "noise-free") {
    c.detector.model = DetectorModel::ideal;
    c.detector.dark_rate = 0.0;
    c.detector.saturation_quantile = 1.0;
  } else if (name == "paper-noisy") {
    c.detector.model = DetectorModel::thresholded_poisson;
    c.detector.frames = 2500;
    c.detector.exposure_s = 5.0;
    c.detector.flux_scale = 0.05;
    c.detector.dark_rate = 2e-6;
    c.detector.seed = 20210705;
    // Analyzers 1 degree off the solved angles (34.65, -18.28).
    c.theta0_deg = 35.65;
    c.theta1_deg = -19.28;
  } else {
    throw Error(ErrorCode::invalid_config, "unknown preset '" + std::string(name) + "'");
  }
  c.validate();
  return c;
}

}  // namespace hyperghost
