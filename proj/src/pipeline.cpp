#include "hyperghost/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "hyperghost/text_format.hpp"

namespace hyperghost {

namespace {

constexpr std::uint64_t kBackgroundStreamOffset = 6;

const char* method_name(AngleMethod m) {
  switch (m) {
    case AngleMethod::closed_form: return "closed_form";
    case AngleMethod::numeric: return "numeric";
    case AngleMethod::override_: return "override";
  }
  return "?";
}

// Bounding box of the transmissive pixels.
std::vector<Roi> bounding_roi(const ObjectMask& mask) {
  int top = int(mask.rows()), left = int(mask.cols()), bottom = -1, right = -1;
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) {
        top = std::min(top, int(r));
        bottom = std::max(bottom, int(r));
        left = std::min(left, int(c));
        right = std::max(right, int(c));
      }
  if (bottom < 0) throw Error(ErrorCode::invalid_argument, "object has no transmissive pixels for an automatic ROI");
  return {Roi{left, top, right - left + 1, bottom - top + 1}};
}

// Overrides are echoed as given rather than through a radian round trip.
std::string angle_text(const Scene& scene, const std::optional<double>& configured, double radians_value) {
  if (scene.angle_method == AngleMethod::override_ && configured) return format_double(*configured);
  return format_double(degrees(radians_value));
}

std::string cnr_text(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

}  // namespace

void resolve_polarization(const ExperimentConfig& config, PolarizationState<double>& state, HardyAngles<double>& angles,
                          AngleMethod& method, double& residual) {
  const double phi = radians(config.phi_deg);
  state = PolarizationState<double>::from_hardy(config.alpha, config.beta, phi);
  if (config.theta0_deg && config.theta1_deg) {
    angles = {radians(*config.theta0_deg), radians(*config.theta1_deg)};
    method = AngleMethod::override_;
  } else if (std::abs(std::cos(phi) + 1.0) < 1e-12) {
    const double norm = std::hypot(config.alpha, config.beta);
    angles = solve_hardy_angles(config.alpha / norm, config.beta / norm);
    method = AngleMethod::closed_form;
  } else {
    const auto solution = solve_hardy_angles_numeric(state);
    angles = solution.angles;
    method = AngleMethod::numeric;
  }
  const auto r = hardy_zero_residuals(state, angles);
  residual = r[0] + r[1] + r[2];
}

Scene prepare_scene(const ExperimentConfig& config) {
  config.validate();
  const GridSpec grid = config.grid();

  PolarizationState<double> state;
  HardyAngles<double> angles;
  AngleMethod method{};
  double residual = 0;
  resolve_polarization(config, state, angles, method, residual);

  std::optional<ObjectField> object;
  std::vector<Roi> rois = config.rois;
  bool merged = false;
  if (config.object_source == ObjectSource::double_slit) {
    DoubleSlit slit = make_double_slit(grid, config.slit_width_um, config.slit_height_um, config.separation_um);
    if (rois.empty()) rois = slit.rois;
    merged = slit.merged;
    object.emplace(std::move(slit.object));
  } else {
    object.emplace(load_object(config.object_path, grid));
  }
  ObjectMask mask = object_mask(*object);
  if (rois.empty()) rois = bounding_roi(mask);

  ModeDecomposition decomposition = decompose_object(signal_projection(*object), config.truncation);
  const SchmidtSpectrum spectrum = config.spectrum == SpectrumModel::flat
                                       ? SchmidtSpectrum::flat(config.truncation)
                                       : SchmidtSpectrum::gaussian(config.truncation, config.sigma_ell, config.radial_ratio);
  ModeDecomposition idler = idler_state(decomposition, spectrum);
  Image spatial = ghost_intensity(idler, grid);

  Scene scene{config, state, angles, method, residual, std::move(*object), std::move(mask), std::move(rois), merged,
              std::move(decomposition), std::move(idler), std::move(spatial), {}, {}};
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k) {
    scene.channel_probabilities[k] = channel_probability(state, angles, kPipelineChannels[k]);
    scene.rate_maps[k] = channel_image(kPipelineChannels[k], state, angles, scene.spatial);
  }
  return scene;
}

Acquisition acquire(const Scene& scene) {
  const DetectorConfig& det = scene.config.detector;
  Acquisition out;
  // One normalization for all six maps keeps cross-channel ratios intact.
  for (const Image& m : scene.rate_maps) out.reference_max = std::max(out.reference_max, m.maxCoeff());
  const int n = scene.config.grid_n;
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k) {
    out.raw[k] = simulate_acquisition_scaled(scene.rate_maps[k], det, out.reference_max, k);
    out.background[k] = background_image(n, n, det, kBackgroundStreamOffset + k);
    out.subtracted[k] = subtract_background(out.raw[k], out.background[k], det.saturation_quantile);
  }
  return out;
}

AnalysisResult analyze(const std::array<GrayImage, 6>& images, const ObjectMask& mask, std::span<const Roi> rois,
                       int histogram_bins) {
  AnalysisResult out;
  for (std::size_t m = 0; m < 4; ++m) {
    out.cnr[m] = cnr(images[m], mask);
    out.cnr_difference[m] = cnr_difference(images[m], mask);
  }
  out.report = hardy_from_images({images[0], images[1], images[2], images[3]}, images[4], images[5], rois);
  out.histogram = s_histogram(out.report, histogram_bins);
  return out;
}

std::string manifest(const Scene& scene, const Acquisition* acquisition) {
  std::ostringstream os;
  const GridSpec grid = scene.config.grid();
  os << "# hyperghost run manifest\n" << serialize_config(scene.config);
  os << "resolved.state.amp_hh = " << format_double(scene.state.amp_hh().real()) << '\n'
     << "resolved.state.amp_vv_re = " << format_double(scene.state.amp_vv().real()) << '\n'
     << "resolved.state.amp_vv_im = " << format_double(scene.state.amp_vv().imag()) << '\n'
     << "resolved.angles.method = " << method_name(scene.angle_method) << '\n'
     << "resolved.angles.theta0_deg = " << angle_text(scene, scene.config.theta0_deg, scene.angles.theta0) << '\n'
     << "resolved.angles.theta1_deg = " << angle_text(scene, scene.config.theta1_deg, scene.angles.theta1) << '\n'
     << "resolved.angles.barred_theta0_deg = " << format_double(degrees(scene.angles.barred_theta0())) << '\n'
     << "resolved.angles.barred_theta1_deg = " << format_double(degrees(scene.angles.barred_theta1())) << '\n'
     << "resolved.angles.zero_residual = " << format_double(scene.angle_residual) << '\n';
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k)
    os << "resolved.probability." << channel_name(kPipelineChannels[k]) << " = "
       << format_double(scene.channel_probabilities[k]) << '\n';
  os << "resolved.grid.pitch_um = " << format_double(grid.pitch_mm() * 1000.0) << '\n'
     << "resolved.object.merged_slits = " << (scene.slit_merged ? "true" : "false") << '\n'
     << "resolved.roi.list = " << format_rois(scene.rois) << '\n'
     << "resolved.modes.captured_energy = " << format_double(scene.decomposition.captured_energy()) << '\n'
     << "resolved.modes.idler_norm = " << format_double(scene.idler.captured_energy()) << '\n';
  if (acquisition) {
    os << "resolved.detector.reference_max = " << format_double(acquisition->reference_max) << '\n';
    for (std::size_t k = 0; k < kPipelineChannels.size(); ++k)
      os << "resolved.stream." << channel_name(kPipelineChannels[k]) << " = " << k << ','
         << kBackgroundStreamOffset + k << '\n';
  }
  return os.str();
}

void write_scene(const std::filesystem::path& dir, const Scene& scene) {
  std::filesystem::create_directories(dir);
  save_object_p2(dir / "object.pgm", scene.object);
  save_image_csv(dir / "spatial.csv", scene.spatial);
  save_gray_p2(dir / "spatial.pgm", scene.spatial);
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k) {
    const std::string name = channel_name(kPipelineChannels[k]);
    save_image_csv(dir / (name + "_rate.csv"), scene.rate_maps[k]);
    save_gray_p2(dir / (name + "_rate.pgm"), scene.rate_maps[k]);
  }
}

void write_acquisition(const std::filesystem::path& dir, const Acquisition& acq) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k) {
    const std::string name = channel_name(kPipelineChannels[k]);
    save_gray_p2(dir / (name + "_raw.pgm"), acq.raw[k].values);
    save_gray_p2(dir / (name + "_background.pgm"), acq.background[k].values);
    save_gray_p2(dir / (name + ".pgm"), acq.subtracted[k].values);
    save_image_csv(dir / (name + ".csv"), acq.subtracted[k].values);
  }
}

void write_analysis(const std::filesystem::path& dir, const AnalysisResult& analysis) {
  std::filesystem::create_directories(dir);
  std::ostringstream report;
  write_report(report, analysis.report);
  write_text_file(dir / "report.txt", report.str());

  std::ostringstream cnr_csv;
  cnr_csv << "channel,cnr,cnr_difference\n";
  for (std::size_t m = 0; m < 4; ++m)
    cnr_csv << channel_name(kPipelineChannels[m]) << ',' << cnr_text(analysis.cnr[m]) << ','
            << cnr_text(analysis.cnr_difference[m]) << '\n';
  write_text_file(dir / "cnr.csv", cnr_csv.str());

  std::ostringstream s_map, s_map_all, hist;
  write_pixel_csv(s_map, analysis.report.s_map);
  write_pixel_csv(s_map_all, analysis.report.s_map_all);
  write_histogram_csv(hist, analysis.histogram);
  write_text_file(dir / "s_map.csv", s_map.str());
  write_text_file(dir / "s_map_all.csv", s_map_all.str());
  write_text_file(dir / "histogram.csv", hist.str());
}

PipelineOutput run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  PipelineOutput out{prepare_scene(config), {}, {}};
  out.acquisition = acquire(out.scene);
  out.analysis = analyze(out.acquisition.subtracted, out.scene.mask, out.scene.rois, config.histogram_bins);
  if (!out_dir.empty()) {
    write_scene(out_dir, out.scene);
    write_acquisition(out_dir, out.acquisition);
    write_analysis(out_dir, out.analysis);
    write_text_file(out_dir / "manifest.txt", manifest(out.scene, &out.acquisition));
  }
  return out;
}

AnalysisResult analyze_bundle(const std::filesystem::path& bundle_dir, const ExperimentConfig& config) {
  config.validate();
  std::array<GrayImage, 6> images;
  for (std::size_t k = 0; k < kPipelineChannels.size(); ++k) {
    images[k].values = load_image_csv(bundle_dir / (std::string(channel_name(kPipelineChannels[k])) + ".csv"));
    images[k].provenance = Provenance::subtracted;
    if (images[k].values.rows() != config.grid_n || images[k].values.cols() != config.grid_n)
      throw Error(ErrorCode::dimension_mismatch, "bundle images do not match grid.n");
  }
  const GridSpec grid = config.grid();
  std::vector<Roi> rois = config.rois;
  ObjectMask mask;
  if (config.object_source == ObjectSource::double_slit) {
    DoubleSlit slit = make_double_slit(grid, config.slit_width_um, config.slit_height_um, config.separation_um);
    if (rois.empty()) rois = slit.rois;
    mask = object_mask(slit.object);
  } else {
    mask = object_mask(load_object(config.object_path, grid));
  }
  if (rois.empty()) rois = bounding_roi(mask);
  return analyze(images, mask, rois, config.histogram_bins);
}

}  // namespace hyperghost
