#include "hyperghost/spatial_modes.hpp"

#include <string>
#include <vector>

#include "hyperghost/parallel.hpp"

namespace hyperghost {

namespace {

constexpr double kPassiveTolerance = 1e-12;

// Per-pixel polar coordinates and the quantities every mode shares.
struct PolarGrid {
  std::vector<double> r;
  std::vector<double> phi;

  explicit PolarGrid(const GridSpec& g) : r(std::size_t(g.n) * g.n), phi(r.size()) {
    for (int row = 0; row < g.n; ++row) {
      for (int col = 0; col < g.n; ++col) {
        const double x = g.x_mm(col);
        const double y = g.y_mm(row);
        const std::size_t k = std::size_t(row) * g.n + col;
        r[k] = std::hypot(x, y);
        phi[k] = std::atan2(y, x);
      }
    }
  }
};

std::complex<double> mode_at(LGIndex idx, const PolarGrid& pg, std::size_t k, double waist) {
  return std::polar(lg_radial(idx, pg.r[k], waist), idx.ell * pg.phi[k]);
}

}  // namespace

void GridSpec::validate() const {
  if (n < 8) throw Error(ErrorCode::invalid_argument, "grid.n must be >= 8");
  if (!(half_extent_mm > 0)) throw Error(ErrorCode::invalid_argument, "grid half extent must be > 0");
  if (!(waist_mm > 0)) throw Error(ErrorCode::invalid_argument, "grid waist must be > 0");
}

ObjectField::ObjectField(GridSpec grid, ComplexImage values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.rows() != grid_.n || values_.cols() != grid_.n)
    throw Error(ErrorCode::dimension_mismatch, "object samples do not match the grid size");
  if ((values_.abs() > 1.0 + kPassiveTolerance).any())
    throw Error(ErrorCode::invalid_argument, "object transmission exceeds 1 in magnitude");
}

SchmidtSpectrum SchmidtSpectrum::flat(Truncation t) {
  return from_values(t, Eigen::VectorXd::Ones(t.size()));
}

SchmidtSpectrum SchmidtSpectrum::gaussian(Truncation t, double sigma_ell, double radial_ratio) {
  if (!(sigma_ell > 0)) throw Error(ErrorCode::invalid_argument, "spectrum sigma_ell must be > 0");
  if (!(radial_ratio > 0) || radial_ratio > 1) throw Error(ErrorCode::invalid_argument, "spectrum radial ratio must be in (0, 1]");
  Eigen::VectorXd lambda(t.size());
  for (int k = 0; k < t.size(); ++k) {
    const LGIndex i = t.at(k);
    lambda(k) = std::exp(-double(i.ell * i.ell) / (2 * sigma_ell * sigma_ell)) * std::pow(radial_ratio, i.p);
  }
  return from_values(t, std::move(lambda));
}

SchmidtSpectrum SchmidtSpectrum::from_values(Truncation t, Eigen::VectorXd lambda) {
  if (lambda.size() != t.size()) throw Error(ErrorCode::index_mismatch, "spectrum size does not match truncation");
  if ((lambda.array() < 0).any()) throw Error(ErrorCode::invalid_argument, "spectrum amplitudes must be nonnegative");
  const double norm = lambda.norm();
  if (!(norm > 0)) throw Error(ErrorCode::invalid_argument, "spectrum is identically zero");
  return {t, lambda / norm};
}

ModeField lg_mode_field(LGIndex index, const GridSpec& grid) {
  grid.validate();
  if (index.p < 0) throw Error(ErrorCode::invalid_argument, "radial index p must be >= 0");
  const PolarGrid pg(grid);
  ModeField out;
  out.field.resize(grid.n, grid.n);
  for (int row = 0; row < grid.n; ++row)
    for (int col = 0; col < grid.n; ++col)
      out.field(row, col) = mode_at(index, pg, std::size_t(row) * grid.n + col, grid.waist_mm);
  out.norm_deficit = 1.0 - out.field.abs2().sum() * grid.pixel_area();
  return out;
}

ObjectField signal_projection(const ObjectField& object) {
  return ObjectField(object.grid(), object.values().conjugate());
}

ModeDecomposition decompose_object(const ObjectField& object, Truncation truncation) {
  if (truncation.ell_max < 0 || truncation.p_max < 0)
    throw Error(ErrorCode::invalid_argument, "truncation must be nonnegative");
  const GridSpec& grid = object.grid();
  ModeDecomposition out{truncation, Eigen::VectorXcd::Zero(truncation.size()), false};
  const double energy = object.values().abs2().sum() * grid.pixel_area();
  if (!(energy > 0)) {
    out.zero_energy = true;
    return out;
  }
  const double scale = grid.pixel_area() / std::sqrt(energy);
  const PolarGrid pg(grid);
  const auto* psi = object.values().data();
  const std::size_t pixels = std::size_t(grid.n) * grid.n;
  parallel_for(0, std::size_t(truncation.size()), [&](std::size_t k) {
    const LGIndex idx = truncation.at(int(k));
    std::complex<double> acc{0, 0};
    for (std::size_t q = 0; q < pixels; ++q) {
      if (psi[q] == std::complex<double>{}) continue;
      acc += std::conj(mode_at(idx, pg, q, grid.waist_mm)) * psi[q];
    }
    out.amplitudes(Eigen::Index(k)) = acc * scale;
  });
  return out;
}

ModeDecomposition idler_state(const ModeDecomposition& decomp, const SchmidtSpectrum& spectrum) {
  if (!(decomp.truncation == spectrum.truncation))
    throw Error(ErrorCode::index_mismatch, "spectrum truncation does not match the decomposition");
  ModeDecomposition out{decomp.truncation, Eigen::VectorXcd::Zero(decomp.truncation.size()), decomp.zero_energy};
  for (int k = 0; k < decomp.truncation.size(); ++k) {
    const LGIndex idler = decomp.truncation.at(k);
    out.amplitudes(k) = decomp.amplitudes(k) * spectrum.at({-idler.ell, idler.p});
  }
  return out;
}

ComplexImage synthesize_field(const ModeDecomposition& modes, const GridSpec& grid) {
  grid.validate();
  const PolarGrid pg(grid);
  ComplexImage field = ComplexImage::Zero(grid.n, grid.n);
  std::vector<int> active;
  for (int k = 0; k < modes.truncation.size(); ++k)
    if (modes.amplitudes(k) != std::complex<double>{}) active.push_back(k);
  parallel_for(0, std::size_t(grid.n), [&](std::size_t row) {
    for (int col = 0; col < grid.n; ++col) {
      const std::size_t q = row * grid.n + col;
      std::complex<double> acc{0, 0};
      for (int k : active) acc += modes.amplitudes(k) * mode_at(modes.truncation.at(k), pg, q, grid.waist_mm);
      field(Eigen::Index(row), col) = acc;
    }
  });
  return field;
}

Image ghost_intensity(const ModeDecomposition& idler, const GridSpec& grid) {
  Image image = synthesize_field(idler, grid).abs2() * grid.pixel_area();
  const double total = image.sum();
  if (total > 0) image *= idler.captured_energy() / total;
  return image;
}

Image channel_image(Channel channel, const PolarizationState<double>& pol, const HardyAngles<double>& angles,
                    const Image& spatial_image) {
  return spatial_image * channel_probability(pol, angles, channel);
}

Image channel_image(int m, const PolarizationState<double>& pol, const HardyAngles<double>& angles,
                    const Image& spatial_image) {
  return channel_image(channel_from_index(m), pol, angles, spatial_image);
}

}  // namespace hyperghost
