#pragma once

// Laguerre-Gaussian basis on a square Cartesian grid, object decomposition,
// the diagonal Schmidt-spectrum projection that forms the idler state, and
// ghost-image synthesis.
//
// Images are row-major; row 0 is the top (largest y), column 0 the left
// (smallest x); the origin sits at the grid center.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "hyperghost/polarization.hpp"

namespace hyperghost {

template <typename Scalar>
using ImageT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Image = ImageT<double>;
using ComplexImage = ImageT<std::complex<double>>;

struct LGIndex {
  int ell{0};
  int p{0};
  friend bool operator==(const LGIndex&, const LGIndex&) = default;
};

/// Mode set |ell| <= ell_max, 0 <= p <= p_max, flattened ell-major.
struct Truncation {
  int ell_max{10};
  int p_max{6};

  int size() const { return (2 * ell_max + 1) * (p_max + 1); }
  bool contains(LGIndex i) const { return std::abs(i.ell) <= ell_max && i.p >= 0 && i.p <= p_max; }
  int index(LGIndex i) const { return (i.ell + ell_max) * (p_max + 1) + i.p; }
  LGIndex at(int k) const { return {k / (p_max + 1) - ell_max, k % (p_max + 1)}; }
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

struct GridSpec {
  int n{256};
  double half_extent_mm{0.9};
  double waist_mm{0.22 * 0.9};

  /// Default waist as a fraction of the half extent.
  static constexpr double kWaistFraction = 0.22;

  double pitch_mm() const { return 2.0 * half_extent_mm / n; }
  double pixel_area() const { return pitch_mm() * pitch_mm(); }
  double x_mm(int col) const { return (col - (n - 1) / 2.0) * pitch_mm(); }
  double y_mm(int row) const { return ((n - 1) / 2.0 - row) * pitch_mm(); }
  void validate() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Complex transmission sampled on a grid; |psi| <= 1 (passive object).
class ObjectField {
 public:
  ObjectField(GridSpec grid, ComplexImage values);

  const GridSpec& grid() const { return grid_; }
  const ComplexImage& values() const { return values_; }

 private:
  GridSpec grid_;
  ComplexImage values_;
};

/// Generalized Laguerre polynomial L_p^alpha(x) by the three-term recurrence.
template <typename Scalar>
Scalar laguerre(int p, int alpha, Scalar x) {
  if (p == 0) return Scalar(1);
  Scalar prev = Scalar(1);
  Scalar cur = Scalar(1 + alpha) - x;
  for (int k = 1; k < p; ++k) {
    const Scalar next = ((Scalar(2 * k + 1 + alpha) - x) * cur - Scalar(k + alpha) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Radial part of the unit-power LG beam at its waist (phase factor excluded).
template <typename Scalar>
Scalar lg_radial(LGIndex idx, Scalar r, Scalar waist) {
  const int l = std::abs(idx.ell);
  const Scalar norm = std::sqrt(Scalar(2) / std::numbers::pi_v<Scalar>) / waist *
                      std::exp(Scalar(0.5) * (std::lgamma(Scalar(idx.p + 1)) - std::lgamma(Scalar(idx.p + l + 1))));
  const Scalar rho2 = Scalar(2) * r * r / (waist * waist);
  return norm * std::pow(std::sqrt(rho2), l) * laguerre(idx.p, l, rho2) * std::exp(-r * r / (waist * waist));
}

template <typename Scalar>
std::complex<Scalar> lg_value(LGIndex idx, Scalar x, Scalar y, Scalar waist) {
  const Scalar r = std::hypot(x, y);
  return std::polar(lg_radial(idx, r, waist), Scalar(idx.ell) * std::atan2(y, x));
}

struct ModeField {
  ComplexImage field;
  double norm_deficit{0};  ///< 1 - sum |u|^2 dA on the grid
  static constexpr double kSpillThreshold = 0.01;
  bool spills() const { return norm_deficit > kSpillThreshold; }
};

/// Overlap amplitudes A = <ell,p|psi> of the unit-normalized object.
struct ModeDecomposition {
  Truncation truncation;
  Eigen::VectorXcd amplitudes;
  bool zero_energy{false};

  std::complex<double> amplitude(LGIndex i) const { return amplitudes(truncation.index(i)); }
  double captured_energy() const { return amplitudes.squaredNorm(); }
  double parseval_deficit() const { return zero_energy ? 0.0 : 1.0 - captured_energy(); }
};

/// Diagonal biphoton amplitudes C = lambda(ell,p) delta(ell_s,-ell_i) delta(p_s,p_i),
/// keyed by the signal-mode index, normalized to sum lambda^2 = 1.
struct SchmidtSpectrum {
  Truncation truncation;
  Eigen::VectorXd lambda;

  double at(LGIndex signal_mode) const { return lambda(truncation.index(signal_mode)); }

  static SchmidtSpectrum flat(Truncation t);
  /// exp(-ell^2 / (2 sigma^2)) * ratio^p, normalized.
  static SchmidtSpectrum gaussian(Truncation t, double sigma_ell, double radial_ratio);
  static SchmidtSpectrum from_values(Truncation t, Eigen::VectorXd lambda);
};

ModeField lg_mode_field(LGIndex index, const GridSpec& grid);

/// Bucket detection projects the signal onto |psi>; the amplitudes that
/// reach the idler are <ell,p|psi*>, so the projection is a conjugation.
ObjectField signal_projection(const ObjectField& object);

ModeDecomposition decompose_object(const ObjectField& object, Truncation truncation);

/// idler(ell, p) = decomp(ell, p) * lambda(-ell, p), where decomp holds the
/// signal-projected (conjugated) object.
ModeDecomposition idler_state(const ModeDecomposition& decomp, const SchmidtSpectrum& spectrum);

ComplexImage synthesize_field(const ModeDecomposition& modes, const GridSpec& grid);

/// |sum a u|^2 per pixel, rescaled so the pixels sum to the state norm.
Image ghost_intensity(const ModeDecomposition& idler, const GridSpec& grid);

/// Separable channel image: spatial image times the channel's joint probability.
Image channel_image(Channel channel, const PolarizationState<double>& pol, const HardyAngles<double>& angles,
                    const Image& spatial_image);
Image channel_image(int m, const PolarizationState<double>& pol, const HardyAngles<double>& angles,
                    const Image& spatial_image);

}  // namespace hyperghost
