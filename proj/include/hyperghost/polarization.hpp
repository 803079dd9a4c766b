#pragma once

// Two-qubit polarization states, Hardy measurement settings and the
// closed-form / numerical machinery for the Hardy zero conditions.
//
// Angle convention: theta is measured from H toward V, in radians.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "hyperghost/error.hpp"

namespace hyperghost {

/// Amplitudes below this are treated as a product state (no Hardy angles).
inline constexpr double kDegenerateAmplitude = 1e-6;
/// joint_probability rejects states whose norm deviates more than this.
inline constexpr double kStateNormTolerance = 1e-6;
/// Hardy parameters are often quoted to two digits (0.43, 0.9); accept
/// those as given instead of demanding exact normalization.
inline constexpr double kQuotedNormTolerance = 1e-2;

template <typename Scalar = double>
class PolarizationState {
 public:
  using Complex = std::complex<Scalar>;
  /// Row: signal photon (H, V). Column: idler photon (H, V).
  using Amplitudes = Eigen::Matrix<Complex, 2, 2>;

  PolarizationState() : amps_(Amplitudes::Zero()) { amps_(0, 0) = Complex(1); }

  explicit PolarizationState(const Amplitudes& amps) : amps_(amps) {}

  /// alpha|HH> + beta e^{i phi}|VV>, normalized.
  static PolarizationState from_hardy(Scalar alpha, Scalar beta, Scalar phi) {
    const Scalar norm = std::hypot(alpha, beta);
    if (!(norm > Scalar(0)))
      throw Error(ErrorCode::invalid_argument, "alpha and beta are both zero");
    Amplitudes a = Amplitudes::Zero();
    a(0, 0) = Complex(alpha / norm);
    a(1, 1) = std::polar(beta / norm, phi);
    return PolarizationState(a);
  }

  const Amplitudes& amplitudes() const { return amps_; }
  Complex amp_hh() const { return amps_(0, 0); }
  Complex amp_hv() const { return amps_(0, 1); }
  Complex amp_vh() const { return amps_(1, 0); }
  Complex amp_vv() const { return amps_(1, 1); }

  Scalar norm() const { return std::sqrt(amps_.squaredNorm()); }

 private:
  Amplitudes amps_;
};

/// Linear analyzer: |A> = cos t|H> + sin t|V>, barred |A-bar> = -sin t|H> + cos t|V>.
template <typename Scalar = double>
struct MeasurementSetting {
  Scalar theta{0};
  bool barred{false};

  Eigen::Matrix<Scalar, 2, 1> vector() const {
    const Scalar c = std::cos(theta);
    const Scalar s = std::sin(theta);
    Eigen::Matrix<Scalar, 2, 1> v;
    if (barred)
      v << -s, c;
    else
      v << c, s;
    return v;
  }
};

template <typename Scalar = double>
struct HardyAngles {
  Scalar theta0{0};
  Scalar theta1{0};

  Scalar barred_theta0() const { return theta0 + std::numbers::pi_v<Scalar> / 2; }
  Scalar barred_theta1() const { return theta1 + std::numbers::pi_v<Scalar> / 2; }
};

template <typename Scalar>
Scalar degrees(Scalar radians) {
  return radians * Scalar(180) / std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
Scalar radians(Scalar degrees) {
  return degrees * std::numbers::pi_v<Scalar> / Scalar(180);
}

/// |<signal, idler | state>|^2.
template <typename Scalar>
Scalar joint_probability(const PolarizationState<Scalar>& state, const MeasurementSetting<Scalar>& signal,
                         const MeasurementSetting<Scalar>& idler) {
  if (std::abs(state.norm() - Scalar(1)) > Scalar(kStateNormTolerance))
    throw Error(ErrorCode::not_normalized, "polarization state is not normalized");
  using CVec = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
  const CVec s = signal.vector().template cast<std::complex<Scalar>>();
  const CVec i = idler.vector().template cast<std::complex<Scalar>>();
  const std::complex<Scalar> amplitude = (s.transpose() * state.amplitudes() * i)(0, 0);
  return std::norm(amplitude);
}

/// The four imaging channels of the Hardy argument plus the two
/// orthogonal reference settings used for normalization.
enum class Channel { a0_b0 = 1, abar0_b1 = 2, a1_bbar0 = 3, a1_b1 = 4, hh, vv };

inline Channel channel_from_index(int m) {
  if (m < 1 || m > 4) throw Error(ErrorCode::invalid_argument, "channel index must be 1..4");
  return static_cast<Channel>(m);
}

inline const char* channel_name(Channel c) {
  switch (c) {
    case Channel::a0_b0: return "ch1";
    case Channel::abar0_b1: return "ch2";
    case Channel::a1_bbar0: return "ch3";
    case Channel::a1_b1: return "ch4";
    case Channel::hh: return "hh";
    case Channel::vv: return "vv";
  }
  return "?";
}

/// (signal, idler) analyzer settings for a channel.
template <typename Scalar>
std::pair<MeasurementSetting<Scalar>, MeasurementSetting<Scalar>> channel_settings(Channel c,
                                                                                   const HardyAngles<Scalar>& a) {
  using M = MeasurementSetting<Scalar>;
  switch (c) {
    case Channel::a0_b0: return {M{a.theta0, false}, M{a.theta0, false}};
    case Channel::abar0_b1: return {M{a.theta0, true}, M{a.theta1, false}};
    case Channel::a1_bbar0: return {M{a.theta1, false}, M{a.theta0, true}};
    case Channel::a1_b1: return {M{a.theta1, false}, M{a.theta1, false}};
    case Channel::hh: return {M{Scalar(0), false}, M{Scalar(0), false}};
    case Channel::vv: return {M{Scalar(0), true}, M{Scalar(0), true}};
  }
  throw Error(ErrorCode::invalid_argument, "unknown channel");
}

template <typename Scalar>
Scalar channel_probability(const PolarizationState<Scalar>& state, const HardyAngles<Scalar>& angles, Channel c) {
  const auto [s, i] = channel_settings(c, angles);
  return joint_probability(state, s, i);
}

/// Probabilities of the three conditions that must vanish:
/// P(A0,B0), P(A0-bar,B1), P(A1,B0-bar).
template <typename Scalar>
std::array<Scalar, 3> hardy_zero_residuals(const PolarizationState<Scalar>& state, const HardyAngles<Scalar>& a) {
  return {channel_probability(state, a, Channel::a0_b0), channel_probability(state, a, Channel::abar0_b1),
          channel_probability(state, a, Channel::a1_bbar0)};
}

namespace detail {

template <typename Scalar>
void check_hardy_amplitudes(Scalar alpha, Scalar beta) {
  if (!(alpha >= Scalar(kDegenerateAmplitude)) || !(beta >= Scalar(kDegenerateAmplitude)))
    throw Error(ErrorCode::degenerate_state, "Hardy angles do not exist for a product state (alpha or beta ~ 0)");
  if (std::abs(alpha * alpha + beta * beta - Scalar(1)) > Scalar(kQuotedNormTolerance))
    throw Error(ErrorCode::not_normalized, "alpha^2 + beta^2 must be 1");
}

}  // namespace detail

/// Closed-form analyzer angles for alpha|HH> - beta|VV>:
/// tan^2 theta0 = alpha/beta, tan theta1 = -(alpha/beta)^{3/2}.
template <typename Scalar>
HardyAngles<Scalar> solve_hardy_angles(Scalar alpha, Scalar beta) {
  detail::check_hardy_amplitudes(alpha, beta);
  const Scalar ratio = alpha / beta;
  return {std::atan(std::sqrt(ratio)), -std::atan(ratio * std::sqrt(ratio))};
}

/// (|a|-|b|)^2 |ab|^2 / (1-|ab|)^2, evaluated on the amplitudes as given.
template <typename Scalar>
Scalar hardy_probability(Scalar alpha, Scalar beta) {
  detail::check_hardy_amplitudes(alpha, beta);
  const Scalar a = std::abs(alpha);
  const Scalar b = std::abs(beta);
  const Scalar ab = a * b;
  const Scalar d = Scalar(1) - ab;
  return (a - b) * (a - b) * ab * ab / (d * d);
}

template <typename Scalar = double>
struct HardyOptimum {
  Scalar alpha{};
  Scalar beta{};
  HardyAngles<Scalar> angles{};
  Scalar probability{};
};

/// Maximizes hardy_probability over alpha in (0, 1/sqrt 2), beta = sqrt(1 - alpha^2).
/// The objective vanishes at alpha = beta and is symmetric under alpha <-> beta,
/// so the alpha < beta branch holds one of the two equivalent maxima.
template <typename Scalar = double>
HardyOptimum<Scalar> optimize_hardy(Scalar tolerance = Scalar(1e-12)) {
  const auto objective = [](Scalar a) { return hardy_probability(a, std::sqrt(Scalar(1) - a * a)); };
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar lo = Scalar(kDegenerateAmplitude);
  Scalar hi = std::numbers::sqrt2_v<Scalar> / Scalar(2) - Scalar(kDegenerateAmplitude);
  Scalar x1 = hi - inv_phi * (hi - lo);
  Scalar x2 = lo + inv_phi * (hi - lo);
  Scalar f1 = objective(x1);
  Scalar f2 = objective(x2);
  while (hi - lo > tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  HardyOptimum<Scalar> best;
  best.alpha = (lo + hi) / Scalar(2);
  best.beta = std::sqrt(Scalar(1) - best.alpha * best.alpha);
  best.angles = solve_hardy_angles(best.alpha, best.beta);
  best.probability = objective(best.alpha);
  return best;
}

template <typename Scalar = double>
struct NumericHardySolution {
  HardyAngles<Scalar> angles{};
  Scalar residual{};  ///< sum of the three zero-condition probabilities
  Scalar hardy{};     ///< P(A1, B1) at the returned angles
};

/// Angle search for states outside the phi = pi family. Minimizes the summed
/// zero-condition probabilities with a 1-degree grid followed by a shrinking
/// compass search. Real analyzer angles cannot always zero all three
/// conditions for complex phases; the leftover is reported as residual.
template <typename Scalar>
NumericHardySolution<Scalar> solve_hardy_angles_numeric(const PolarizationState<Scalar>& state) {
  const auto residual = [&](Scalar t0, Scalar t1) {
    const auto r = hardy_zero_residuals(state, HardyAngles<Scalar>{t0, t1});
    return r[0] + r[1] + r[2];
  };
  const auto& score = residual;
  const Scalar step = radians(Scalar(1));
  const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  Scalar best_t0 = 0, best_t1 = 0;
  Scalar best = score(best_t0, best_t1);
  for (Scalar t0 = -half_pi; t0 < half_pi; t0 += step) {
    for (Scalar t1 = -half_pi; t1 < half_pi; t1 += step) {
      const Scalar s = score(t0, t1);
      if (s < best) {
        best = s;
        best_t0 = t0;
        best_t1 = t1;
      }
    }
  }
  Scalar delta = step;
  while (delta > Scalar(1e-13)) {
    bool moved = false;
    const std::array<std::pair<Scalar, Scalar>, 4> dirs{{{delta, 0}, {-delta, 0}, {0, delta}, {0, -delta}}};
    for (const auto& [d0, d1] : dirs) {
      const Scalar s = score(best_t0 + d0, best_t1 + d1);
      if (s < best) {
        best = s;
        best_t0 += d0;
        best_t1 += d1;
        moved = true;
      }
    }
    if (!moved) delta /= 2;
  }
  NumericHardySolution<Scalar> out;
  out.angles = {best_t0, best_t1};
  out.residual = residual(best_t0, best_t1);
  out.hardy = channel_probability(state, out.angles, Channel::a1_b1);
  return out;
}

}  // namespace hyperghost
