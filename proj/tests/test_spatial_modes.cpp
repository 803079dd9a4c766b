#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hyperghost/image_io.hpp"
#include "hyperghost/spatial_modes.hpp"

using namespace hyperghost;
using doctest::Approx;

namespace {

const GridSpec kImagingGrid{256, 3.2, 0.2};

ObjectField disk(const GridSpec& g, double radius) {
  ComplexImage v = ComplexImage::Zero(g.n, g.n);
  for (int r = 0; r < g.n; ++r)
    for (int c = 0; c < g.n; ++c)
      if (std::hypot(g.x_mm(c), g.y_mm(r)) <= radius) v(r, c) = 1.0;
  return ObjectField(g, v);
}

double max_abs_where(const ModeDecomposition& d, bool (*pick)(LGIndex)) {
  double m = 0;
  for (int k = 0; k < d.truncation.size(); ++k)
    if (pick(d.truncation.at(k))) m = std::max(m, std::abs(d.amplitudes(k)));
  return m;
}

}  // namespace

TEST_CASE("truncation indexing") {
  const Truncation t{10, 6};
  CHECK(t.size() == 21 * 7);
  CHECK(t.index({-10, 0}) == 0);
  CHECK(t.index({10, 6}) == t.size() - 1);
  for (int k = 0; k < t.size(); ++k) CHECK(t.index(t.at(k)) == k);
  CHECK_FALSE(t.contains({11, 0}));
  CHECK_FALSE(t.contains({0, 7}));
}

TEST_CASE("laguerre polynomials against explicit forms") {
  for (double x : {0.0, 0.3, 1.7, 4.2}) {
    CHECK(laguerre(1, 0, x) == Approx(1 - x));
    CHECK(laguerre(2, 0, x) == Approx(0.5 * (x * x - 4 * x + 2)));
    CHECK(laguerre(2, 3, x) == Approx(0.5 * (x * x - 2 * (3 + 2) * x + (3 + 1) * (3 + 2))));
    CHECK(laguerre(3, 1, x) == Approx((-x * x * x + 12 * x * x - 36 * x + 24) / 6.0));
  }
}

TEST_CASE("fundamental mode is a centered real Gaussian") {
  const GridSpec g{};
  const ModeField m = lg_mode_field({0, 0}, g);
  CHECK((m.field.imag() == 0.0).all());
  CHECK((m.field.real() > 0.0).all());
  const double peak = m.field.real().maxCoeff();
  const int c = g.n / 2;
  CHECK(m.field(c, c).real() == Approx(peak));
  CHECK(m.field(c - 1, c - 1).real() == Approx(peak));
  const double w = g.waist_mm;
  for (int row : {5, 60, 128, 200}) {
    const double r2 = g.x_mm(row) * g.x_mm(row) + g.y_mm(row) * g.y_mm(row);
    CHECK(m.field(row, row).real() == Approx(std::sqrt(2 / std::numbers::pi) / w * std::exp(-r2 / (w * w))));
  }
  CHECK(std::abs(m.norm_deficit) < 1e-6);
  CHECK_FALSE(m.spills());
}

TEST_CASE("LG(1,0) vanishes on axis and winds by 2 pi") {
  GridSpec g{};
  g.n = 255;
  const ModeField m = lg_mode_field({1, 0}, g);
  CHECK(std::abs(m.field(127, 127)) == 0.0);

  const double radius = 20.0;
  const int samples = 720;
  double winding = 0;
  double prev = 0;
  for (int k = 0; k <= samples; ++k) {
    const double t = 2 * std::numbers::pi * k / samples;
    const int col = 127 + int(std::lround(radius * std::cos(t)));
    const int row = 127 - int(std::lround(radius * std::sin(t)));
    const double ph = std::arg(m.field(row, col));
    if (k) winding += std::remainder(ph - prev, 2 * std::numbers::pi);
    prev = ph;
  }
  CHECK(winding == Approx(2 * std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("discrete orthonormality for |l| <= 3, p <= 3 at n = 256") {
  const GridSpec g{};
  std::vector<ComplexImage> modes;
  for (int l = -3; l <= 3; ++l)
    for (int p = 0; p <= 3; ++p) modes.push_back(lg_mode_field({l, p}, g).field);
  double worst = 0;
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = a; b < modes.size(); ++b) {
      const std::complex<double> ip = (modes[a].conjugate() * modes[b]).sum() * g.pixel_area();
      worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-4);
}

TEST_CASE("an undersized grid reports spill") {
  GridSpec g{};
  g.waist_mm = 0.9;
  CHECK(lg_mode_field({3, 3}, g).spills());
}

TEST_CASE("decomposing a basis mode recovers it") {
  const GridSpec g{};
  ComplexImage u = lg_mode_field({2, 1}, g).field;
  u /= u.abs().maxCoeff();
  const auto d = decompose_object(ObjectField(g, u), Truncation{3, 3});
  CHECK(std::abs(d.amplitude({2, 1}) - 1.0) < 1e-4);
  for (int k = 0; k < d.truncation.size(); ++k)
    if (!(d.truncation.at(k) == LGIndex{2, 1})) CHECK(std::abs(d.amplitudes(k)) < 1e-4);
}

TEST_CASE("disk has no azimuthal content off the square lattice harmonics") {
  const GridSpec g{};
  const auto d = decompose_object(disk(g, g.waist_mm / 2), Truncation{8, 3});
  CHECK(max_abs_where(d, [](LGIndex i) { return i.ell % 4 != 0; }) < 1e-10);
  // The pixel lattice itself is only 4-fold symmetric.
  CHECK(max_abs_where(d, [](LGIndex i) { return i.ell != 0 && i.ell % 4 == 0; }) < 5e-3);
}

TEST_CASE("centered double slit has only even l") {
  const GridSpec g{255, 3.2, 0.2};
  const DoubleSlit slit = make_double_slit(g);
  const auto d = decompose_object(signal_projection(slit.object), Truncation{10, 6});
  // Brute force: mirror images of every open pixel are open too.
  const auto& v = slit.object.values();
  CHECK(v.isApprox(v.reverse()));
  CHECK(max_abs_where(d, [](LGIndex i) { return i.ell % 2 != 0; }) < 1e-10);
}

TEST_CASE("zero object") {
  const GridSpec g{};
  const auto d = decompose_object(ObjectField(g, ComplexImage::Zero(g.n, g.n)), Truncation{2, 2});
  CHECK(d.zero_energy);
  CHECK(d.amplitudes.isZero(0));
  CHECK(d.parseval_deficit() == 0.0);
  const Image img = ghost_intensity(idler_state(d, SchmidtSpectrum::flat(d.truncation)), g);
  CHECK((img == 0.0).all());
}

TEST_CASE("object validation") {
  const GridSpec g{};
  ComplexImage v = ComplexImage::Zero(g.n, g.n);
  v(3, 3) = 1.5;
  CHECK_THROWS_AS(ObjectField(g, v), Error);
  CHECK_THROWS_AS(ObjectField(g, ComplexImage::Zero(10, 10)), Error);
}

TEST_CASE("spectra") {
  const Truncation t{4, 2};
  const auto flat = SchmidtSpectrum::flat(t);
  CHECK(flat.lambda.norm() == Approx(1.0));
  CHECK(flat.lambda.maxCoeff() == Approx(flat.lambda.minCoeff()));
  const auto gauss = SchmidtSpectrum::gaussian(t, 2.0, 0.5);
  CHECK(gauss.at({0, 0}) > gauss.at({2, 0}));
  CHECK(gauss.at({2, 0}) == Approx(gauss.at({-2, 0})));
  CHECK(gauss.at({1, 1}) == Approx(0.5 * gauss.at({1, 0})));
  CHECK_THROWS_AS(SchmidtSpectrum::from_values(t, Eigen::VectorXd::Ones(3)), Error);
  CHECK_THROWS_AS(SchmidtSpectrum::gaussian(t, 1.0, 1.5), Error);

  const auto d = decompose_object(disk(GridSpec{}, 0.1), t);
  CHECK_THROWS_AS(idler_state(d, SchmidtSpectrum::flat(Truncation{3, 2})), Error);
}

TEST_CASE("flat spectrum passes the object amplitudes through") {
  const DoubleSlit slit = make_double_slit(kImagingGrid);
  const Truncation t{6, 4};
  const auto d = decompose_object(signal_projection(slit.object), t);
  const auto idler = idler_state(d, SchmidtSpectrum::flat(t));
  const double c = 1.0 / std::sqrt(double(t.size()));
  CHECK((idler.amplitudes - d.amplitudes * c).norm() < 1e-14);
}

TEST_CASE("spectrum on l = 0 keeps the azimuthally symmetric part") {
  const DoubleSlit slit = make_double_slit(kImagingGrid);
  const Truncation t{6, 4};
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(t.size());
  for (int p = 0; p <= t.p_max; ++p) lambda(t.index({0, p})) = 1.0;
  const auto d = decompose_object(signal_projection(slit.object), t);
  const auto idler = idler_state(d, SchmidtSpectrum::from_values(t, lambda));
  for (int k = 0; k < t.size(); ++k) {
    const LGIndex i = t.at(k);
    if (i.ell == 0)
      CHECK(std::abs(idler.amplitudes(k) - d.amplitudes(k) / std::sqrt(5.0)) < 1e-14);
    else
      CHECK(idler.amplitudes(k) == std::complex<double>{});
  }
}

TEST_CASE("single-mode spectrum with a matching object") {
  const GridSpec g{};
  const Truncation t{2, 1};
  ComplexImage u = lg_mode_field({1, 0}, g).field;
  u /= u.abs().maxCoeff();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(t.size());
  lambda(t.index({1, 0})) = 1.0;
  const auto d = decompose_object(signal_projection(ObjectField(g, u)), t);
  const auto idler = idler_state(d, SchmidtSpectrum::from_values(t, lambda));
  int nonzero = 0;
  for (int k = 0; k < t.size(); ++k)
    if (std::abs(idler.amplitudes(k)) > 1e-4) ++nonzero;
  CHECK(nonzero == 1);
  // Signal l = +1 pairs with idler l = -1 and the conjugated object carries l = -1.
  CHECK(std::abs(idler.amplitude({-1, 0}) - 1.0) < 1e-4);
}

TEST_CASE("pure LG(0,0) idler images as a Gaussian") {
  const GridSpec g{};
  ModeDecomposition idler{Truncation{1, 1}, Eigen::VectorXcd::Zero(6), false};
  idler.amplitudes(idler.truncation.index({0, 0})) = 1.0;
  const Image img = ghost_intensity(idler, g);
  CHECK(img.sum() == Approx(1.0));
  const double w = g.waist_mm;
  for (int row : {40, 100, 127}) {
    const double r2 = g.x_mm(row) * g.x_mm(row) + g.y_mm(row) * g.y_mm(row);
    const double expect = 2 / (std::numbers::pi * w * w) * std::exp(-2 * r2 / (w * w)) * g.pixel_area();
    CHECK(img(row, row) == Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("ghost image converges to |psi|^2 as the truncation grows") {
  const DoubleSlit slit = make_double_slit(kImagingGrid);
  const Image target = slit.object.values().abs2() / slit.object.values().abs2().sum();
  double previous = 1e300, previous_energy = 0;
  for (int m : {2, 4, 8, 12}) {
    const Truncation t{m, m};
    const auto d = decompose_object(signal_projection(slit.object), t);
    const Image img = ghost_intensity(idler_state(d, SchmidtSpectrum::flat(t)), kImagingGrid);
    const double distance = std::sqrt(((img / img.sum()) - target).square().sum());
    MESSAGE("truncation " << m << ": L2 distance " << distance << ", captured " << d.captured_energy());
    CHECK(distance < previous);
    CHECK(d.captured_energy() >= previous_energy);
    CHECK(d.captured_energy() <= 1.0 + 1e-6);
    previous = distance;
    previous_energy = d.captured_energy();
  }
}

TEST_CASE("ghost image of the slit is brightest inside the openings") {
  const DoubleSlit slit = make_double_slit(kImagingGrid);
  const Truncation t{10, 6};
  const auto d = decompose_object(signal_projection(slit.object), t);
  const Image img = ghost_intensity(idler_state(d, SchmidtSpectrum::flat(t)), kImagingGrid);
  double in = 0, out = 0;
  int n_in = 0, n_out = 0;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      if (std::abs(slit.object.values()(r, c)) > 0.5) {
        in += img(r, c);
        ++n_in;
      } else {
        out += img(r, c);
        ++n_out;
      }
  CHECK(in / n_in > 20 * out / n_out);
  // Each opening holds about half of the image.
  double left = 0;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols() / 2; ++c) left += img(r, c);
  CHECK(left / img.sum() == Approx(0.5).epsilon(0.05));
}

TEST_CASE("channel images separate exactly") {
  const auto state = PolarizationState<>::from_hardy(0.43, 0.9, std::numbers::pi);
  const auto angles = solve_hardy_angles(0.43 / std::hypot(0.43, 0.9), 0.9 / std::hypot(0.43, 0.9));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  Image spatial(32, 32);
  for (auto& x : spatial.reshaped()) x = u(rng);
  const Image ch4 = channel_image(4, state, angles, spatial);
  for (int m = 1; m <= 3; ++m) CHECK(channel_image(m, state, angles, spatial).abs().maxCoeff() < 1e-12 * ch4.maxCoeff());
  const double p4 = channel_probability(state, angles, Channel::a1_b1);
  CHECK(((ch4 - spatial * p4).abs() <= 1e-10 * ch4.abs()).all());
  CHECK(p4 == Approx(0.08999).epsilon(1e-4 / 0.09));
  CHECK_THROWS_AS(channel_image(5, state, angles, spatial), Error);

  const double s = 1 / std::numbers::sqrt2;
  const auto bell = PolarizationState<>::from_hardy(s, s, std::numbers::pi);
  CHECK(channel_image(Channel::a1_b1, bell, solve_hardy_angles(s, s), spatial).abs().maxCoeff() < 1e-15);
}
