#include <doctest.h>

#include <cmath>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/fields.hpp"

using namespace effmap;
using std::numbers::pi;

namespace {

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("gaussian input: peak, normalisation and 1/e point") {
  MembraneConfig cfg;
  const CartesianGrid2D g = device_grid(cfg, 256);
  const ScalarField u = gaussian_input(cfg, g);
  CHECK(std::abs(power(u) - 1.0) < 1e-9);
  const double peak = std::sqrt(1.0 / (pi * cfg.w0 * cfg.w0));
  // Odd cell count puts a node on the origin and on (w0√2, 0).
  const double h = cfg.w0 * std::sqrt(2.0) / 40.0;
  const CartesianGrid2D fine{Axis{-h * 241.5, h * 241.5, 483}, Axis{-h * 241.5, h * 241.5, 483}};
  const ScalarField v = gaussian_input(cfg, fine);
  const std::size_t c = 241;
  CHECK(std::abs(v.values[fine.index(c, c)].real() - peak) < 1e-9 * peak);
  CHECK(std::abs(fine.x.node(c + 40) - cfg.w0 * std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v.values[fine.index(c + 40, c)].real() - peak * std::exp(-1.0)) < 1e-9 * peak);
}

TEST_CASE("gaussian input refuses a window narrower than 6 w0") {
  MembraneConfig cfg;
  const CartesianGrid2D g{Axis{-3 * cfg.w0, 3 * cfg.w0, 64}, Axis{-6 * cfg.w0, 6 * cfg.w0, 64}};
  CHECK_THROWS_AS(gaussian_input(cfg, g), DomainError);
}

TEST_CASE("membrane mode: antinode, node line and zero count") {
  MembraneConfig cfg;
  const CartesianGrid2D pt{Axis{cfg.Lx / 4 - 1e-9, cfg.Lx / 4 + 1e-9, 2}, Axis{-1e-9, 1e-9, 2}};
  CHECK(membrane_mode(cfg, pt).values[0] == doctest::Approx(1.0).epsilon(1e-9));

  const CartesianGrid2D line{Axis{-1e-12, 1e-12, 2}, Axis{-cfg.Ly / 2, cfg.Ly / 2, 101}};
  for (double v : membrane_mode(cfg, line).values) CHECK(std::abs(v) < 1e-7);

  cfg.m = 10;
  const CartesianGrid2D row{Axis{-cfg.Lx / 2, cfg.Lx / 2, 1001}, Axis{-1e-9, 1e-9, 2}};
  const RealField psi = membrane_mode(cfg, row);
  int zeros = 0;
  for (std::size_t i = 0; i + 1 < row.x.n; ++i) {
    if ((psi.values[i] > 0) != (psi.values[i + 1] > 0)) ++zeros;
  }
  CHECK(zeros == 9);
}

TEST_CASE("QPD-insensitive modes are rejected") {
  MembraneConfig cfg;
  cfg.m = 3;
  CHECK_THROWS_AS(cfg.require_qpd_mode(), UnsupportedModeError);
  cfg.m = 2;
  cfg.n = 2;
  CHECK_THROWS_AS(cfg.require_qpd_mode(), UnsupportedModeError);
}

TEST_CASE("reflection: zero mode, bound and information integral") {
  MembraneConfig cfg;
  const CartesianGrid2D g = device_grid(cfg, 256);
  const ScalarField u = gaussian_input(cfg, g);
  RealField zero{g, std::vector<double>(g.size(), 0.0)};
  CHECK(max_abs(reflect(u, zero).us.values) == 0.0);

  for (int m : {2, 4, 6, 8, 10}) {
    cfg.m = m;
    const FieldPair f = reflect(u, membrane_mode(cfg, g));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(f.us.values[i]) <= 2 * std::abs(u.values[i]) + 1e-300);
    const double a = cfg.km() * cfg.w0;
    const double b = cfg.kn() * cfg.w0;
    const double expected = (1 - std::exp(-a * a)) * (1 + std::exp(-b * b));
    CHECK(std::abs(power(f.us) - expected) < 1e-4);
  }
}

TEST_CASE("phase-contrast image: first-order intensity") {
  MembraneConfig cfg;
  cfg.m = 6;
  const OpticalParams params{1064e-9, 1.7};
  const CartesianGrid2D g = device_grid(cfg, 64);
  const ScalarField u = gaussian_input(cfg, g);
  const RealField psi = membrane_mode(cfg, g);
  const FirstOrderIntensity I = first_order_intensity(phase_contrast_image(u, psi), params);
  const double a2 = params.alpha * params.alpha;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect = 4 * params.k() * psi.values[i] * a2 * std::norm(u.values[i]);
    CHECK(std::abs(I.coefficient[i] - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
  }
  RealField zero{g, std::vector<double>(g.size(), 0.0)};
  const FirstOrderIntensity I0 = first_order_intensity(phase_contrast_image(u, zero), params);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(I0.stationary[i] == a2 * std::norm(u.values[i]));
    CHECK(I0.coefficient[i] == 0.0);
  }
  RealField flipped = psi;
  for (double& v : flipped.values) v = -v;
  const FirstOrderIntensity If = first_order_intensity(phase_contrast_image(u, flipped), params);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(If.coefficient[i] == -I.coefficient[i]);
}

TEST_CASE("fraunhofer: far-field waist and power") {
  MembraneConfig cfg;
  const double k = OpticalParams{}.k();
  cfg.z_d = MembraneConfig::z_for_waist(560e-6, k, cfg.w0);
  const SeparablePair dev = device_fields(cfg, 256);
  const CartesianGrid2D out = far_grid(cfg, k, 1024, 256);
  const SeparablePair far = fraunhofer(dev, cfg, k, out.x, out.y);
  const FieldPair ff = far.expand();
  CHECK(std::abs(power(ff.u0) - 1.0) < 1e-4);
  CHECK(std::abs(power(ff.us) - power(dev.expand().us)) < 1e-4);

  double m0 = 0, m2 = 0;
  for (std::size_t ix = 0; ix < out.x.n; ++ix) {
    const double p = std::norm(far.u0.fx[ix]);
    m0 += p;
    m2 += p * out.x.node(ix) * out.x.node(ix);
  }
  const double w = std::sqrt(2 * m2 / m0);
  CHECK(std::abs(w / 560e-6 - 1.0) < 0.01);
}

TEST_CASE("fraunhofer: resolved first orders sit at +-k_m z / k") {
  MembraneConfig cfg;
  cfg.m = 10;
  cfg.w0 = 200e-6;
  const double k = OpticalParams{}.k();
  const SeparablePair dev = device_fields(cfg, 256);
  const CartesianGrid2D out = far_grid(cfg, k, 2048, 64);
  const SeparableField us = fraunhofer(dev.us, cfg, k, out.x, out.y);
  std::size_t best = 0;
  for (std::size_t i = out.x.n / 2; i < out.x.n; ++i) {
    if (std::norm(us.fx[i]) > std::norm(us.fx[best])) best = i;
  }
  const double expected = cfg.z_d * cfg.km() / k;
  CHECK(std::abs(out.x.node(best) - expected) < 0.02 * expected);
  CHECK(std::abs(std::norm(us.fx[out.x.n - 1 - best]) - std::norm(us.fx[best])) < 1e-9 * std::norm(us.fx[best]));
}

TEST_CASE("fraunhofer refuses a window that misses the first orders") {
  MembraneConfig cfg;
  cfg.m = 10;
  const double k = OpticalParams{}.k();
  const double wd = cfg.w_d(k);
  const SeparablePair dev = device_fields(cfg, 128);
  const Axis narrow{-2 * wd, 2 * wd, 64};
  CHECK_THROWS_AS(fraunhofer(dev, cfg, k, narrow, narrow), DomainError);
}

TEST_CASE("optical lever fields: information, symmetry and agreement with propagation") {
  MembraneConfig cfg;
  const double k = OpticalParams{}.k();
  cfg.w0 = 0.05 / cfg.km();
  const double wd = cfg.w_d(k);
  const double a = cfg.km() * cfg.w0;
  const Axis x{-6 * wd, 6 * wd, 512};
  const Axis y{-6 * wd, 6 * wd, 256};
  const SeparablePair lever = optical_lever_fields(cfg, k, x, y);
  CHECK(std::abs(power(lever.expand().us) / (2 * a * a) - 1.0) < 1e-6);

  const Axis x_odd{-6 * wd, 6 * wd, 513};
  const SeparablePair lever_odd = optical_lever_fields(cfg, k, x_odd, y);
  CHECK(std::abs(lever_odd.us.fx[256]) < 1e-12 * max_abs(lever_odd.us.fx));

  const SeparablePair numeric = fraunhofer(device_fields(cfg, 256), cfg, k, x, y, false);
  const FieldPair ln = lever.expand();
  const FieldPair nn = numeric.expand();
  const double peak_s = max_abs(ln.us.values);
  const double peak_0 = max_abs(ln.u0.values);
  double dev_s = 0, dev_0 = 0;
  for (std::size_t i = 0; i < ln.us.values.size(); ++i) {
    dev_s = std::max(dev_s, std::abs(ln.us.values[i] - nn.us.values[i]));
    dev_0 = std::max(dev_0, std::abs(ln.u0.values[i] - nn.u0.values[i]));
  }
  CHECK(dev_s < 0.01 * peak_s);
  CHECK(dev_0 < 0.01 * peak_0);

  cfg.w0 = 100e-6;
  CHECK_THROWS_AS(optical_lever_fields(cfg, k, x, y), LimitInvalidError);
}
