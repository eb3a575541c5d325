#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/membrane.hpp"

using namespace effmap;
using std::numbers::pi;

namespace {

MembraneConfig mode(int m, int n = 1) {
  MembraneConfig c;
  c.m = m;
  c.n = n;
  return c;
}

}  // namespace

TEST_CASE("closed-form budget matches the numeric pipeline") {
  const OpticalParams params;
  MembraneConfig cfg = mode(2);
  cfg.Lx = 3.5e-3;
  const FarFieldSource src(cfg, params, FieldModel::Numeric);
  CHECK(std::abs(evaluate(src, WeightFunction::qpd()).budget.eta - analytic_budget(cfg, params).eta) < 1e-3);
}

TEST_CASE("closed-form limits") {
  const OpticalParams params;
  MembraneConfig small = mode(2);
  small.w0 = 1e-3 / small.km();
  CHECK(std::abs(analytic_budget(small, params).eta - 2 / pi) < 1e-3);

  MembraneConfig big = mode(40, 41);
  big.w0 = 1e-3;
  const double k = params.k();
  CHECK(std::abs(analytic_budget(big, params).I / (4 * k * k) - 1) < 1e-9);
}

TEST_CASE("interferometer benchmark") {
  const OpticalParams params{1064e-9, 3.0};
  const DetectionBudget b = interferometer_benchmark(params);
  const double k = params.k();
  CHECK(b.S_imp == 1.0 / (16.0 * (params.alpha * params.alpha) * (k * k)));
  CHECK(b.eta == 1.0);
  CHECK(std::abs(b.heisenberg_product_over_hbar2() - 0.25) < 1e-15);
}

TEST_CASE("relative sensitivity sweep") {
  const OpticalParams params;
  MembraneConfig lever = mode(2);
  lever.w0 = 0.05 / lever.km();
  const auto lever_rows = relative_sensitivity_sweep({{2, 1}}, lever, params, FieldModel::OpticalLever, false);
  REQUIRE(lever_rows.size() == 1);
  const double a = lever_rows[0].kmw0;
  CHECK(lever_rows[0].optical_lever);
  CHECK(std::abs(lever_rows[0].S_imp_rel / (pi / (a * a)) - 1) < 0.02);

  const std::vector<std::pair<int, int>> modes = {{10, 1}, {2, 1}, {6, 1}, {4, 1}, {8, 1}};
  const auto standard = relative_sensitivity_sweep(modes, mode(2), params, FieldModel::Numeric, false);
  const auto blocked = relative_sensitivity_sweep(modes, mode(2), params, FieldModel::Numeric, true);
  REQUIRE(standard.size() == 5);
  for (std::size_t i = 1; i < standard.size(); ++i) {
    CHECK(standard[i].kmw0 > standard[i - 1].kmw0);
    if (standard[i].kmw0 > 1.0) CHECK(standard[i].eta < standard[i - 1].eta);
  }
  for (std::size_t i = 0; i < blocked.size(); ++i) CHECK(blocked[i].eta >= standard[i].eta - 1e-12);
}

TEST_CASE("block optimisation across modes") {
  const OpticalParams params;
  double prev = -1.0;
  for (int m : {2, 4, 6, 8, 10}) {
    const FarFieldSource src(mode(m), params, FieldModel::Numeric);
    const BlockOptimization r = block_optimization(src, 101);
    CAPTURE(m);
    CHECK(r.B_best >= prev);
    prev = r.B_best;
    CHECK(r.eta_best >= r.eta_standard);
    if (m == 10) {
      CHECK(r.eta_best / r.eta_standard >= 2.5);
      CHECK(r.blocked_fraction > 0.9);
    }
    if (m == 6) {
      const Evaluation e = evaluate(src, WeightFunction::blocked_qpd(r.B_best));
      const DdeProfile p = dde_map(e.terms, e.f, src.probe(), e.budget);
      const LineProfile line = reduce_over_y(p, e.grid);
      double peak = 0, mn = 0;
      for (double v : line.dde) {
        peak = std::max(peak, std::abs(v));
        mn = std::min(mn, v);
      }
      CHECK(mn >= -1e-3 * peak);
    }
  }
}

TEST_CASE("degenerate block range returns the standard QPD") {
  const FarFieldSource src(mode(4), OpticalParams{}, FieldModel::Numeric);
  const BlockOptimization r = block_optimization(src, 0.0, 0.0, 201);
  CHECK(r.B_best == 0.0);
  CHECK(r.eta_best == r.eta_standard);
  CHECK_THROWS_AS(block_optimization(src, 1.0, 0.5, 11), PreconditionError);
}

TEST_CASE("wire scan of the (2,1) mode shows a central dip between two lobes") {
  MembraneConfig cfg = mode(2);
  const OpticalParams params;
  cfg.z_d = MembraneConfig::z_for_waist(560e-6, params.k(), cfg.w0);
  const FarFieldSource src(cfg, params, FieldModel::Numeric);
  std::vector<double> xs;
  for (int i = -10; i <= 10; ++i) xs.push_back(i * 180e-6);
  const WireScan scan = wire_scan_sim(src, WeightFunction::qpd(), 180e-6, xs);
  const auto& s = scan.samples;
  const WireSample& centre = s[10];
  CHECK(centre.measured < 0.0);
  double left = 0, right = 0;
  for (std::size_t i = 0; i < 10; ++i) left = std::max(left, s[i].measured);
  for (std::size_t i = 11; i < s.size(); ++i) right = std::max(right, s[i].measured);
  CHECK(left > 0.0);
  CHECK(right > 0.0);
  CHECK(left == doctest::Approx(right).epsilon(1e-6));
  const std::vector<double> outside = {10e-3};
  CHECK_THROWS_AS(wire_scan_sim(src, WeightFunction::qpd(), 180e-6, outside), DomainError);
}

TEST_CASE("back action agrees between device and detection planes") {
  const OpticalParams params;
  const MembraneConfig cfg = mode(4);
  const FarFieldSource src(cfg, params, FieldModel::Numeric);
  const DetectionBudget far = evaluate(src, WeightFunction::qpd()).budget;
  CHECK(std::abs(back_action_device_plane(cfg, params) / far.S_ba - 1) < 1e-3);

  const CartesianGrid2D g = device_grid(cfg, 128);
  const ScalarField u = gaussian_input(cfg, g);
  const RealField one{g, std::vector<double>(g.size(), 1.0)};
  const RealField zero{g, std::vector<double>(g.size(), 0.0)};
  const double hk = kHbar * params.k();
  CHECK(std::abs(back_action_device_plane(u, one, params) / (4 * hk * hk) - 1) < 1e-9);
  CHECK(back_action_device_plane(u, zero, params) == 0.0);
}

TEST_CASE("optical lever model refuses large k_m w0") {
  CHECK_THROWS_AS(FarFieldSource(mode(10), OpticalParams{}, FieldModel::OpticalLever), LimitInvalidError);
}
