#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/membrane.hpp"

using namespace effmap;
using std::numbers::pi;

namespace {

FarFieldSource lever_source(const OpticalParams& params = {}) {
  MembraneConfig cfg;
  cfg.w0 = 0.05 / cfg.km();
  return FarFieldSource(cfg, params, FieldModel::OpticalLever);
}

FarFieldSource numeric_source(int m, const OpticalParams& params = {}) {
  MembraneConfig cfg;
  cfg.m = m;
  return FarFieldSource(cfg, params, FieldModel::Numeric);
}

double peak_abs(const std::vector<double>& v) {
  double p = 0.0;
  for (double x : v) p = std::max(p, std::abs(x));
  return p;
}

}  // namespace

TEST_CASE("standard QPD sensitivity, noise and information match the closed forms") {
  const OpticalParams params{1064e-9, 1.3};
  for (int m : {2, 4, 6, 8, 10}) {
    const FarFieldSource src = numeric_source(m, params);
    const Evaluation e = evaluate(src, WeightFunction::qpd());
    const DetectionBudget an = analytic_budget(src.config(), params);
    CAPTURE(m);
    CHECK(std::abs(e.budget.S / an.S - 1) < 1e-3);
    CHECK(std::abs(e.budget.N - params.alpha * params.alpha) < 1e-6 * params.alpha * params.alpha);
    CHECK(std::abs(e.budget.I / an.I - 1) < 1e-3);
  }
}

TEST_CASE("field-level functionals agree with the term-level ones") {
  MembraneConfig cfg;
  const OpticalParams params;
  const CartesianGrid2D g = device_grid(cfg, 128);
  const FieldPair f = reflect(gaussian_input(cfg, g), membrane_mode(cfg, g));
  const PointTerms t = point_terms(f);
  const std::vector<double> w = WeightFunction::qpd().sample(g);
  const Probe p = Probe::from(params);
  CHECK(sensitivity(f, WeightFunction::qpd(), params) == sensitivity(t, w, p));
  CHECK(noise(f, WeightFunction::qpd(), params) == noise(t, w, p));
  CHECK(ideal_information(f, params) == ideal_information(t, p));
  CHECK(sensitivity(f, WeightFunction::zero(), params) == 0.0);
}

TEST_CASE("optical lever: linear weighting") {
  const OpticalParams params{1064e-9, 2.0};
  const FarFieldSource src = lever_source(params);
  const double a = src.config().km() * src.config().w0;
  const double a2 = params.alpha * params.alpha;
  const double k = params.k();
  const Evaluation e = evaluate(src, WeightFunction::linear(src.w_d()));
  CHECK(std::abs(e.budget.S / (-2 * a2 * k * a) - 1) < 1e-4);
  CHECK(std::abs(e.budget.N / (a2 / 2) - 1) < 1e-4);
  CHECK(std::abs(e.budget.I / (8 * k * k * a * a * a2) - 1) < 1e-4);
  CHECK(std::abs(e.budget.eta - 1) < 1e-3);
}

TEST_CASE("optical lever: standard and blocked QPD") {
  const FarFieldSource src = lever_source();
  const Evaluation e = evaluate(src, WeightFunction::qpd());
  CHECK(std::abs(e.budget.eta - 2 / pi) < 1e-3);

  const Evaluation b = evaluate(src, WeightFunction::blocked_qpd(0.87 * src.w_d()));
  CHECK(std::abs(b.budget.N - (1 - std::erf(0.87 / 2))) < 1e-3);

  for (double B = 0.0; B <= 3.0; B += 0.25) {
    const Evaluation eb = evaluate(src, WeightFunction::blocked_qpd(B * src.w_d()));
    CAPTURE(B);
    CHECK(std::abs(eb.budget.eta - lever_blocked_eta(B)) < 1e-3);
  }
}

TEST_CASE("ideal weighting saturates the bound") {
  const FarFieldSource src = numeric_source(4);
  const Evaluation e = evaluate(src, WeightFunction::qpd());
  const DetectionBudget ideal = ideal_budget(e.terms, src.probe());
  CHECK(std::abs(ideal.eta - 1) < 1e-4);
  CHECK(std::abs(ideal.S_imp * ideal.S_ba / (kHbar * kHbar) - 0.25) < 1e-6);
}

TEST_CASE("budget invariants") {
  const FarFieldSource src = numeric_source(6);
  const Evaluation e = evaluate(src, WeightFunction::qpd());
  const DetectionBudget& b = e.budget;
  CHECK(b.eta >= 0.0);
  CHECK(b.eta <= 1.0 + 1e-6);
  CHECK(b.S_imp >= b.S_ideal);
  CHECK(std::abs(b.S_ideal * b.S_ba / (kHbar * kHbar) - 0.25) < 1e-15);
  CHECK(std::abs(b.eta - b.S_ideal / b.S_imp) < 1e-12);
}

TEST_CASE("efficiency does not depend on the weighting scale") {
  const FarFieldSource src = numeric_source(4);
  const WeightFunction f = WeightFunction::blocked_qpd(0.5 * src.w_d());
  const double eta = evaluate(src, f).budget.eta;
  for (double c : {-3.0, 0.01, 7.5}) CHECK(std::abs(evaluate(src, f.scaled(c)).budget.eta - eta) < 1e-9);
}

TEST_CASE("degenerate weightings raise") {
  const FarFieldSource src = numeric_source(2);
  CHECK_THROWS_AS(evaluate(src, WeightFunction::zero()), DegenerateWeightingError);
  // A y-split is even in x: no signal from an x-odd mode.
  const WeightFunction ysplit = WeightFunction::piecewise(
      {Region{-1, 1, 0, 1, 1.0, 0.0}, Region{-1, 1, -1, 0, -1.0, 0.0}});
  CHECK_THROWS_AS(evaluate(src, ysplit), DegenerateWeightingError);
}

TEST_CASE("quantum efficiency scales eta and imprecision") {
  const DetectionBudget b = assemble_budget(-2.0, 1.0, 5.0);
  const DetectionBudget q = with_quantum_efficiency(b, 0.87);
  CHECK(q.eta == doctest::Approx(b.eta * 0.87).epsilon(1e-15));
  CHECK(q.S_imp == doctest::Approx(b.S_imp / 0.87).epsilon(1e-15));
  CHECK(q.eta_qe == 0.87);
  CHECK_THROWS_AS(with_quantum_efficiency(b, 0.0), PreconditionError);
  CHECK_THROWS_AS(with_quantum_efficiency(b, 1.2), PreconditionError);
}

TEST_CASE("weight sampling checks alignment") {
  const CartesianGrid2D g{Axis{-1, 1, 10}, Axis{-1, 1, 4}};
  CHECK_THROWS_AS(WeightFunction::blocked_qpd(0.3).sample(g), AlignmentError);
  CHECK_NOTHROW(WeightFunction::blocked_qpd(0.4).sample(g));
  CHECK(WeightFunction::blocked_qpd(0.0).sample(g) == WeightFunction::qpd().sample(g));
  const WeightFunction c = WeightFunction::custom(g, std::vector<double>(g.size(), 1.0));
  CHECK_THROWS_AS(c.sample(CartesianGrid2D{Axis{-1, 1, 8}, Axis{-1, 1, 4}}), DimensionError);
}

TEST_CASE("DDE integrates to eta and has the expected shape") {
  for (int m : {2, 6, 10}) {
    const FarFieldSource src = numeric_source(m);
    const Evaluation e = evaluate(src, WeightFunction::qpd());
    const DdeProfile p = dde_map(e.terms, e.f, src.probe(), e.budget);
    CAPTURE(m);
    CHECK(p.residual() < 1e-4);
    CHECK(std::abs(p.ideal_integral - 1.0) < 1e-4);
    CHECK(p.ideal_integral >= p.integral_check);
    for (double v : p.ideal) CHECK(v >= 0.0);
    if (m == 6) {
      const LineProfile line = reduce_over_y(p, e.grid);
      const std::size_t c = e.grid.x.n / 2;  // first node right of x = 0
      CHECK(line.x[c] > 0.0);
      CHECK(line.dde[c] < 0.0);
    }
  }
}

TEST_CASE("ideal DDE vanishes on axis in the optical lever limit") {
  const FarFieldSource src = lever_source();
  const double wd = src.w_d();
  const CartesianGrid2D g{Axis{-6 * wd, 6 * wd, 1025}, Axis{-6 * wd, 6 * wd, 128}};
  const PointTerms t = src.terms_on(g, false);
  const DdeProfile p = ideal_dde(t, src.probe());
  const LineProfile line = reduce_over_y(p, g);
  CHECK(std::abs(line.ideal[512]) < 1e-12 * peak_abs(line.ideal));
  // dη/dx = (2/√π w_d)(x²/w_d²) e^{−x²/w_d²}
  for (std::size_t i = 0; i < g.x.n; i += 64) {
    const double u = line.x[i] / wd;
    const double expect = 2 / (std::sqrt(pi) * wd) * u * u * std::exp(-u * u);
    CHECK(std::abs(line.ideal[i] - expect) < 1e-3 * peak_abs(line.ideal));
  }
}

TEST_CASE("exclusion estimator") {
  const FarFieldSource src = numeric_source(2);
  const double wd = src.w_d();
  const WeightFunction fw = WeightFunction::qpd();
  std::vector<double> xs;
  for (double x = -2.5; x <= 2.5; x += 0.25) xs.push_back(x * wd + 0.5 * wd / 200);
  const WireScan fine = wire_scan_sim(src, fw, wd / 200, xs);
  const double peak = peak_abs(fine.profile.dde);
  for (const WireSample& s : fine.samples) {
    CAPTURE(s.x / wd);
    CHECK(std::abs(s.measured - s.dde_at_x) < 0.01 * peak);
  }

  const Evaluation e = evaluate(src, WeightFunction::blocked_qpd(wd));
  const double half = 0.25 * wd;
  const CartesianGrid2D piece{Axis{-half, half, 16}, e.grid.y};
  const PointTerms t = src.terms_on(piece, false);
  const ElementShare share = element_share(t, WeightFunction::blocked_qpd(wd).sample(piece), src.probe());
  CHECK(share.S == 0.0);
  CHECK(share.N == 0.0);
  CHECK(dde_by_exclusion(e.budget, share, 2 * half) == 0.0);
}

TEST_CASE("scan_1d tie-break, boundary maxima and refinement") {
  const ScanResult flat = scan_1d([](double) { return 1.0; }, 2.0, 6.0, 11);
  CHECK(flat.x_best == doctest::Approx(4.0));
  const ScanResult up = scan_1d([](double x) { return x; }, 0.0, 1.0, 11);
  CHECK(up.x_best == 1.0);
  const ScanResult down = scan_1d([](double x) { return -x; }, 0.0, 1.0, 11);
  CHECK(down.x_best == 0.0);
  const ScanResult par = scan_1d([](double x) { return -(x - 0.3141) * (x - 0.3141); }, 0.0, 1.0, 11);
  CHECK(par.refined);
  CHECK(par.x_best == doctest::Approx(0.3141).epsilon(1e-9));
  CHECK_THROWS_AS(scan_1d([](double x) { return x; }, 0.0, 1.0, 2), PreconditionError);
}

TEST_CASE("blocked QPD optimum in the optical lever limit") {
  const FarFieldSource src = lever_source();
  const BlockOptimization r = block_optimization(src, 0.0, 3 * src.w_d(), 201);
  CHECK(std::abs(r.B_best / src.w_d() - 0.87) < 0.02);
  CHECK(std::abs(r.eta_best - 0.81) < 0.01);
  CHECK(std::abs(r.blocked_fraction - 0.46) < 0.01);
  const Evaluation e = evaluate(src, WeightFunction::blocked_qpd(r.B_best));
  const DdeProfile p = dde_map(e.terms, e.f, src.probe(), e.budget);
  double mn = 0;
  for (double v : p.dde) mn = std::min(mn, v);
  CHECK(mn >= -1e-3 * peak_abs(p.dde));
}

TEST_CASE("derivative sign changes") {
  const std::vector<double> single = {0.1, 0.3, 0.5, 0.4, 0.2};
  CHECK(derivative_sign_changes(single) == 1);
  const std::vector<double> two = {0.1, 0.3, 0.2, 0.4, 0.1};
  CHECK(derivative_sign_changes(two) == 3);
  const std::vector<double> flat = {0.5, 0.5, 0.5};
  CHECK(derivative_sign_changes(flat) == 0);
}
