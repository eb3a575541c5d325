#include "effmap/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/simd.hpp"

namespace effmap {
namespace {

double fraction_inside(const Evaluation& e, double half) {
  double inside = 0.0;
  double total = 0.0;
  const CartesianGrid2D& g = e.grid;
  for (std::size_t iy = 0; iy < g.y.n; ++iy) {
    for (std::size_t ix = 0; ix < g.x.n; ++ix) {
      const double v = e.terms.w_p0[g.index(ix, iy)];
      total += v;
      if (std::abs(g.x.node(ix)) < half) inside += v;
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

}  // namespace

FarFieldSource::FarFieldSource(const MembraneConfig& cfg, const OpticalParams& params, FieldModel model,
                               const MembraneGridOptions& options)
    : cfg_(cfg), params_(params), model_(model), options_(options) {
  cfg_.validate();
  cfg_.require_qpd_mode();
  params_.validate();
  if (model_ == FieldModel::Numeric) {
    device_ = device_fields(cfg_, options_.device_n);
  } else {
    // Fail early when the tilting-mirror form does not apply.
    const Axis probe_axis{-1.0, 1.0, 2};
    (void)optical_lever_fields(cfg_, k(), probe_axis, probe_axis, options_.lever_threshold);
  }
}

double FarFieldSource::half_x() const { return (cfg_.km() * cfg_.w0 + 6.0) * w_d(); }
double FarFieldSource::half_y() const { return 6.0 * w_d(); }

CartesianGrid2D FarFieldSource::grid_for(const WeightFunction& fw) const {
  const double hx = half_x();
  const std::vector<double> breaks = fw.x_breaks().within(-hx, hx);
  const Axis x = Axis::symmetric_aligned(hx, 2.0 * hx / static_cast<double>(options_.far_nx), breaks);
  const Axis y{-half_y(), half_y(), options_.far_ny};
  return CartesianGrid2D{x, y};
}

SeparablePair FarFieldSource::fields_on(const Axis& x, const Axis& y, bool check_window) const {
  if (model_ == FieldModel::OpticalLever) {
    return optical_lever_fields(cfg_, k(), x, y, options_.lever_threshold);
  }
  return fraunhofer(device_, cfg_, k(), x, y, check_window);
}

PointTerms FarFieldSource::terms_on(const CartesianGrid2D& grid, bool check_window) const {
  return point_terms(fields_on(grid.x, grid.y, check_window));
}

Evaluation evaluate(const FarFieldSource& source, const WeightFunction& fw) {
  Evaluation e;
  e.grid = source.grid_for(fw);
  e.f = fw.sample(e.grid);
  e.terms = source.terms_on(e.grid);
  e.budget = budget(e.terms, e.f, source.probe());
  return e;
}

DetectionBudget analytic_budget(const MembraneConfig& cfg, const OpticalParams& params) {
  cfg.validate();
  cfg.require_qpd_mode();
  const double a = cfg.km() * cfg.w0;
  const double b = cfg.kn() * cfg.w0;
  const double a2 = params.alpha * params.alpha;
  const double k = params.k();
  const double S = -4.0 * a2 * k * std::erf(0.5 * a) * std::exp(-0.25 * a * a) * std::exp(-0.25 * b * b);
  const double N = a2;
  const double I = 4.0 * a2 * k * k * (1.0 - std::exp(-a * a)) * (1.0 + std::exp(-b * b));
  return assemble_budget(S, N, I);
}

double lever_blocked_eta(double block_over_wd) {
  const double B = block_over_wd;
  return (2.0 / std::numbers::pi) * std::exp(-0.5 * B * B) / (1.0 - std::erf(0.5 * B));
}

DetectionBudget interferometer_benchmark(const OpticalParams& params) {
  params.validate();
  const double alpha = params.alpha;
  const double k = params.k();
  DetectionBudget b;
  b.I = 16.0 * (alpha * alpha) * (k * k);
  b.N = alpha * alpha;
  b.S = std::sqrt(b.N * b.I);
  b.S_ideal = 1.0 / b.I;
  b.S_imp = b.S_ideal;
  b.eta = 1.0;
  b.S_ba = 0.25 * kHbar * kHbar * b.I;
  return b;
}

double blocked_power_fraction(const FarFieldSource& source, double block_width) {
  Evaluation e;
  e.grid = source.grid_for(WeightFunction::blocked_qpd(block_width));
  e.terms = source.terms_on(e.grid);
  return fraction_inside(e, 0.5 * block_width);
}

BlockOptimization block_optimization(const FarFieldSource& source, double B_lo, double B_hi, std::size_t n) {
  if (!(B_lo >= 0.0) || B_hi < B_lo) throw PreconditionError("block range must satisfy 0 <= B_lo <= B_hi");
  BlockOptimization r;
  const Evaluation standard = evaluate(source, WeightFunction::qpd());
  r.eta_standard = standard.budget.eta;
  if (B_hi == B_lo) {
    const Evaluation e = evaluate(source, WeightFunction::blocked_qpd(B_lo));
    r.B_best = B_lo;
    r.eta_best = e.budget.eta;
    r.blocked_fraction = fraction_inside(e, 0.5 * B_lo);
    r.scan.xs = {B_lo};
    r.scan.fs = {r.eta_best};
    r.scan.x_best = B_lo;
    r.scan.f_best = r.eta_best;
    r.blocked_fractions = {r.blocked_fraction};
    return r;
  }
  std::vector<double> fractions;
  auto objective = [&](double B) {
    Evaluation e;
    e.grid = source.grid_for(WeightFunction::blocked_qpd(B));
    e.f = WeightFunction::blocked_qpd(B).sample(e.grid);
    e.terms = source.terms_on(e.grid);
    fractions.push_back(fraction_inside(e, 0.5 * B));
    try {
      return budget(e.terms, e.f, source.probe()).eta;
    } catch (const DegenerateWeightingError&) {
      return 0.0;
    }
  };
  r.scan = scan_1d(objective, B_lo, B_hi, n);
  fractions.resize(n);
  r.blocked_fractions = std::move(fractions);
  r.B_best = r.scan.x_best;
  r.eta_best = r.scan.f_best;
  r.blocked_fraction = blocked_power_fraction(source, r.B_best);
  return r;
}

BlockOptimization block_optimization(const FarFieldSource& source, std::size_t n) {
  const double a = source.config().km() * source.config().w0;
  return block_optimization(source, 0.0, std::max(3.0, 2.0 * a + 2.0) * source.w_d(), n);
}

std::vector<SweepRow> relative_sensitivity_sweep(const std::vector<std::pair<int, int>>& modes,
                                                 const MembraneConfig& tmpl, const OpticalParams& params,
                                                 FieldModel model, bool blocked, const MembraneGridOptions& options) {
  const DetectionBudget ref = interferometer_benchmark(params);
  std::vector<SweepRow> rows;
  for (const auto& [m, n] : modes) {
    MembraneConfig cfg = tmpl;
    cfg.m = m;
    cfg.n = n;
    const FarFieldSource source(cfg, params, model, options);
    DetectionBudget b;
    double B = 0.0;
    if (blocked) {
      const BlockOptimization opt = block_optimization(source);
      B = opt.B_best;
      b = evaluate(source, WeightFunction::blocked_qpd(B)).budget;
    } else {
      b = evaluate(source, WeightFunction::qpd()).budget;
    }
    SweepRow row;
    row.m = m;
    row.n = n;
    row.kmw0 = cfg.km() * cfg.w0;
    row.S_imp_rel = b.S_imp / ref.S_imp;
    row.eta = b.eta;
    row.S_ba_rel = b.S_ba / ref.S_ba;
    row.B_over_wd = B / source.w_d();
    row.optical_lever = row.kmw0 <= 0.1 && cfg.kn() * cfg.w0 <= 0.1;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.kmw0 < b.kmw0; });
  return rows;
}

double WireScan::max_deviation_over_peak() const {
  double peak = 0.0;
  for (double v : profile.dde) peak = std::max(peak, std::abs(v));
  double dev = 0.0;
  for (const WireSample& s : samples) dev = std::max(dev, std::abs(s.measured - s.box_averaged));
  return peak > 0.0 ? dev / peak : 0.0;
}

WireScan wire_scan_sim(const FarFieldSource& source, const WeightFunction& fw, double width,
                       std::span<const double> positions) {
  if (!(width > 0.0)) throw PreconditionError("wire width must be positive");
  const Evaluation full = evaluate(source, fw);
  const Probe probe = source.probe();
  WireScan scan;
  scan.width = width;
  scan.budget = full.budget;
  scan.profile = reduce_over_y(dde_map(full.terms, full.f, probe, full.budget), full.grid);

  const DetectionBudget& b = full.budget;
  const double ratio = b.S / b.N;
  const double h_target = std::min(width / 16.0, full.grid.x.step());
  for (double xc : positions) {
    const double x0 = xc - 0.5 * width;
    const double x1 = xc + 0.5 * width;
    if (x0 < full.grid.x.lo || x1 > full.grid.x.hi) {
      throw DomainError("wire position " + std::to_string(xc) + " m lies outside the detection window");
    }
    std::vector<double> cuts = {x0};
    for (double p : fw.x_breaks().within(x0, x1)) cuts.push_back(p);
    cuts.push_back(x1);
    ElementShare share;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      const auto cells = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(len / h_target)));
      const CartesianGrid2D piece{Axis{cuts[i], cuts[i + 1], cells}, full.grid.y};
      const PointTerms t = source.terms_on(piece, false);
      const ElementShare part = element_share(t, fw.sample(piece), probe);
      share.S += part.S;
      share.N += part.N;
    }
    WireSample s;
    s.x = xc;
    s.measured = dde_by_exclusion(b, share, width);
    s.box_averaged = (2.0 * ratio * share.S - ratio * ratio * share.N) / (b.I * width);
    const double h = 1e-6 * width;
    const CartesianGrid2D line{Axis{xc - 0.5 * h, xc + 0.5 * h, 2}, full.grid.y};
    const PointTerms lt = source.terms_on(line, false);
    const LineProfile lp = reduce_over_y(dde_map(lt, fw.sample(line), probe, b), line);
    s.dde_at_x = 0.5 * (lp.dde[0] + lp.dde[1]);
    scan.samples.push_back(s);
  }
  return scan;
}

double back_action_device_plane(const ScalarField& u_in, const RealField& psi, const OpticalParams& params) {
  if (u_in.values.size() != psi.values.size()) throw DimensionError("beam and mode profile differ in size");
  std::vector<double> p(u_in.values.size());
  simd::abs2(u_in.values, p);
  const double integral = simd::dot3(p, psi.values, psi.values) * u_in.grid.cell_area();
  const double hk = kHbar * params.k();
  return 4.0 * params.alpha * params.alpha * hk * hk * integral;
}

double back_action_device_plane(const MembraneConfig& cfg, const OpticalParams& params, std::size_t n) {
  const CartesianGrid2D grid = device_grid(cfg, n);
  return back_action_device_plane(gaussian_input(cfg, grid), membrane_mode(cfg, grid), params);
}

}  // namespace effmap
