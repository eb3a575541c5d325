#include "cli/scenarios.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "cli/output.hpp"
#include "effmap/dipole.hpp"
#include "effmap/errors.hpp"
#include "effmap/fisher.hpp"
#include "effmap/membrane.hpp"
#include "effmap/phase_contrast.hpp"

namespace effmap::cli {
namespace {

namespace fs = std::filesystem;

OpticalParams optical_from(const Json& j) {
  OpticalParams p;
  p.wavelength = j.at("wavelength_m").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.validate();
  return p;
}

MembraneConfig membrane_from(const Json& j) {
  MembraneConfig c;
  c.Lx = j.at("Lx_m").get<double>();
  c.Ly = j.at("Ly_m").get<double>();
  c.m = j.at("m").get<int>();
  c.n = j.at("n").get<int>();
  c.w0 = j.at("w0_m").get<double>();
  c.z_d = j.at("z_d_m").get<double>();
  c.validate();
  return c;
}

std::size_t count_from(const Json& j, const char* key) {
  const long long v = j.at(key).get<long long>();
  if (v <= 0) throw ConfigError(std::string("'") + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

MembraneGridOptions grid_from(const Json& j) {
  MembraneGridOptions g;
  g.device_n = count_from(j, "device_n");
  g.far_nx = count_from(j, "far_nx");
  g.far_ny = count_from(j, "far_ny");
  g.lever_threshold = j.at("lever_threshold").get<double>();
  return g;
}

FieldModel model_from(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "numeric") return FieldModel::Numeric;
  if (s == "optical-lever") return FieldModel::OpticalLever;
  throw ConfigError("model must be 'numeric' or 'optical-lever', got '" + s + "'");
}

DipoleAxis axis_from(const std::string& s) {
  if (s == "x0") return DipoleAxis::X0;
  if (s == "y0") return DipoleAxis::Y0;
  if (s == "z0") return DipoleAxis::Z0;
  throw ConfigError("dipole axis must be x0, y0 or z0, got '" + s + "'");
}

DipoleConfig dipole_from(const Json& j) {
  DipoleConfig c;
  c.na = j.at("na").get<double>();
  c.alpha0 = j.at("alpha0").get<double>();
  c.alpha_dip = j.at("alpha_dip").get<double>();
  c.wavelength = j.at("wavelength_m").get<double>();
  c.axis = axis_from(j.at("axis").get<std::string>());
  c.n_theta = count_from(j, "n_theta");
  c.n_phi = count_from(j, "n_phi");
  c.validate();
  return c;
}

Json axis_json(const Axis& a) { return Json{{"lo_m", a.lo}, {"hi_m", a.hi}, {"n", a.n}}; }
Json grid_json(const CartesianGrid2D& g) { return Json{{"x", axis_json(g.x)}, {"y", axis_json(g.y)}}; }
Json sphere_json(const SolidAngleGrid& g) {
  return Json{{"theta_max_rad", g.theta_max}, {"rows", g.n_theta}, {"cells", g.size()}};
}

Json summary_head(const Json& config, const std::string& version) {
  Json s;
  s["tool"] = "effmap";
  s["version"] = version;
  s["scenario"] = config.at("scenario");
  return s;
}

/// Budget keys at the top level, then the DDE residual when there is one.
void put_budget(Json& s, const DetectionBudget& b) {
  const Json j = budget_json(b);
  for (auto it = j.begin(); it != j.end(); ++it) s[it.key()] = it.value();
}

void put_dde(Json& s, const DdeProfile& p) {
  s["dde_integral"] = p.integral_check;
  s["dde_residual"] = p.residual();
  s["ideal_dde_integral"] = p.ideal_integral;
}

Table line_table(const LineProfile& line, const DdeProfile& p) {
  Table t{{"x_m", "dde_per_m", "ideal_dde_per_m"}, {}};
  for (std::size_t i = 0; i < line.x.size(); ++i) t.add({line.x[i], line.dde[i], line.ideal[i]});
  t.add({std::string("integral"), p.integral_check, p.ideal_integral});
  return t;
}

struct Run {
  const Json& config;
  fs::path dir;
  std::string version;
  std::vector<std::string> files;

  void table(const std::string& name, const Table& t) {
    write_table(dir / name, t);
    files.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text(dir / name, body);
    files.push_back(name);
  }
  void summary(Json s) {
    s["config"] = config;
    s["outputs"] = files;
    write_json(dir / "summary.json", s);
    files.push_back("summary.json");
  }
};

WeightFunction membrane_weighting(const Json& w, double wd) {
  const std::string kind = w.at("kind").get<std::string>();
  if (kind == "qpd") return WeightFunction::qpd();
  if (kind == "blocked-qpd") return WeightFunction::blocked_qpd(w.at("block_over_wd").get<double>() * wd);
  if (kind == "linear") return WeightFunction::linear(w.at("linear_scale_over_wd").get<double>() * wd);
  throw ConfigError("weighting.kind must be qpd, blocked-qpd or linear, got '" + kind + "'");
}

void membrane_dde(Run& run) {
  const Json& c = run.config;
  const OpticalParams params = optical_from(c.at("optical"));
  const FarFieldSource source(membrane_from(c.at("membrane")), params, model_from(c.at("model")),
                              grid_from(c.at("grid")));
  const WeightFunction fw = membrane_weighting(c.at("weighting"), source.w_d());
  const Evaluation e = evaluate(source, fw);
  const DdeProfile p = dde_map(e.terms, e.f, source.probe(), e.budget);
  run.table("dde.csv", line_table(reduce_over_y(p, e.grid), p));

  Json s = summary_head(c, run.version);
  put_budget(s, e.budget);
  put_dde(s, p);
  s["w_d_m"] = source.w_d();
  s["kmw0"] = source.config().km() * source.config().w0;
  s["grids"] = Json{{"far_field", grid_json(e.grid)}, {"device_n", source.options().device_n}};

  const Json& ws = c.at("wire_scan");
  if (ws.at("enabled").get<bool>()) {
    const double width = ws.at("width_m").get<double>();
    const double step = ws.at("step_m").get<double>();
    if (!(step > 0.0)) throw ConfigError("wire_scan.step_m must be positive");
    const double span = ws.at("span_over_wd").get<double>() * source.w_d();
    const auto half = static_cast<long long>(std::floor(span / step));
    std::vector<double> xs;
    for (long long i = -half; i <= half; ++i) xs.push_back(static_cast<double>(i) * step);
    const WireScan scan = wire_scan_sim(source, fw, width, xs);
    Table t{{"x_m", "measured_dde_per_m", "box_averaged_dde_per_m", "dde_per_m"}, {}};
    for (const WireSample& w : scan.samples) t.add({w.x, w.measured, w.box_averaged, w.dde_at_x});
    run.table("wire_scan.csv", t);
    s["wire_scan"] = Json{{"width_m", width}, {"positions", xs.size()},
                          {"max_deviation_over_peak", scan.max_deviation_over_peak()}};
  }
  run.summary(std::move(s));
}

void membrane_block_scan(Run& run) {
  const Json& c = run.config;
  const OpticalParams params = optical_from(c.at("optical"));
  const FarFieldSource source(membrane_from(c.at("membrane")), params, model_from(c.at("model")),
                              grid_from(c.at("grid")));
  const double wd = source.w_d();
  const std::size_t points = count_from(c.at("scan"), "points");
  const double hi = c.at("scan").at("B_max_over_wd").get<double>() * wd;
  const BlockOptimization r = block_optimization(source, 0.0, hi, points);

  Table t{{"row", "B_m", "B_over_wd", "eta", "blocked_fraction"}, {}};
  for (std::size_t i = 0; i < r.scan.xs.size(); ++i) {
    t.add({std::string("sample"), r.scan.xs[i], r.scan.xs[i] / wd, r.scan.fs[i], r.blocked_fractions[i]});
  }
  t.add({std::string("argmax"), r.B_best, r.B_best / wd, r.eta_best, r.blocked_fraction});
  run.table("block_scan.csv", t);

  const Evaluation best = evaluate(source, WeightFunction::blocked_qpd(r.B_best));
  const DdeProfile p = dde_map(best.terms, best.f, source.probe(), best.budget);
  run.table("dde.csv", line_table(reduce_over_y(p, best.grid), p));

  Json s = summary_head(c, run.version);
  put_budget(s, best.budget);
  put_dde(s, p);
  s["B_best_m"] = r.B_best;
  s["B_best_over_wd"] = r.B_best / wd;
  s["eta_best"] = r.eta_best;
  s["eta_standard"] = r.eta_standard;
  s["improvement"] = r.eta_best / r.eta_standard;
  s["blocked_fraction"] = r.blocked_fraction;
  s["refined"] = r.scan.refined;
  if (source.model() == FieldModel::OpticalLever) s["closed_form_eta_at_best"] = lever_blocked_eta(r.B_best / wd);
  s["w_d_m"] = wd;
  s["grids"] = Json{{"far_field", grid_json(best.grid)}, {"scan_points", points}};
  run.summary(std::move(s));
}

void membrane_sweep(Run& run) {
  const Json& c = run.config;
  const OpticalParams params = optical_from(c.at("optical"));
  const MembraneConfig tmpl = membrane_from(c.at("membrane"));
  std::vector<std::pair<int, int>> modes;
  for (const Json& m : c.at("modes")) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number_integer()) {
      throw ConfigError("modes must be a list of [m, n] integer pairs");
    }
    modes.emplace_back(m[0].get<int>(), m[1].get<int>());
  }
  const MembraneGridOptions grid = grid_from(c.at("grid"));
  const bool blocked = c.at("blocked").get<bool>();
  const std::vector<SweepRow> rows =
      relative_sensitivity_sweep(modes, tmpl, params, model_from(c.at("model")), blocked, grid);
  const DetectionBudget ref = interferometer_benchmark(params);

  Table t{{"m", "n", "kmw0", "S_imp_rel", "eta", "S_ba_rel", "B_over_wd", "optical_lever"}, {}};
  Json budgets = Json::array();
  for (const SweepRow& r : rows) {
    t.add({static_cast<long long>(r.m), static_cast<long long>(r.n), r.kmw0, r.S_imp_rel, r.eta, r.S_ba_rel,
           r.B_over_wd, static_cast<long long>(r.optical_lever ? 1 : 0)});
    const double S_imp = r.S_imp_rel * ref.S_imp;
    const double S_ba = r.S_ba_rel * ref.S_ba;
    Json b;
    b["m"] = r.m;
    b["n"] = r.n;
    b["eta"] = r.eta;
    b["S_imp"] = S_imp;
    b["S_ideal"] = S_imp * r.eta;
    b["S_ba"] = S_ba;
    b["heisenberg_product_over_hbar2"] = S_imp * S_ba / (kHbar * kHbar);
    budgets.push_back(b);
  }
  run.table("sweep.csv", t);

  Json s = summary_head(c, run.version);
  s["reference"] = budget_json(ref);
  s["modes"] = budgets;
  s["grids"] = Json{{"device_n", grid.device_n}, {"far_nx", grid.far_nx}, {"far_ny", grid.far_ny}};
  run.summary(std::move(s));
}

void dipole_irp(Run& run) {
  const Json& c = run.config;
  const DipoleConfig cfg = dipole_from(c.at("dipole"));
  const std::size_t info_n = count_from(c.at("dipole"), "information_n");
  const double info = dipole_information(cfg, info_n, info_n);

  const SolidAngleGrid sphere =
      SolidAngleGrid::sphere(count_from(c.at("output_grid"), "n_theta"), count_from(c.at("output_grid"), "n_phi"));
  const DdeProfile full = irp(cfg, sphere);
  Table t{{"theta_rad", "phi_rad", "irp_per_sr"}, {}};
  for (std::size_t i = 0; i < sphere.size(); ++i) t.add({sphere.theta[i], sphere.phi[i], full.dde[i]});
  run.table("irp.csv", t);

  const SolidAngleGrid cap = SolidAngleGrid::collection(cfg.na, cfg.n_theta, cfg.n_phi);
  const PointTerms terms = dipole_terms(build_fields(cfg, cap));
  const DetectionBudget b = ideal_budget(terms, cfg.probe(), info);
  const DdeProfile p = ideal_dde(terms, cfg.probe(), info);
  const EtaFactorization f = ideal_factorization(cfg);

  Json s = summary_head(c, run.version);
  put_budget(s, b);
  put_dde(s, p);
  s["dde_residual"] = std::abs(p.integral_check - b.eta);
  s["eta_col"] = collection_efficiency(cfg);
  s["eta_qpd"] = f.eta_qpd;
  s["irp_full_sphere_integral"] = full.integral_check;
  s["information_over_k2_alpha2"] = info / (cfg.k() * cfg.k() * cfg.alpha_dip * cfg.alpha_dip);
  s["grids"] = Json{{"collection", sphere_json(cap)}, {"output", sphere_json(sphere)}, {"information_n", info_n}};
  run.summary(std::move(s));
}

void dipole_block_scan(Run& run) {
  const Json& c = run.config;
  const DipoleConfig cfg = dipole_from(c.at("dipole"));
  const std::string shape_name = c.at("block").at("shape").get<std::string>();
  BlockShape shape;
  if (shape_name == "strip") {
    shape = BlockShape::Strip;
  } else if (shape_name == "cap") {
    shape = BlockShape::Cap;
  } else {
    throw ConfigError("block.shape must be 'strip' or 'cap', got '" + shape_name + "'");
  }
  const std::size_t points = count_from(c.at("block"), "points");
  const BlockAngleOptimization r = block_angle_optimization(cfg, shape, points);
  const char* size_col = shape == BlockShape::Cap ? "size_rad" : "size_na";

  Table t{{"row", size_col, "eta", "blocked_fraction"}, {}};
  for (std::size_t i = 0; i < r.scan.xs.size(); ++i) {
    t.add({std::string("sample"), r.scan.xs[i], r.scan.fs[i], r.blocked_fractions[i]});
  }
  t.add({std::string("argmax"), r.size_best, r.eta_best, r.blocked_fraction});
  run.table("block_scan.csv", t);

  SphereWeight best = standard_qpd(cfg);
  best.block = r.size_best > 0.0 ? shape : BlockShape::None;
  best.size = r.size_best;
  const DipoleEvaluation e = dipole_evaluate(cfg, best);
  const DdeProfile p = dde_map(e.terms, e.f, cfg.probe(), e.budget);
  const EtaFactorization f = eta_factorization(cfg, best);

  Json s = summary_head(c, run.version);
  put_budget(s, e.budget);
  put_dde(s, p);
  s["size_best"] = r.size_best;
  s["eta_best"] = r.eta_best;
  s["eta_standard"] = r.eta_standard;
  s["blocked_fraction"] = r.blocked_fraction;
  s["eta_col"] = f.eta_col;
  s["eta_qpd"] = f.eta_qpd;
  s["refined"] = r.scan.refined;
  s["grids"] = Json{{"collection", sphere_json(e.grid)}, {"scan_points", points}};
  run.summary(std::move(s));
}

void phase_contrast(Run& run) {
  const Json& c = run.config;
  const OpticalParams params = optical_from(c.at("optical"));
  const MembraneConfig cfg = membrane_from(c.at("membrane"));
  const Json& a = c.at("array");
  const Json& m = c.at("mask");
  PhaseContrastOptions opt;
  opt.cells_per_pitch = count_from(a, "cells_per_pitch");
  opt.ny = count_from(a, "ny");
  opt.mask_n = count_from(m, "n");
  opt.grating_threshold = c.at("grating_threshold").get<double>();
  const std::string scheme = c.at("scheme").get<std::string>();

  Json s = summary_head(c, run.version);
  if (scheme == "array") {
    const PhaseContrastEvaluation e = array_evaluate(cfg, params, a.at("gap").get<double>(), opt);
    const DdeProfile p = dde_map(e.terms, e.f, Probe::from(params), e.budget);
    run.table("dde.csv", line_table(reduce_over_y(p, e.grid), p));
    put_budget(s, e.budget);
    put_dde(s, p);
    s["gap"] = e.gap;
    const double max_gap = a.at("scan_max_gap").get<double>();
    if (max_gap > 0.0) {
      const GapScan g = gap_scan(cfg, params, max_gap, opt);
      Table t{{"gap_fraction", "eta"}, {}};
      for (std::size_t i = 0; i < g.gaps.size(); ++i) t.add({g.gaps[i], g.etas[i]});
      run.table("gap_scan.csv", t);
      s["gap_best"] = g.gap_best;
      s["eta_best"] = g.eta_best;
      s["eta_no_gap"] = g.eta_no_gap;
    }
    s["grids"] = Json{{"image", grid_json(e.grid)}};
  } else if (scheme == "mask") {
    const double threshold = m.at("threshold").get<double>();
    const PhaseContrastEvaluation e = threshold_mask_evaluate(cfg, params, threshold, opt);
    const DdeProfile p = dde_map(e.terms, e.f, Probe::from(params), e.budget);
    run.table("dde.csv", line_table(reduce_over_y(p, e.grid), p));
    put_budget(s, e.budget);
    put_dde(s, p);
    s["threshold"] = threshold;
    const std::size_t points = count_from(m, "sweep_points");
    const ScanResult sweep =
        threshold_sweep(cfg, params, m.at("sweep_lo").get<double>(), m.at("sweep_hi").get<double>(), points, opt);
    Table t{{"row", "threshold", "eta"}, {}};
    for (std::size_t i = 0; i < sweep.xs.size(); ++i) t.add({std::string("sample"), sweep.xs[i], sweep.fs[i]});
    t.add({std::string("argmax"), sweep.x_best, sweep.f_best});
    run.table("threshold_sweep.csv", t);
    s["threshold_best"] = sweep.x_best;
    s["eta_best"] = sweep.f_best;

    const MaskRaster mask = emit_mask(cfg, threshold, opt);
    s["open_fraction"] = mask.open_fraction();
    const std::string emit = m.at("emit").get<std::string>();
    if (emit == "pgm" || emit == "csv") {
      std::ostringstream os;
      if (emit == "pgm") {
        mask.write_pgm(os);
      } else {
        mask.write_csv(os);
      }
      run.text("mask." + emit, os.str());
    } else if (emit != "none") {
      throw ConfigError("mask.emit must be pgm, csv or none, got '" + emit + "'");
    }
    s["grids"] = Json{{"image", grid_json(e.grid)}};
  } else {
    throw ConfigError("scheme must be 'array' or 'mask', got '" + scheme + "'");
  }
  run.summary(std::move(s));
}

void fisher_check(Run& run) {
  const Json& c = run.config;
  const OpticalParams params = optical_from(c.at("optical"));
  const MembraneConfig cfg = membrane_from(c.at("membrane"));
  const CartesianGrid2D grid = device_grid(cfg, count_from(c, "device_n"));
  const FieldPair fields = reflect(gaussian_input(cfg, grid), membrane_mode(cfg, grid));
  const SignalDecomposition d = decompose(fields);
  const QfiResult q = qfi(d, params);
  const PointTerms terms = point_terms(fields);
  const DetectionBudget ideal = ideal_budget(terms, Probe::from(params));
  const double tau = c.at("tau_s").get<double>();
  const double bound = cramer_rao(q, tau);

  // A standard QPD in the far field, compared against the same bound.
  const FarFieldSource source(cfg, params, FieldModel::Numeric, MembraneGridOptions{grid.x.n, 1024, 256, 0.1});
  const Evaluation e = evaluate(source, WeightFunction::qpd());
  const DdeProfile p = dde_map(e.terms, e.f, source.probe(), e.budget);

  Json s = summary_head(c, run.version);
  put_budget(s, e.budget);
  put_dde(s, p);
  s["phi_I"] = d.phi_I;
  s["amplitude_overlap"] = d.amplitude;
  s["n_perp"] = d.n_perp;
  s["F_Q_per_m2_s"] = q.F_Q;
  s["F_Q_parallel"] = q.parallel;
  s["F_Q_perpendicular"] = q.perpendicular;
  s["F_Q_times_S_ideal"] = q.F_Q * ideal.S_ideal;
  s["far_field_I_over_F_Q"] = e.budget.I / q.F_Q;
  s["cramer_rao_bound_m2"] = bound;
  s["tau_s"] = tau;
  s["qpd_S_imp_over_tau_m2"] = e.budget.S_imp / tau;
  s["qpd_respects_bound"] = e.budget.S_imp / tau >= bound * (1.0 - 1e-9);
  s["reconstruction_error"] = d.reconstruction_error(fields);
  s["orthogonality_error"] = d.orthogonality_error(fields);
  s["grids"] = Json{{"device", grid_json(grid)}, {"far_field", grid_json(e.grid)}};
  run.summary(std::move(s));
}

using Runner = void (*)(Run&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"membrane-dde", membrane_dde},     {"membrane-block-scan", membrane_block_scan},
      {"membrane-sweep", membrane_sweep}, {"dipole-irp", dipole_irp},
      {"dipole-block-scan", dipole_block_scan}, {"phase-contrast", phase_contrast},
      {"fisher-check", fisher_check}};
  return table;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalogue() {
  static const std::vector<ScenarioInfo> list = {
      {"membrane-dde", "far-field DDE profile of a membrane mode for one weighting, optional wire scan"},
      {"membrane-block-scan", "efficiency versus central block width of a split detector"},
      {"membrane-sweep", "imprecision and back action relative to the interferometer across modes"},
      {"dipole-irp", "information radiation pattern and collection efficiency of a dipole scatterer"},
      {"dipole-block-scan", "efficiency versus block size for the dipole split detector"},
      {"phase-contrast", "photodiode array or threshold mask in the image plane"},
      {"fisher-check", "quantum Fisher information against ideal imprecision and the Cramer-Rao bound"}};
  return list;
}

std::vector<std::string> run_scenario(const Json& config, const fs::path& out_dir, const std::string& version) {
  const std::string name = config.at("scenario").get<std::string>();
  const auto it = runners().find(name);
  if (it == runners().end()) throw ConfigError("unknown scenario '" + name + "'");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  Run run{config, out_dir, version, {}};
  it->second(run);
  return run.files;
}

}  // namespace effmap::cli
