#include "effmap/phase_contrast.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "effmap/errors.hpp"

namespace effmap {
namespace {

void check_grating(double kw0, double threshold, const char* axis) {
  if (kw0 < threshold) {
    warn(std::string("k_") + axis + " w0 = " + std::to_string(kw0) +
         " is outside the diffraction-grating limit; finite-size corrections will show");
  }
}

PhaseContrastEvaluation evaluate_on(const MembraneConfig& cfg, const OpticalParams& params,
                                    const CartesianGrid2D& grid, const WeightFunction& fw) {
  PhaseContrastEvaluation e;
  e.grid = grid;
  e.f = fw.sample(grid);
  e.terms = point_terms(image_fields(cfg, grid));
  e.budget = budget(e.terms, e.f, Probe::from(params));
  return e;
}

}  // namespace

FieldPair image_fields(const MembraneConfig& cfg, const CartesianGrid2D& grid) {
  return phase_contrast_image(gaussian_input(cfg, grid), membrane_mode(cfg, grid));
}

CartesianGrid2D array_grid(const MembraneConfig& cfg, const PhaseContrastOptions& opt) {
  if (opt.cells_per_pitch < 2 || opt.cells_per_pitch % 2 != 0) {
    throw PreconditionError("cells per pitch must be an even number >= 2");
  }
  const double pitch = std::numbers::pi / cfg.km();
  const double periods = std::ceil(6.0 * cfg.w0 / pitch - 1e-9);
  const double half = periods * pitch;
  const auto nx = static_cast<std::size_t>(2.0 * periods) * opt.cells_per_pitch;
  const double hy = 6.0 * cfg.w0;
  return CartesianGrid2D{Axis{-half, half, nx}, Axis{-hy, hy, opt.ny}};
}

double snap_gap(double gap, const PhaseContrastOptions& opt) {
  const double unit = 2.0 / static_cast<double>(opt.cells_per_pitch);
  return unit * std::round(gap / unit);
}

PhaseContrastEvaluation array_evaluate(const MembraneConfig& cfg, const OpticalParams& params, double gap,
                                       const PhaseContrastOptions& opt) {
  cfg.validate();
  cfg.require_qpd_mode();
  if (cfg.n != 1) throw UnsupportedModeError("the photodiode array scheme is for (m, 1) modes");
  check_grating(cfg.km() * cfg.w0, opt.grating_threshold, "m");
  const double g = snap_gap(gap, opt);
  const double pitch = std::numbers::pi / cfg.km();
  PhaseContrastEvaluation e = evaluate_on(cfg, params, array_grid(cfg, opt), WeightFunction::array_1d(pitch, g));
  e.gap = g;
  return e;
}

DetectionBudget array_budget(const MembraneConfig& cfg, const OpticalParams& params, double gap,
                             const PhaseContrastOptions& opt) {
  return array_evaluate(cfg, params, gap, opt).budget;
}

GapScan gap_scan(const MembraneConfig& cfg, const OpticalParams& params, double max_gap,
                 const PhaseContrastOptions& opt) {
  GapScan s;
  const double unit = 2.0 / static_cast<double>(opt.cells_per_pitch);
  const auto steps = static_cast<std::size_t>(std::floor(max_gap / unit + 1e-9));
  for (std::size_t j = 0; j <= steps; ++j) {
    const double g = unit * static_cast<double>(j);
    if (g >= 1.0) break;
    s.gaps.push_back(g);
    s.etas.push_back(array_budget(cfg, params, g, opt).eta);
  }
  s.eta_no_gap = s.etas.front();
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.etas.size(); ++i) {
    if (s.etas[i] > s.etas[best]) best = i;
  }
  s.gap_best = s.gaps[best];
  s.eta_best = s.etas[best];
  return s;
}

CartesianGrid2D mask_grid(const MembraneConfig& cfg, const PhaseContrastOptions& opt) {
  const double r = 6.0 * cfg.w0;
  return CartesianGrid2D{Axis{-r, r, opt.mask_n}, Axis{-r, r, opt.mask_n}};
}

PhaseContrastEvaluation threshold_mask_evaluate(const MembraneConfig& cfg, const OpticalParams& params,
                                                double threshold, const PhaseContrastOptions& opt) {
  cfg.validate();
  cfg.require_qpd_mode();
  if (threshold >= 1.0) {
    throw DegenerateWeightingError("mask threshold >= 1 leaves no transparent area");
  }
  check_grating(cfg.km() * cfg.w0, opt.grating_threshold, "m");
  check_grating(cfg.kn() * cfg.w0, opt.grating_threshold, "n");
  const double km = cfg.km();
  const double kn = cfg.kn();
  const WeightFunction fw = WeightFunction::threshold_mask(
      [km, kn](double x, double y) { return std::sin(km * x) * std::cos(kn * y); }, threshold);
  return evaluate_on(cfg, params, mask_grid(cfg, opt), fw);
}

DetectionBudget threshold_mask_budget(const MembraneConfig& cfg, const OpticalParams& params, double threshold,
                                      const PhaseContrastOptions& opt) {
  return threshold_mask_evaluate(cfg, params, threshold, opt).budget;
}

ScanResult threshold_sweep(const MembraneConfig& cfg, const OpticalParams& params, double lo, double hi,
                           std::size_t n, const PhaseContrastOptions& opt) {
  // The field terms do not depend on the threshold; build them once.
  const CartesianGrid2D grid = mask_grid(cfg, opt);
  const PointTerms terms = point_terms(image_fields(cfg, grid));
  const RealField psi = membrane_mode(cfg, grid);
  const Probe probe = Probe::from(params);
  std::vector<double> f(grid.size());
  return scan_1d(
      [&](double t) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = psi.values[i] > t ? 1.0 : 0.0;
        try {
          return budget(terms, f, probe).eta;
        } catch (const DegenerateWeightingError&) {
          return 0.0;
        }
      },
      lo, hi, n);
}

double MaskRaster::open_fraction() const {
  std::size_t count = 0;
  for (std::uint8_t v : open) count += v;
  return open.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(open.size());
}

void MaskRaster::write_pgm(std::ostream& out) const {
  out << "P5\n" << grid.x.n << ' ' << grid.y.n << "\n255\n";
  for (std::size_t r = 0; r < grid.y.n; ++r) {
    const std::size_t iy = grid.y.n - 1 - r;
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
      out.put(open[grid.index(ix, iy)] ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
}

void MaskRaster::write_csv(std::ostream& out) const {
  for (std::size_t r = 0; r < grid.y.n; ++r) {
    const std::size_t iy = grid.y.n - 1 - r;
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
      if (ix > 0) out << ',';
      out << (open[grid.index(ix, iy)] ? '1' : '0');
    }
    out << '\n';
  }
}

MaskRaster emit_mask(const MembraneConfig& cfg, double threshold, const PhaseContrastOptions& opt) {
  cfg.validate();
  const CartesianGrid2D grid = mask_grid(cfg, opt);
  const RealField psi = membrane_mode(cfg, grid);
  MaskRaster m{grid, std::vector<std::uint8_t>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) m.open[i] = psi.values[i] > threshold ? 1 : 0;
  return m;
}

}  // namespace effmap
