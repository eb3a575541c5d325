#pragma once
// Phase-contrast imaging of membrane modes at unit magnification: a 1-D
// photodiode array with two elements per mechanical period, and a single
// detector behind a binary threshold mask.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "effmap/detection.hpp"
#include "effmap/fields.hpp"
#include "effmap/weights.hpp"

namespace effmap {

struct PhaseContrastOptions {
  std::size_t cells_per_pitch = 100;  // array grid; gaps snap to multiples of 2/cells_per_pitch
  std::size_t ny = 256;
  std::size_t mask_n = 1024;          // mask raster cells per axis over ±6 w0
  double grating_threshold = 2.0;     // warn when k w0 falls below this
};

/// Image-plane pair u0 = i u_in, us = 2iψ u_in on a grid.
FieldPair image_fields(const MembraneConfig& cfg, const CartesianGrid2D& grid);

struct PhaseContrastEvaluation {
  CartesianGrid2D grid;
  std::vector<double> f;
  PointTerms terms;
  DetectionBudget budget;
  double gap = 0.0;  // gap fraction actually used
};

/// Grid for the array: whole pitches π/k_m covering ±6 w0, node lines of ψ on
/// cell edges.
CartesianGrid2D array_grid(const MembraneConfig& cfg, const PhaseContrastOptions& opt = {});
/// Nearest representable gap fraction 2j/cells_per_pitch.
double snap_gap(double gap, const PhaseContrastOptions& opt = {});

PhaseContrastEvaluation array_evaluate(const MembraneConfig& cfg, const OpticalParams& params, double gap,
                                       const PhaseContrastOptions& opt = {});
DetectionBudget array_budget(const MembraneConfig& cfg, const OpticalParams& params, double gap,
                             const PhaseContrastOptions& opt = {});

struct GapScan {
  std::vector<double> gaps;
  std::vector<double> etas;
  double gap_best = 0.0;
  double eta_best = 0.0;
  double eta_no_gap = 0.0;
};
/// Every representable gap in [0, max_gap].
GapScan gap_scan(const MembraneConfig& cfg, const OpticalParams& params, double max_gap = 0.8,
                 const PhaseContrastOptions& opt = {});

CartesianGrid2D mask_grid(const MembraneConfig& cfg, const PhaseContrastOptions& opt = {});
/// Single detector behind the mask f = 1[ψ > threshold]. Throws
/// DegenerateWeightingError for threshold >= 1 (nothing transmitted).
PhaseContrastEvaluation threshold_mask_evaluate(const MembraneConfig& cfg, const OpticalParams& params,
                                                double threshold, const PhaseContrastOptions& opt = {});
DetectionBudget threshold_mask_budget(const MembraneConfig& cfg, const OpticalParams& params, double threshold,
                                      const PhaseContrastOptions& opt = {});

ScanResult threshold_sweep(const MembraneConfig& cfg, const OpticalParams& params, double lo, double hi,
                           std::size_t n = 201, const PhaseContrastOptions& opt = {});

struct MaskRaster {
  CartesianGrid2D grid;
  std::vector<std::uint8_t> open;  // 1 transparent, 0 opaque, row-major

  double open_fraction() const;
  /// Binary PGM (P5), white = transparent. Row 0 is the top (largest y).
  void write_pgm(std::ostream& out) const;
  /// One CSV line per grid row (top first) of 0/1 cells.
  void write_csv(std::ostream& out) const;
};
MaskRaster emit_mask(const MembraneConfig& cfg, double threshold, const PhaseContrastOptions& opt = {});

}  // namespace effmap
