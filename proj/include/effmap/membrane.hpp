#pragma once
// Membrane measurement scenarios in the detection (far-field) plane: closed
// forms, blocked-QPD optimisation, single-mode interferometer reference,
// relative-sensitivity sweeps and the simulated wire scan.

#include <optional>
#include <span>
#include <vector>

#include "effmap/detection.hpp"
#include "effmap/fields.hpp"
#include "effmap/weights.hpp"

namespace effmap {

enum class FieldModel { Numeric, OpticalLever };

struct MembraneGridOptions {
  std::size_t device_n = 256;
  std::size_t far_nx = 1024;
  std::size_t far_ny = 256;
  double lever_threshold = 0.1;  // max k_m w0 for the analytic tilting-mirror fields
};

/// Produces far-field pairs on any window: by Fraunhofer propagation of the
/// sampled device-plane fields, or from the optical-lever closed form.
class FarFieldSource {
 public:
  FarFieldSource(const MembraneConfig& cfg, const OpticalParams& params, FieldModel model,
                 const MembraneGridOptions& options = {});

  const MembraneConfig& config() const { return cfg_; }
  const OpticalParams& params() const { return params_; }
  FieldModel model() const { return model_; }
  const MembraneGridOptions& options() const { return options_; }
  double k() const { return params_.k(); }
  double w_d() const { return cfg_.w_d(params_.k()); }
  Probe probe() const { return Probe::from(params_); }

  /// Default window half-widths.
  double half_x() const;
  double half_y() const;

  /// Default window with x cell edges on every break of fw.
  CartesianGrid2D grid_for(const WeightFunction& fw) const;
  SeparablePair fields_on(const Axis& x, const Axis& y, bool check_window = true) const;
  PointTerms terms_on(const CartesianGrid2D& grid, bool check_window = true) const;

 private:
  MembraneConfig cfg_;
  OpticalParams params_;
  FieldModel model_;
  MembraneGridOptions options_;
  SeparablePair device_;
};

/// A weighting evaluated on a source: the grid, the sampled f, the per-node
/// terms and the budget.
struct Evaluation {
  CartesianGrid2D grid;
  std::vector<double> f;
  PointTerms terms;
  DetectionBudget budget;
};
Evaluation evaluate(const FarFieldSource& source, const WeightFunction& fw);

/// Closed-form standard-QPD budget with a = k_m w0, b = k_n w0:
/// S = −4α²k erf(a/2) e^{−a²/4} e^{−b²/4}, N = α², I = 4α²k²(1 − e^{−a²})(1 + e^{−b²}).
DetectionBudget analytic_budget(const MembraneConfig& cfg, const OpticalParams& params);

/// Closed-form blocked-QPD efficiency in the optical-lever limit,
/// (2/π) e^{−B²/2w_d²} / (1 − erf(B/2w_d)).
double lever_blocked_eta(double block_over_wd);

/// Single-mode interferometer: S_imp = S_ideal = 1/(16α²k²), η = 1.
DetectionBudget interferometer_benchmark(const OpticalParams& params);

struct BlockOptimization {
  double B_best = 0.0;        // m
  double eta_best = 0.0;
  double eta_standard = 0.0;  // B = 0
  double blocked_fraction = 0.0;
  ScanResult scan;            // over B in metres
  std::vector<double> blocked_fractions;  // per scan sample
};

/// Fraction of the stationary power falling on |x| < B/2.
double blocked_power_fraction(const FarFieldSource& source, double block_width);

/// Scans B over [B_lo, B_hi] (metres) with n samples. Configurations whose
/// sensitivity vanishes score 0. A degenerate range (B_hi == B_lo == 0)
/// returns the standard QPD.
BlockOptimization block_optimization(const FarFieldSource& source, double B_lo, double B_hi, std::size_t n = 201);
/// Default scan range [0, max(3, 2 k_m w0 + 2) w_d].
BlockOptimization block_optimization(const FarFieldSource& source, std::size_t n = 201);

struct SweepRow {
  int m = 0;
  int n = 0;
  double kmw0 = 0.0;
  double S_imp_rel = 0.0;  // S_imp / S_imp(interferometer)
  double eta = 0.0;
  double S_ba_rel = 0.0;   // S_ba / S_ba(interferometer)
  double B_over_wd = 0.0;  // 0 for standard QPD rows
  bool optical_lever = false;  // k_m w0 <= 0.1 and k_n w0 <= 0.1
};

/// One row per mode, ordered by k_m. With `blocked` each row uses the optimal
/// block found by block_optimization.
std::vector<SweepRow> relative_sensitivity_sweep(const std::vector<std::pair<int, int>>& modes,
                                                 const MembraneConfig& tmpl, const OpticalParams& params,
                                                 FieldModel model, bool blocked, const MembraneGridOptions& options = {});

struct WireSample {
  double x = 0.0;
  double measured = 0.0;      // (η − η_without) / Δx
  double box_averaged = 0.0;  // mean of the DDE over the wire footprint
  double dde_at_x = 0.0;      // line DDE at the wire centre
};

struct WireScan {
  DetectionBudget budget;
  LineProfile profile;  // dη/dx on the full grid
  std::vector<WireSample> samples;
  double width = 0.0;

  /// max |measured − box_averaged| / max |profile.dde|
  double max_deviation_over_peak() const;
};

/// Blocks the strip |x − x_c| < Δx/2 (full height) at every position and
/// records the finite-difference DDE next to the box-averaged one.
WireScan wire_scan_sim(const FarFieldSource& source, const WeightFunction& fw, double width,
                       std::span<const double> positions);

/// 4α²(ħk)² ∫ |u_in|² ψ² da on the device plane.
double back_action_device_plane(const MembraneConfig& cfg, const OpticalParams& params, std::size_t n = 256);
/// Same integral for an arbitrary displacement profile ψ (e.g. ψ ≡ 1).
double back_action_device_plane(const ScalarField& u_in, const RealField& psi, const OpticalParams& params);

}  // namespace effmap
