#pragma once
// Midpoint-rule quadrature on uniform Cartesian axes and on solid-angle
// grids. Nodes sit at cell centres; weight-function discontinuities must fall
// on cell edges (see Axis::is_edge) for the step integrands to converge fast.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace effmap {

/// Uniform partition of [lo, hi] into n cells, sampled at the cell centres.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;

  double step() const { return (hi - lo) / static_cast<double>(n); }
  double node(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * step(); }
  double edge(std::size_t i) const { return lo + static_cast<double>(i) * step(); }
  std::vector<double> nodes() const;

  /// True when x coincides with a cell edge (relative tolerance on the step).
  bool is_edge(double x, double tol = 1e-7) const;

  void validate() const;

  /// Symmetric axis [-half_range', half_range'] whose cell edges include every
  /// |b| in `breaks` (all breaks must be integer multiples of one common step,
  /// which holds for a single break). The step is the largest value <=
  /// target_step compatible with the breaks; the range grows to a whole
  /// number of cells and the cell count is even, so 0 is always an edge.
  static Axis symmetric_aligned(double half_range, double target_step, std::span<const double> breaks);
};

/// Tensor grid; samples are stored row-major, index = iy * x.n + ix.
struct CartesianGrid2D {
  Axis x;
  Axis y;

  std::size_t size() const { return x.n * y.n; }
  double cell_area() const { return x.step() * y.step(); }
  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * x.n + ix; }
  void validate() const;
};

/// Nodes on the unit sphere with exact cell solid angles as weights:
/// w = (cos θ_lo − cos θ_hi)·Δφ at the node whose cos θ is the band midpoint,
/// φ at the cell centre.
/// Rows may cover different φ intervals, which lets curved block edges sit on
/// cell boundaries.
struct SolidAngleGrid {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> weight;
  double theta_max = 0.0;  // largest θ edge covered
  std::size_t n_theta = 0;  // number of distinct θ rows
  double last_row_lo = -1.0;

  std::size_t size() const { return weight.size(); }

  /// Cap θ ∈ [0, theta_max] with n_theta × n_phi cells; theta_max may reach π.
  static SolidAngleGrid cap(double theta_max, std::size_t n_theta, std::size_t n_phi);
  /// Cap of the given numerical aperture (θ_max = arcsin NA).
  static SolidAngleGrid collection(double na, std::size_t n_theta, std::size_t n_phi);
  /// Whole sphere.
  static SolidAngleGrid sphere(std::size_t n_theta, std::size_t n_phi);

  /// Appends n_phi cells covering θ ∈ [theta_lo, theta_hi], φ ∈ [phi_lo, phi_hi].
  void add_cells(double theta_lo, double theta_hi, double phi_lo, double phi_hi, std::size_t n_phi);

  double total_weight() const;
};

/// Σ f_i h over an axis.
double integrate_1d(std::span<const double> f, const Axis& axis);
/// Σ f_ij hx hy; throws DimensionError on a size mismatch.
double integrate_2d(std::span<const double> f, const CartesianGrid2D& grid);
/// Σ f_i w_i.
double integrate_sphere(std::span<const double> f, const SolidAngleGrid& grid);

/// Samples f at every node.
std::vector<double> sample(const CartesianGrid2D& grid, const std::function<double(double, double)>& f);
std::vector<double> sample(const SolidAngleGrid& grid, const std::function<double(double, double)>& f);

struct RefineOptions {
  double rel_tol = 1e-6;
  std::size_t max_levels = 10;
};

struct RefineResult {
  double value = 0.0;
  double previous = 0.0;
  std::size_t resolution = 0;  // parameter handed to the evaluator on the last level
  std::size_t levels = 0;      // number of doublings performed
};

/// Evaluates `at(n)` for n = n0, 2 n0, 4 n0, ... until two successive values
/// agree to rel_tol (relative to the finer value, absolute when it is 0).
/// Throws PreconditionError if rel_tol <= 0 and ConvergenceError after
/// max_levels doublings.
RefineResult refine_until(const std::function<double(std::size_t)>& at, std::size_t n0,
                          const RefineOptions& options = {});

}  // namespace effmap
