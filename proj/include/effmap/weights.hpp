#pragma once
// Detector weightings f_w. Cartesian weightings carry the list of their
// discontinuity lines so sampling can refuse grids that cut a step through a
// cell; spherical weightings come with a grid builder that puts block and
// split edges on cell boundaries.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "effmap/quadrature.hpp"

namespace effmap {

/// Discontinuity positions along one axis: explicit points plus an optional
/// periodic family {offset + j * period}.
struct BreakSet {
  std::vector<double> points;
  double period = 0.0;
  std::vector<double> offsets;

  /// Breaks strictly inside (lo, hi), sorted.
  std::vector<double> within(double lo, double hi) const;
};

/// Axis-aligned rectangle with f = value + slope_x * x inside.
struct Region {
  double x0, x1, y0, y1;
  double value = 1.0;
  double slope_x = 0.0;
};

class WeightFunction {
 public:
  using Eval = std::function<double(double, double)>;

  /// ±1 on the two halves split at x = 0.
  static WeightFunction qpd();
  /// QPD with a central strip |x| < B/2 set to 0. B = 0 is the plain QPD.
  static WeightFunction blocked_qpd(double block_width);
  /// f = x / scale.
  static WeightFunction linear(double scale);
  /// Photodiode array with two elements per period 2·pitch: element j covers
  /// (node_j + g·pitch/2, node_j+1 − g·pitch/2) with sign (−1)^j, nodes at
  /// node_offset + j·pitch.
  static WeightFunction array_1d(double pitch, double gap_fraction, double node_offset = 0.0);
  /// 1 where psi(x, y) > threshold, else 0. Boundaries are curves: the raster
  /// of node values is the mask.
  static WeightFunction threshold_mask(Eval psi, double threshold);
  /// Per-sample values on one specific grid.
  static WeightFunction custom(const CartesianGrid2D& grid, std::vector<double> values);
  static WeightFunction piecewise(std::vector<Region> regions);
  static WeightFunction zero();

  double operator()(double x, double y) const;

  /// Values at the grid nodes. Throws AlignmentError if a declared break
  /// falls inside a cell, DimensionError if a custom raster does not match.
  std::vector<double> sample(const CartesianGrid2D& grid) const;

  /// The same weighting with the rectangle [x0,x1]×[y0,y1] set to zero.
  WeightFunction excluding(double x0, double x1, double y0, double y1) const;
  WeightFunction scaled(double c) const;

  const BreakSet& x_breaks() const { return bx_; }
  const BreakSet& y_breaks() const { return by_; }
  const std::string& kind() const { return kind_; }
  /// True when f does not depend on y (every membrane weighting except masks).
  bool y_independent() const { return y_independent_; }

 private:
  struct Raster {
    CartesianGrid2D grid;
    std::vector<double> values;
  };

  Eval eval_;
  BreakSet bx_;
  BreakSet by_;
  std::optional<Raster> raster_;
  std::vector<Region> cutouts_;
  double factor_ = 1.0;
  std::string kind_;
  bool y_independent_ = true;
};

/// Which azimuthal half-space a spherical QPD compares: sign(cos φ) for x0,
/// sign(sin φ) for y0.
enum class SplitAxis { X, Y };

/// Cap: θ < size blocked (size in radians). Strip: band of half-width `size`
/// (in collimated lens-plane units, i.e. NA) about the split line blocked.
enum class BlockShape { None, Cap, Strip };

struct SphereWeight {
  SplitAxis split = SplitAxis::Y;
  BlockShape block = BlockShape::None;
  double size = 0.0;

  bool blocked(double theta, double phi) const;
  double operator()(double theta, double phi) const;
  std::vector<double> sample(const SolidAngleGrid& grid) const;
};

/// Collection cap θ ≤ arcsin(na) whose rows and φ segments have edges on the
/// split line and on the block boundary of `w`. n_phi should be a multiple of 4.
SolidAngleGrid aligned_collection_grid(double na, const SphereWeight& w, std::size_t n_theta,
                                       std::size_t n_phi);

}  // namespace effmap
