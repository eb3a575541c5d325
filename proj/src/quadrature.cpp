#include "effmap/quadrature.hpp"

#include <algorithm>
#include <string>

#include "effmap/errors.hpp"
#include "effmap/simd.hpp"

namespace effmap {

std::vector<double> Axis::nodes() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = node(i);
  return out;
}

bool Axis::is_edge(double x, double tol) const {
  const double t = (x - lo) / step();
  return std::abs(t - std::round(t)) <= tol;
}

void Axis::validate() const {
  if (n < 2) throw PreconditionError("axis needs at least 2 cells, got " + std::to_string(n));
  if (!(hi > lo)) throw PreconditionError("axis upper bound must exceed the lower bound");
}

Axis Axis::symmetric_aligned(double half_range, double target_step, std::span<const double> breaks) {
  if (!(half_range > 0.0) || !(target_step > 0.0)) {
    throw PreconditionError("aligned axis needs a positive range and step");
  }
  double h = target_step;
  double anchor = 0.0;
  for (double b : breaks) anchor = std::max(anchor, std::abs(b));
  if (anchor > 0.0) {
    h = anchor / std::ceil(anchor / target_step - 1e-9);
    for (double b : breaks) {
      const double t = std::abs(b) / h;
      if (std::abs(t - std::round(t)) > 1e-7) {
        throw AlignmentError("weight breakpoints " + std::to_string(b) + " and " +
                             std::to_string(anchor) + " have no common grid step");
      }
    }
  }
  std::size_t half_cells = static_cast<std::size_t>(std::ceil(half_range / h - 1e-9));
  half_cells = std::max<std::size_t>(half_cells, 1);
  const double r = static_cast<double>(half_cells) * h;
  return Axis{-r, r, 2 * half_cells};
}

void CartesianGrid2D::validate() const {
  x.validate();
  y.validate();
}

SolidAngleGrid SolidAngleGrid::cap(double theta_max, std::size_t n_theta, std::size_t n_phi) {
  if (!(theta_max > 0.0) || theta_max > std::numbers::pi + 1e-15) {
    throw PreconditionError("cap half-angle must lie in (0, pi]");
  }
  if (n_theta < 1 || n_phi < 1) throw PreconditionError("solid-angle grid needs at least one cell");
  SolidAngleGrid g;
  const double dt = theta_max / static_cast<double>(n_theta);
  for (std::size_t i = 0; i < n_theta; ++i) {
    g.add_cells(dt * static_cast<double>(i), i + 1 == n_theta ? theta_max : dt * static_cast<double>(i + 1),
                0.0, 2.0 * std::numbers::pi, n_phi);
  }
  return g;
}

SolidAngleGrid SolidAngleGrid::collection(double na, std::size_t n_theta, std::size_t n_phi) {
  if (!(na > 0.0) || na > 1.0) throw PreconditionError("numerical aperture must lie in (0, 1]");
  return cap(std::asin(na), n_theta, n_phi);
}

SolidAngleGrid SolidAngleGrid::sphere(std::size_t n_theta, std::size_t n_phi) {
  return cap(std::numbers::pi, n_theta, n_phi);
}

void SolidAngleGrid::add_cells(double theta_lo, double theta_hi, double phi_lo, double phi_hi,
                               std::size_t n_phi) {
  if (!(theta_hi > theta_lo) || !(phi_hi > phi_lo) || n_phi == 0) {
    throw PreconditionError("empty solid-angle cell block");
  }
  const double band = std::cos(theta_lo) - std::cos(theta_hi);
  // Midpoint in cos θ: exact for integrands linear in cos θ.
  const double tm = std::acos(0.5 * (std::cos(theta_lo) + std::cos(theta_hi)));
  const double dp = (phi_hi - phi_lo) / static_cast<double>(n_phi);
  for (std::size_t j = 0; j < n_phi; ++j) {
    theta.push_back(tm);
    phi.push_back(phi_lo + (static_cast<double>(j) + 0.5) * dp);
    weight.push_back(band * dp);
  }
  if (theta_hi > theta_max) theta_max = theta_hi;
  if (theta_lo != last_row_lo) ++n_theta;
  last_row_lo = theta_lo;
}

double SolidAngleGrid::total_weight() const { return simd::sum(weight); }

double integrate_1d(std::span<const double> f, const Axis& axis) {
  if (f.size() != axis.n) {
    throw DimensionError("1-D integrand has " + std::to_string(f.size()) + " samples, axis has " +
                         std::to_string(axis.n));
  }
  return simd::sum(f) * axis.step();
}

double integrate_2d(std::span<const double> f, const CartesianGrid2D& grid) {
  if (f.size() != grid.size()) {
    throw DimensionError("2-D integrand has " + std::to_string(f.size()) + " samples, grid has " +
                         std::to_string(grid.size()));
  }
  return simd::sum(f) * grid.cell_area();
}

double integrate_sphere(std::span<const double> f, const SolidAngleGrid& grid) {
  if (f.size() != grid.size()) {
    throw DimensionError("spherical integrand has " + std::to_string(f.size()) +
                         " samples, grid has " + std::to_string(grid.size()));
  }
  return simd::dot(f, grid.weight);
}

std::vector<double> sample(const CartesianGrid2D& grid, const std::function<double(double, double)>& f) {
  std::vector<double> out(grid.size());
  const std::vector<double> xs = grid.x.nodes();
  for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
    const double y = grid.y.node(iy);
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) out[grid.index(ix, iy)] = f(xs[ix], y);
  }
  return out;
}

std::vector<double> sample(const SolidAngleGrid& grid, const std::function<double(double, double)>& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.theta[i], grid.phi[i]);
  return out;
}

RefineResult refine_until(const std::function<double(std::size_t)>& at, std::size_t n0,
                          const RefineOptions& options) {
  if (!(options.rel_tol > 0.0)) throw PreconditionError("refinement tolerance must be positive");
  if (n0 == 0) throw PreconditionError("refinement needs a positive base resolution");
  std::size_t n = n0;
  double previous = at(n);
  for (std::size_t level = 1; level <= options.max_levels; ++level) {
    n *= 2;
    const double value = at(n);
    const double scale = std::abs(value) > 0.0 ? std::abs(value) : 1.0;
    if (std::abs(value - previous) < options.rel_tol * scale) {
      return RefineResult{value, previous, n, level};
    }
    if (level == options.max_levels) {
      throw ConvergenceError("refinement did not reach tolerance after " + std::to_string(level) +
                                 " doublings",
                             previous, value);
    }
    previous = value;
  }
  throw ConvergenceError("refinement allowed no doublings", previous, previous);
}

}  // namespace effmap
