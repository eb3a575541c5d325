#include "effmap/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "effmap/errors.hpp"

namespace effmap {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_aligned(const Axis& axis, const std::vector<double>& breaks, const char* name) {
  for (double b : breaks) {
    if (!axis.is_edge(b)) {
      std::ostringstream msg;
      msg << "weight discontinuity at " << name << " = " << b << " falls inside a cell of width " << axis.step();
      throw AlignmentError(msg.str());
    }
  }
}

bool inside(const Region& r, double x, double y) { return x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1; }

}  // namespace

std::vector<double> BreakSet::within(double lo, double hi) const {
  const double eps = 1e-12 * (hi - lo);
  std::vector<double> out;
  for (double p : points) {
    if (p > lo + eps && p < hi - eps) out.push_back(p);
  }
  if (period > 0.0) {
    for (double off : offsets) {
      const auto j0 = static_cast<long long>(std::ceil((lo - off) / period));
      const auto j1 = static_cast<long long>(std::floor((hi - off) / period));
      for (long long j = j0; j <= j1; ++j) {
        const double p = off + static_cast<double>(j) * period;
        if (p > lo + eps && p < hi - eps) out.push_back(p);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

WeightFunction WeightFunction::qpd() {
  WeightFunction w;
  w.kind_ = "qpd";
  w.eval_ = [](double x, double) { return sign(x); };
  w.bx_.points = {0.0};
  return w;
}

WeightFunction WeightFunction::blocked_qpd(double block_width) {
  if (!(block_width >= 0.0)) throw PreconditionError("block width must be non-negative");
  if (block_width == 0.0) return qpd();
  WeightFunction w;
  w.kind_ = "blocked_qpd";
  const double half = 0.5 * block_width;
  w.eval_ = [half](double x, double) { return std::abs(x) < half ? 0.0 : sign(x); };
  w.bx_.points = {-half, 0.0, half};
  return w;
}

WeightFunction WeightFunction::linear(double scale) {
  if (!(scale != 0.0) || !std::isfinite(scale)) throw PreconditionError("linear weighting needs a finite nonzero scale");
  WeightFunction w;
  w.kind_ = "linear";
  w.eval_ = [scale](double x, double) { return x / scale; };
  return w;
}

WeightFunction WeightFunction::array_1d(double pitch, double gap_fraction, double node_offset) {
  if (!(pitch > 0.0)) throw PreconditionError("array pitch must be positive");
  if (!(gap_fraction >= 0.0) || !(gap_fraction < 1.0)) throw PreconditionError("gap fraction must lie in [0, 1)");
  WeightFunction w;
  w.kind_ = "array_1d";
  const double g = gap_fraction;
  w.eval_ = [pitch, g, node_offset](double x, double) {
    const double u = (x - node_offset) / pitch;
    const double j = std::floor(u);
    const double frac = u - j;
    if (frac < 0.5 * g || frac > 1.0 - 0.5 * g) return 0.0;
    return std::fmod(std::abs(j), 2.0) == 0.0 ? 1.0 : -1.0;
  };
  w.bx_.period = pitch;
  if (g == 0.0) {
    w.bx_.offsets = {node_offset};
  } else {
    w.bx_.offsets = {node_offset - 0.5 * g * pitch, node_offset + 0.5 * g * pitch};
  }
  return w;
}

WeightFunction WeightFunction::threshold_mask(Eval psi, double threshold) {
  WeightFunction w;
  w.kind_ = "threshold_mask";
  w.y_independent_ = false;
  w.eval_ = [psi = std::move(psi), threshold](double x, double y) { return psi(x, y) > threshold ? 1.0 : 0.0; };
  return w;
}

WeightFunction WeightFunction::custom(const CartesianGrid2D& grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw DimensionError("custom weighting does not match its grid");
  WeightFunction w;
  w.kind_ = "custom";
  w.y_independent_ = false;
  w.raster_ = Raster{grid, std::move(values)};
  return w;
}

WeightFunction WeightFunction::piecewise(std::vector<Region> regions) {
  WeightFunction w;
  w.kind_ = "piecewise";
  w.y_independent_ = false;
  for (const Region& r : regions) {
    if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw PreconditionError("empty weighting region");
    w.bx_.points.push_back(r.x0);
    w.bx_.points.push_back(r.x1);
    w.by_.points.push_back(r.y0);
    w.by_.points.push_back(r.y1);
  }
  w.eval_ = [regions = std::move(regions)](double x, double y) {
    for (const Region& r : regions) {
      if (inside(r, x, y)) return r.value + r.slope_x * x;
    }
    return 0.0;
  };
  return w;
}

WeightFunction WeightFunction::zero() {
  WeightFunction w;
  w.kind_ = "zero";
  w.eval_ = [](double, double) { return 0.0; };
  return w;
}

double WeightFunction::operator()(double x, double y) const {
  for (const Region& r : cutouts_) {
    if (inside(r, x, y)) return 0.0;
  }
  double v = 0.0;
  if (raster_) {
    const Axis& ax = raster_->grid.x;
    const Axis& ay = raster_->grid.y;
    if (x < ax.lo || x > ax.hi || y < ay.lo || y > ay.hi) return 0.0;
    const auto ix = std::min(ax.n - 1, static_cast<std::size_t>((x - ax.lo) / ax.step()));
    const auto iy = std::min(ay.n - 1, static_cast<std::size_t>((y - ay.lo) / ay.step()));
    v = raster_->values[raster_->grid.index(ix, iy)];
  } else {
    v = eval_(x, y);
  }
  return factor_ * v;
}

std::vector<double> WeightFunction::sample(const CartesianGrid2D& grid) const {
  grid.validate();
  check_aligned(grid.x, bx_.within(grid.x.lo, grid.x.hi), "x");
  check_aligned(grid.y, by_.within(grid.y.lo, grid.y.hi), "y");
  std::vector<double> out;
  if (raster_) {
    const CartesianGrid2D& r = raster_->grid;
    if (r.x.n != grid.x.n || r.y.n != grid.y.n || r.x.lo != grid.x.lo || r.x.hi != grid.x.hi ||
        r.y.lo != grid.y.lo || r.y.hi != grid.y.hi) {
      throw DimensionError("custom weighting was defined on a different grid");
    }
    out = raster_->values;
    for (double& v : out) v *= factor_;
  } else if (y_independent_) {
    std::vector<double> row(grid.x.n);
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) row[ix] = factor_ * eval_(grid.x.node(ix), 0.0);
    out.resize(grid.size());
    for (std::size_t iy = 0; iy < grid.y.n; ++iy) std::copy(row.begin(), row.end(), out.begin() + iy * grid.x.n);
  } else {
    out = effmap::sample(grid, [this](double x, double y) { return factor_ * eval_(x, y); });
  }
  if (!cutouts_.empty()) {
    for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
      const double y = grid.y.node(iy);
      for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
        for (const Region& r : cutouts_) {
          if (inside(r, grid.x.node(ix), y)) out[grid.index(ix, iy)] = 0.0;
        }
      }
    }
  }
  return out;
}

WeightFunction WeightFunction::excluding(double x0, double x1, double y0, double y1) const {
  if (!(x1 > x0) || !(y1 > y0)) throw PreconditionError("empty exclusion rectangle");
  WeightFunction w = *this;
  w.cutouts_.push_back(Region{x0, x1, y0, y1, 0.0, 0.0});
  w.bx_.points.push_back(x0);
  w.bx_.points.push_back(x1);
  w.by_.points.push_back(y0);
  w.by_.points.push_back(y1);
  w.y_independent_ = false;
  return w;
}

WeightFunction WeightFunction::scaled(double c) const {
  WeightFunction w = *this;
  w.factor_ *= c;
  return w;
}

bool SphereWeight::blocked(double theta, double phi) const {
  switch (block) {
    case BlockShape::None:
      return false;
    case BlockShape::Cap:
      return theta < size;
    case BlockShape::Strip: {
      const double lateral = split == SplitAxis::Y ? std::sin(phi) : std::cos(phi);
      return std::abs(std::sin(theta) * lateral) < size;
    }
  }
  return false;
}

double SphereWeight::operator()(double theta, double phi) const {
  if (blocked(theta, phi)) return 0.0;
  return sign(split == SplitAxis::Y ? std::sin(phi) : std::cos(phi));
}

std::vector<double> SphereWeight::sample(const SolidAngleGrid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = (*this)(grid.theta[i], grid.phi[i]);
  return out;
}

SolidAngleGrid aligned_collection_grid(double na, const SphereWeight& w, std::size_t n_theta, std::size_t n_phi) {
  if (!(na > 0.0) || na > 1.0) throw PreconditionError("numerical aperture must lie in (0, 1]");
  if (n_theta < 2 || n_phi < 4) throw PreconditionError("collection grid needs at least 2 x 4 cells");
  if (!(w.size >= 0.0)) throw PreconditionError("block size must be non-negative");
  const double pi = std::numbers::pi;
  const double theta_max = std::asin(na);
  // φ origin such that the split line sits at segment boundaries.
  const double phi0 = w.split == SplitAxis::Y ? 0.0 : 0.5 * pi;

  auto uniform_rows = [&](SolidAngleGrid& g, double t0, double t1, std::size_t rows) {
    const double dt = (t1 - t0) / static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const double lo = t0 + dt * static_cast<double>(i);
      const double hi = i + 1 == rows ? t1 : t0 + dt * static_cast<double>(i + 1);
      g.add_cells(lo, hi, phi0, phi0 + 2.0 * pi, n_phi);
    }
  };

  SolidAngleGrid g;
  double t_edge = 0.0;
  if (w.block == BlockShape::Cap) t_edge = w.size;
  if (w.block == BlockShape::Strip) t_edge = w.size >= 1.0 ? theta_max : std::asin(w.size);
  if (w.block == BlockShape::None || t_edge <= 0.0) {
    uniform_rows(g, 0.0, theta_max, n_theta);
    return g;
  }
  if (t_edge >= theta_max) {
    throw DomainError("block covers the whole collection aperture");
  }
  std::size_t rows_in = static_cast<std::size_t>(std::lround(static_cast<double>(n_theta) * t_edge / theta_max));
  rows_in = std::clamp<std::size_t>(rows_in, 1, n_theta - 1);
  const std::size_t rows_out = n_theta - rows_in;
  uniform_rows(g, 0.0, t_edge, rows_in);
  if (w.block == BlockShape::Cap) {
    uniform_rows(g, t_edge, theta_max, rows_out);
    return g;
  }
  // Strip: the blocked φ half-width varies from row to row.
  const double dt = (theta_max - t_edge) / static_cast<double>(rows_out);
  for (std::size_t i = 0; i < rows_out; ++i) {
    const double lo = t_edge + dt * static_cast<double>(i);
    const double hi = i + 1 == rows_out ? theta_max : t_edge + dt * static_cast<double>(i + 1);
    const double pb = std::asin(std::min(1.0, w.size / std::sin(0.5 * (lo + hi))));
    const double cuts[] = {0.0, pb, pi - pb, pi + pb, 2.0 * pi - pb, 2.0 * pi};
    for (int s = 0; s < 5; ++s) {
      const double len = cuts[s + 1] - cuts[s];
      if (len <= 0.0) continue;
      const auto cells = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::lround(static_cast<double>(n_phi) * len / (2.0 * pi))));
      g.add_cells(lo, hi, phi0 + cuts[s], phi0 + cuts[s + 1], cells);
    }
  }
  return g;
}

}  // namespace effmap
