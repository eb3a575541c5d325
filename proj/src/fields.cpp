#include "effmap/fields.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/parallel.hpp"
#include "effmap/simd.hpp"

namespace effmap {
namespace {

std::mutex g_warn_mutex;
std::function<void(const std::string&)> g_warn_handler;

double gauss_1d(double x, double w) {
  return std::pow(std::numbers::pi * w * w, -0.25) * std::exp(-x * x / (2.0 * w * w));
}

void require_same_grid(const CartesianGrid2D& a, const CartesianGrid2D& b) {
  auto same = [](const Axis& p, const Axis& q) { return p.n == q.n && p.lo == q.lo && p.hi == q.hi; };
  if (!same(a.x, b.x) || !same(a.y, b.y)) throw DimensionError("fields are sampled on different grids");
}

void require_covers(const CartesianGrid2D& g, double half) {
  const double tol = 1e-9 * half;
  if (g.x.lo > -half + tol || g.x.hi < half - tol || g.y.lo > -half + tol || g.y.hi < half - tol) {
    throw DomainError("grid must span at least +-6 w0 around the beam centre");
  }
}

// Kernel row e^{i k x_j X / z} h for all input nodes x_j.
void fill_kernel(const Axis& in, double X, double k, double z, std::vector<cplx>& row) {
  const double h = in.step();
  for (std::size_t j = 0; j < in.n; ++j) {
    const double ph = k * in.node(j) * X / z;
    row[j] = cplx(std::cos(ph) * h, std::sin(ph) * h);
  }
}

std::vector<cplx> transform_1d(const std::vector<cplx>& f, const Axis& in, const Axis& out, double k,
                               double z) {
  std::vector<cplx> result(out.n);
  constexpr std::size_t kBlock = 64;
  const std::size_t n_tasks = (out.n + kBlock - 1) / kBlock;
  parallel::for_each_task(n_tasks, [&](std::size_t t) {
    std::vector<cplx> row(in.n);
    const std::size_t end = std::min(out.n, (t + 1) * kBlock);
    for (std::size_t i = t * kBlock; i < end; ++i) {
      fill_kernel(in, out.node(i), k, z, row);
      result[i] = simd::cdot(f, row);
    }
  });
  return result;
}

cplx propagation_prefactor(double k, double z) {
  const double lambda = 2.0 * std::numbers::pi / k;
  return std::polar(1.0, std::fmod(k * z, 2.0 * std::numbers::pi)) / cplx(0.0, lambda * z);
}

void check_far_window(const MembraneConfig& cfg, double k, const Axis& out_x) {
  const double reach = std::max(std::abs(out_x.lo), std::abs(out_x.hi));
  const double need = cfg.z_d * cfg.km() / k + 4.0 * cfg.w_d(k);
  if (reach < need) {
    throw DomainError("far-field window reaches " + std::to_string(reach) + " m but the diffraction orders need " +
                      std::to_string(need) + " m");
  }
  if (cfg.z_d < k * cfg.w0 * cfg.w0) {
    warn("detection distance " + std::to_string(cfg.z_d) + " m is not in the far field (k w0^2 = " +
         std::to_string(k * cfg.w0 * cfg.w0) + " m)");
  }
}

}  // namespace

void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard lock(g_warn_mutex);
  g_warn_handler = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard lock(g_warn_mutex);
  if (g_warn_handler) {
    g_warn_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

double OpticalParams::k() const { return 2.0 * std::numbers::pi / wavelength; }

void OpticalParams::validate() const {
  if (!(wavelength > 0.0)) throw PreconditionError("wavelength must be positive");
  if (!(alpha >= 0.0)) throw PreconditionError("amplitude alpha must be non-negative");
}

double MembraneConfig::km() const { return std::numbers::pi * m / Lx; }
double MembraneConfig::kn() const { return std::numbers::pi * n / Ly; }

void MembraneConfig::validate() const {
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw PreconditionError("membrane side lengths must be positive");
  if (!(w0 > 0.0)) throw PreconditionError("beam waist must be positive");
  if (!(z_d > 0.0)) throw PreconditionError("detection distance must be positive");
  if (m < 1 || n < 1) throw PreconditionError("mode indices must be positive");
}

void MembraneConfig::require_qpd_mode() const {
  if (m % 2 != 0 || n % 2 == 0) {
    throw UnsupportedModeError("mode (" + std::to_string(m) + "," + std::to_string(n) +
                               ") is not QPD-sensitive; need m even and n odd");
  }
}

const char* plane_name(Plane p) {
  switch (p) {
    case Plane::Device:
      return "device";
    case Plane::FarField:
      return "far-field";
    case Plane::Image:
      return "image";
  }
  return "unknown";
}

ScalarField SeparableField::expand() const {
  ScalarField out{CartesianGrid2D{x, y}, std::vector<cplx>(x.n * y.n)};
  for (std::size_t iy = 0; iy < y.n; ++iy) {
    const cplx sy = scale * fy[iy];
    for (std::size_t ix = 0; ix < x.n; ++ix) out.values[iy * x.n + ix] = sy * fx[ix];
  }
  return out;
}

FieldPair SeparablePair::expand() const { return FieldPair{u0.expand(), us.expand(), plane}; }

double power(const ScalarField& u) {
  if (u.values.size() != u.grid.size()) throw DimensionError("field size does not match its grid");
  return simd::norm2(u.values) * u.grid.cell_area();
}

ScalarField gaussian_input(const MembraneConfig& cfg, const CartesianGrid2D& grid) {
  cfg.validate();
  grid.validate();
  require_covers(grid, 6.0 * cfg.w0);
  ScalarField out{grid, std::vector<cplx>(grid.size())};
  for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
    const double gy = gauss_1d(grid.y.node(iy), cfg.w0);
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
      out.values[grid.index(ix, iy)] = gauss_1d(grid.x.node(ix), cfg.w0) * gy;
    }
  }
  return out;
}

RealField membrane_mode(const MembraneConfig& cfg, const CartesianGrid2D& grid) {
  cfg.validate();
  cfg.require_qpd_mode();
  const double km = cfg.km();
  const double kn = cfg.kn();
  return RealField{grid, sample(grid, [&](double x, double y) { return std::sin(km * x) * std::cos(kn * y); })};
}

FieldPair reflect(const ScalarField& u_in, const RealField& psi) {
  require_same_grid(u_in.grid, psi.grid);
  FieldPair out{u_in, ScalarField{u_in.grid, std::vector<cplx>(u_in.values.size())}, Plane::Device};
  for (std::size_t i = 0; i < u_in.values.size(); ++i) {
    out.us.values[i] = cplx(0.0, 2.0 * psi.values[i]) * u_in.values[i];
  }
  return out;
}

FieldPair phase_contrast_image(const ScalarField& u_in, const RealField& psi) {
  FieldPair out = reflect(u_in, psi);
  for (cplx& v : out.u0.values) v *= cplx(0.0, 1.0);
  out.plane = Plane::Image;
  return out;
}

FirstOrderIntensity first_order_intensity(const FieldPair& fields, const OpticalParams& params) {
  require_same_grid(fields.u0.grid, fields.us.grid);
  const double a2 = params.alpha * params.alpha;
  const double k = params.k();
  FirstOrderIntensity out;
  out.stationary.resize(fields.u0.values.size());
  out.coefficient.resize(fields.u0.values.size());
  simd::abs2(fields.u0.values, out.stationary);
  simd::re_conj_mul(fields.u0.values, fields.us.values, out.coefficient);
  for (std::size_t i = 0; i < out.stationary.size(); ++i) {
    out.stationary[i] *= a2;
    out.coefficient[i] *= 2.0 * k * a2;
  }
  return out;
}

CartesianGrid2D device_grid(const MembraneConfig& cfg, std::size_t n) {
  const double r = 6.0 * cfg.w0;
  return CartesianGrid2D{Axis{-r, r, n}, Axis{-r, r, n}};
}

SeparablePair device_fields(const MembraneConfig& cfg, std::size_t n) {
  cfg.validate();
  cfg.require_qpd_mode();
  const double r = 6.0 * cfg.w0;
  const Axis ax{-r, r, n};
  SeparablePair p;
  p.plane = Plane::Device;
  p.u0 = SeparableField{ax, ax, std::vector<cplx>(n), std::vector<cplx>(n), cplx(1.0, 0.0)};
  p.us = SeparableField{ax, ax, std::vector<cplx>(n), std::vector<cplx>(n), cplx(0.0, 2.0)};
  const double km = cfg.km();
  const double kn = cfg.kn();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ax.node(i);
    const double g = gauss_1d(x, cfg.w0);
    p.u0.fx[i] = g;
    p.u0.fy[i] = g;
    p.us.fx[i] = std::sin(km * x) * g;
    p.us.fy[i] = std::cos(kn * x) * g;
  }
  return p;
}

CartesianGrid2D far_grid(const MembraneConfig& cfg, double k, std::size_t nx, std::size_t ny) {
  const double wd = cfg.w_d(k);
  const double rx = (cfg.km() * cfg.w0 + 6.0) * wd;
  const double ry = 6.0 * wd;
  return CartesianGrid2D{Axis{-rx, rx, nx}, Axis{-ry, ry, ny}};
}

ScalarField fraunhofer(const ScalarField& field, const MembraneConfig& cfg, double k,
                       const CartesianGrid2D& out) {
  out.validate();
  check_far_window(cfg, k, out.x);
  const CartesianGrid2D& in = field.grid;
  if (field.values.size() != in.size()) throw DimensionError("field size does not match its grid");
  const double z = cfg.z_d;

  // Pass 1: along x for every input row; stored transposed as t[X][y].
  std::vector<cplx> t(out.x.n * in.y.n);
  parallel::for_each_task(out.x.n, [&](std::size_t ox) {
    std::vector<cplx> row(in.x.n);
    fill_kernel(in.x, out.x.node(ox), k, z, row);
    for (std::size_t iy = 0; iy < in.y.n; ++iy) {
      t[ox * in.y.n + iy] = simd::cdot(std::span<const cplx>(field.values).subspan(iy * in.x.n, in.x.n), row);
    }
  });

  // Pass 2: along y.
  const cplx pre = propagation_prefactor(k, z);
  ScalarField result{out, std::vector<cplx>(out.size())};
  parallel::for_each_task(out.y.n, [&](std::size_t oy) {
    std::vector<cplx> row(in.y.n);
    fill_kernel(in.y, out.y.node(oy), k, z, row);
    for (std::size_t ox = 0; ox < out.x.n; ++ox) {
      result.values[out.index(ox, oy)] =
          pre * simd::cdot(std::span<const cplx>(t).subspan(ox * in.y.n, in.y.n), row);
    }
  });
  return result;
}

SeparableField fraunhofer(const SeparableField& field, const MembraneConfig& cfg, double k, const Axis& out_x,
                          const Axis& out_y, bool check_window) {
  out_x.validate();
  out_y.validate();
  if (check_window) check_far_window(cfg, k, out_x);
  SeparableField out;
  out.x = out_x;
  out.y = out_y;
  out.fx = transform_1d(field.fx, field.x, out_x, k, cfg.z_d);
  out.fy = transform_1d(field.fy, field.y, out_y, k, cfg.z_d);
  out.scale = field.scale * propagation_prefactor(k, cfg.z_d);
  return out;
}

SeparablePair fraunhofer(const SeparablePair& pair, const MembraneConfig& cfg, double k, const Axis& out_x,
                         const Axis& out_y, bool check_window) {
  return SeparablePair{fraunhofer(pair.u0, cfg, k, out_x, out_y, check_window),
                       fraunhofer(pair.us, cfg, k, out_x, out_y, false), Plane::FarField};
}

SeparablePair optical_lever_fields(const MembraneConfig& cfg, double k, const Axis& x, const Axis& y,
                                   double threshold) {
  cfg.validate();
  cfg.require_qpd_mode();
  const double a = cfg.km() * cfg.w0;
  if (a > threshold) {
    throw LimitInvalidError("optical-lever limit needs k_m w0 <= " + std::to_string(threshold) + ", got " +
                            std::to_string(a));
  }
  const double wd = cfg.w_d(k);
  const cplx scale = cplx(0.0, -1.0) * std::polar(1.0, std::fmod(k * cfg.z_d, 2.0 * std::numbers::pi));
  SeparablePair p;
  p.plane = Plane::FarField;
  p.u0 = SeparableField{x, y, std::vector<cplx>(x.n), std::vector<cplx>(y.n), scale};
  p.us = SeparableField{x, y, std::vector<cplx>(x.n), std::vector<cplx>(y.n), scale};
  for (std::size_t i = 0; i < x.n; ++i) {
    const double X = x.node(i);
    const double g = gauss_1d(X, wd);
    p.u0.fx[i] = g;
    p.us.fx[i] = -2.0 * a * (X / wd) * g;
  }
  for (std::size_t j = 0; j < y.n; ++j) {
    const double Y = y.node(j);
    const double g = gauss_1d(Y, wd);
    p.u0.fy[j] = g;
    p.us.fy[j] = g;
  }
  return p;
}

}  // namespace effmap
