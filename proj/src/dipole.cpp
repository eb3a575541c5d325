#include "effmap/dipole.hpp"

#include <cmath>
#include <numbers>

#include "effmap/errors.hpp"
#include "effmap/simd.hpp"

namespace effmap {
namespace {

constexpr double kPi = std::numbers::pi;

double direction_component(double theta, double phi, DipoleAxis axis) {
  switch (axis) {
    case DipoleAxis::X0:
      return std::sin(theta) * std::cos(phi);
    case DipoleAxis::Y0:
      return std::sin(theta) * std::sin(phi);
    case DipoleAxis::Z0:
      break;
  }
  throw UnsupportedModeError("axial (z0) detection is not modelled: its information is mostly back-scattered");
}

VectorFarField make(const SolidAngleGrid& grid) {
  return VectorFarField{grid, std::vector<cplx>(grid.size()), std::vector<cplx>(grid.size())};
}

}  // namespace

const char* axis_name(DipoleAxis a) {
  switch (a) {
    case DipoleAxis::X0:
      return "x0";
    case DipoleAxis::Y0:
      return "y0";
    case DipoleAxis::Z0:
      return "z0";
  }
  return "unknown";
}

double DipoleConfig::k() const { return 2.0 * kPi / wavelength; }

void DipoleConfig::validate() const {
  if (!(na > 0.0) || na > 1.0) throw PreconditionError("collection NA must lie in (0, 1]");
  if (!(alpha0 > 0.0) || !(alpha_dip > 0.0)) throw PreconditionError("dipole amplitudes must be positive");
  if (!(wavelength > 0.0)) throw PreconditionError("wavelength must be positive");
  if (n_theta < 2 || n_phi < 4) throw PreconditionError("dipole grid needs at least 2 x 4 cells");
}

VectorFarField u_infinity(const SolidAngleGrid& grid) {
  if (grid.theta_max > 0.5 * kPi + 1e-12) throw DomainError("u_infinity is defined on the forward hemisphere only");
  VectorFarField u = make(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::sqrt(std::cos(grid.theta[i]) / kPi);
    u.theta[i] = std::cos(grid.phi[i]) * r;
    u.phi[i] = -std::sin(grid.phi[i]) * r;
  }
  return u;
}

VectorFarField u_dipole(const SolidAngleGrid& grid) {
  VectorFarField u = make(grid);
  const double c = std::sqrt(3.0 / (8.0 * kPi));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    u.theta[i] = -c * std::cos(grid.theta[i]) * std::cos(grid.phi[i]);
    u.phi[i] = c * std::sin(grid.phi[i]);
  }
  return u;
}

VectorFarField u_signal(const SolidAngleGrid& grid, DipoleAxis axis) {
  VectorFarField u = u_dipole(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = direction_component(grid.theta[i], grid.phi[i], axis);
    u.theta[i] *= d;
    u.phi[i] *= d;
  }
  return u;
}

DipoleFields build_fields(const DipoleConfig& cfg, const SolidAngleGrid& grid) {
  cfg.validate();
  if (cfg.axis == DipoleAxis::Z0) {
    throw UnsupportedModeError("axial (z0) detection is not modelled: its information is mostly back-scattered");
  }
  return DipoleFields{u_infinity(grid), u_signal(grid, cfg.axis)};
}

PointTerms dipole_terms(const DipoleFields& f) {
  const std::size_t n = f.u0.grid.size();
  if (f.us.grid.size() != n) throw DimensionError("stationary and signal fields are on different grids");
  std::vector<double> cross(n), p0(n), ps(n), tmp(n);
  simd::re_conj_mul(f.u0.theta, f.us.theta, cross);
  simd::re_conj_mul(f.u0.phi, f.us.phi, tmp);
  for (std::size_t i = 0; i < n; ++i) cross[i] += tmp[i];
  simd::abs2(f.u0.theta, p0);
  simd::abs2(f.u0.phi, tmp);
  for (std::size_t i = 0; i < n; ++i) p0[i] += tmp[i];
  simd::abs2(f.us.theta, ps);
  simd::abs2(f.us.phi, tmp);
  for (std::size_t i = 0; i < n; ++i) ps[i] += tmp[i];
  return PointTerms::build(f.u0.grid.weight, std::move(cross), std::move(p0), std::move(ps));
}

double dipole_information(const DipoleConfig& cfg, std::size_t n_theta, std::size_t n_phi) {
  cfg.validate();
  const SolidAngleGrid sphere = SolidAngleGrid::sphere(n_theta, n_phi);
  const VectorFarField us = u_signal(sphere, cfg.axis);
  std::vector<double> p(sphere.size()), t(sphere.size());
  simd::abs2(us.theta, p);
  simd::abs2(us.phi, t);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += t[i];
  const double power = integrate_sphere(p, sphere);
  const double k = cfg.k();
  return 4.0 * k * k * cfg.alpha_dip * cfg.alpha_dip * power;
}

double irp_value(double theta, double phi, DipoleAxis axis) {
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = std::cos(phi) * std::cos(phi);
  const double sp2 = std::sin(phi) * std::sin(phi);
  switch (axis) {
    case DipoleAxis::Y0:
      return 15.0 / (16.0 * kPi) * (1.0 - s2 * c2) * s2 * sp2;
    case DipoleAxis::X0:
      return 15.0 / (8.0 * kPi) * (1.0 - s2 * c2) * s2 * c2;
    case DipoleAxis::Z0:
      break;
  }
  throw UnsupportedModeError("no information radiation pattern for the axial coordinate");
}

DdeProfile irp(const DipoleConfig& cfg, const SolidAngleGrid& grid) {
  DdeProfile p;
  p.domain = DomainTag::Sphere;
  p.dde = sample(grid, [&](double t, double f) { return irp_value(t, f, cfg.axis); });
  p.ideal = p.dde;
  p.integral_check = integrate_sphere(p.dde, grid);
  p.ideal_integral = p.integral_check;
  p.eta = p.integral_check;
  return p;
}

double collection_efficiency(const DipoleConfig& cfg) {
  cfg.validate();
  const SolidAngleGrid cap = SolidAngleGrid::collection(cfg.na, cfg.n_theta, cfg.n_phi);
  return irp(cfg, cap).integral_check;
}

SphereWeight standard_qpd(const DipoleConfig& cfg) {
  return SphereWeight{cfg.axis == DipoleAxis::X0 ? SplitAxis::X : SplitAxis::Y, BlockShape::None, 0.0};
}

DipoleEvaluation dipole_evaluate(const DipoleConfig& cfg, const SphereWeight& fw) {
  cfg.validate();
  DipoleEvaluation e;
  e.grid = aligned_collection_grid(cfg.na, fw, cfg.n_theta, cfg.n_phi);
  e.f = fw.sample(e.grid);
  e.terms = dipole_terms(build_fields(cfg, e.grid));
  e.budget = budget(e.terms, e.f, cfg.probe(), dipole_information(cfg));
  return e;
}

DetectionBudget dipole_budget(const DipoleConfig& cfg, const SphereWeight& fw) { return dipole_evaluate(cfg, fw).budget; }

EtaFactorization eta_factorization(const DipoleConfig& cfg, const SphereWeight& fw) {
  EtaFactorization r;
  r.eta = dipole_budget(cfg, fw).eta;
  r.eta_col = collection_efficiency(cfg);
  r.eta_qpd = r.eta / r.eta_col;
  return r;
}

EtaFactorization ideal_factorization(const DipoleConfig& cfg) {
  cfg.validate();
  const SolidAngleGrid cap = SolidAngleGrid::collection(cfg.na, cfg.n_theta, cfg.n_phi);
  const PointTerms t = dipole_terms(build_fields(cfg, cap));
  EtaFactorization r;
  r.eta = ideal_budget(t, cfg.probe(), dipole_information(cfg)).eta;
  r.eta_col = collection_efficiency(cfg);
  r.eta_qpd = r.eta / r.eta_col;
  return r;
}

double dipole_blocked_fraction(const DipoleConfig& cfg, const SphereWeight& fw) {
  const SolidAngleGrid grid = aligned_collection_grid(cfg.na, fw, cfg.n_theta, cfg.n_phi);
  const VectorFarField u0 = u_infinity(grid);
  double blocked = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = std::norm(u0.theta[i]) + std::norm(u0.phi[i]);
    total += p * grid.weight[i];
    if (fw.blocked(grid.theta[i], grid.phi[i])) blocked += p * grid.weight[i];
  }
  return total > 0.0 ? blocked / total : 0.0;
}

BlockAngleOptimization block_angle_optimization(const DipoleConfig& cfg, BlockShape shape, std::size_t n) {
  cfg.validate();
  if (shape == BlockShape::None) throw PreconditionError("block optimisation needs a block shape");
  const SphereWeight base = standard_qpd(cfg);
  const double hi = shape == BlockShape::Cap ? 0.95 * std::asin(cfg.na) : 0.95 * cfg.na;
  const double info = dipole_information(cfg);
  BlockAngleOptimization r;
  r.shape = shape;
  r.eta_standard = dipole_budget(cfg, base).eta;
  std::vector<double> fractions;
  auto objective = [&](double size) {
    SphereWeight w = base;
    w.block = size > 0.0 ? shape : BlockShape::None;
    w.size = size;
    const SolidAngleGrid grid = aligned_collection_grid(cfg.na, w, cfg.n_theta, cfg.n_phi);
    const PointTerms t = dipole_terms(build_fields(cfg, grid));
    fractions.push_back(dipole_blocked_fraction(cfg, w));
    try {
      return budget(t, w.sample(grid), cfg.probe(), info).eta;
    } catch (const DegenerateWeightingError&) {
      return 0.0;
    }
  };
  r.scan = scan_1d(objective, 0.0, hi, n);
  fractions.resize(n);
  r.blocked_fractions = std::move(fractions);
  r.size_best = r.scan.x_best;
  r.eta_best = r.scan.f_best;
  SphereWeight best = base;
  best.block = r.size_best > 0.0 ? shape : BlockShape::None;
  best.size = r.size_best;
  r.blocked_fraction = dipole_blocked_fraction(cfg, best);
  return r;
}

}  // namespace effmap
