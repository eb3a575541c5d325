#include "effmap/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effmap/errors.hpp"
#include "effmap/simd.hpp"

namespace effmap {
namespace {

void require_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << " has " << got << " samples, detection domain has " << want;
    throw DimensionError(msg.str());
  }
}

std::vector<double> times(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace

PointTerms PointTerms::build(std::vector<double> weight, std::vector<double> cross, std::vector<double> p0,
                             std::vector<double> ps) {
  const std::size_t n = weight.size();
  require_len(cross.size(), n, "cross term");
  require_len(p0.size(), n, "stationary intensity");
  require_len(ps.size(), n, "signal intensity");
  PointTerms t;
  t.w_cross = times(weight, cross);
  t.w_p0 = times(weight, p0);
  t.w_ps = times(weight, ps);
  t.weight = std::move(weight);
  t.cross = std::move(cross);
  t.p0 = std::move(p0);
  t.ps = std::move(ps);
  return t;
}

PointTerms point_terms(const FieldPair& fields) {
  const CartesianGrid2D& g = fields.u0.grid;
  const CartesianGrid2D& h = fields.us.grid;
  if (g.x.n != h.x.n || g.y.n != h.y.n || g.x.lo != h.x.lo || g.x.hi != h.x.hi || g.y.lo != h.y.lo ||
      g.y.hi != h.y.hi) {
    throw DimensionError("stationary and signal fields are on different grids");
  }
  const std::size_t n = g.size();
  require_len(fields.u0.values.size(), n, "stationary field");
  require_len(fields.us.values.size(), n, "signal field");
  std::vector<double> cross(n), p0(n), ps(n);
  simd::re_conj_mul(fields.u0.values, fields.us.values, cross);
  simd::abs2(fields.u0.values, p0);
  simd::abs2(fields.us.values, ps);
  return PointTerms::build(std::vector<double>(n, g.cell_area()), std::move(cross), std::move(p0), std::move(ps));
}

PointTerms point_terms(const SeparablePair& f) {
  const std::size_t nx = f.u0.x.n;
  const std::size_t ny = f.u0.y.n;
  if (f.us.x.n != nx || f.us.y.n != ny) throw DimensionError("separable factors have different lengths");
  const std::size_t n = nx * ny;
  std::vector<double> cross(n), p0(n), ps(n);
  const cplx s0 = f.u0.scale;
  const cplx ss = f.us.scale;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const cplx a_y = s0 * f.u0.fy[iy];
    const cplx b_y = ss * f.us.fy[iy];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const cplx a = a_y * f.u0.fx[ix];
      const cplx b = b_y * f.us.fx[ix];
      const std::size_t i = iy * nx + ix;
      cross[i] = a.real() * b.real() + a.imag() * b.imag();
      p0[i] = a.real() * a.real() + a.imag() * a.imag();
      ps[i] = b.real() * b.real() + b.imag() * b.imag();
    }
  }
  const double area = f.u0.x.step() * f.u0.y.step();
  return PointTerms::build(std::vector<double>(n, area), std::move(cross), std::move(p0), std::move(ps));
}

double sensitivity(const PointTerms& t, std::span<const double> f, const Probe& probe) {
  require_len(f.size(), t.size(), "weighting");
  return 2.0 * probe.k * probe.alpha0 * probe.alpha_signal * simd::dot(f, t.w_cross);
}

double noise(const PointTerms& t, std::span<const double> f, const Probe& probe) {
  require_len(f.size(), t.size(), "weighting");
  return probe.alpha0 * probe.alpha0 * simd::dot3(f, f, t.w_p0);
}

double ideal_information(const PointTerms& t, const Probe& probe) {
  return 4.0 * probe.k * probe.k * probe.alpha_signal * probe.alpha_signal * simd::sum(t.w_ps);
}

DetectionBudget assemble_budget(double S, double N, double I) {
  DetectionBudget b;
  b.S = S;
  b.N = N;
  b.I = I;
  b.S_imp = N / (S * S);
  b.S_ideal = 1.0 / I;
  b.eta = (S * S) / (N * I);
  b.S_ba = 0.25 * kHbar * kHbar * I;
  return b;
}

DetectionBudget budget(const PointTerms& t, std::span<const double> f, const Probe& probe,
                       std::optional<double> information) {
  const double S = sensitivity(t, f, probe);
  const double N = noise(t, f, probe);
  const double I_domain = ideal_information(t, probe);
  const double I = information.value_or(I_domain);
  if (!(I > 0.0)) throw DegenerateWeightingError("signal field carries no information (I = 0)");
  // Cauchy–Schwarz: S² ≤ N · I_domain, so the ratio measures how far S is
  // from vanishing independently of units.
  const double bound = std::sqrt(std::max(0.0, N) * I_domain);
  if (!(N > 0.0) || std::abs(S) <= 1e-10 * bound) {
    throw DegenerateWeightingError("weighting has zero sensitivity; imprecision diverges and eta is undefined");
  }
  return assemble_budget(S, N, I);
}

DetectionBudget ideal_budget(const PointTerms& t, const Probe& probe, std::optional<double> information) {
  const double I_domain = ideal_information(t, probe);
  const double I = information.value_or(I_domain);
  if (!(I_domain > 0.0)) throw DegenerateWeightingError("signal field carries no information on the domain");
  const double N = probe.alpha0 * probe.alpha0;
  DetectionBudget b = assemble_budget(std::sqrt(N * I_domain), N, I);
  if (!information) {
    b.S_imp = b.S_ideal;
    b.eta = 1.0;
  }
  return b;
}

DetectionBudget with_quantum_efficiency(DetectionBudget b, double eta_qe) {
  if (!(eta_qe > 0.0) || eta_qe > 1.0) throw PreconditionError("quantum efficiency must lie in (0, 1]");
  b.eta_qe = eta_qe;
  b.eta *= eta_qe;
  b.S_imp /= eta_qe;
  return b;
}

double sensitivity(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params) {
  const PointTerms t = point_terms(fields);
  return sensitivity(t, fw.sample(fields.u0.grid), Probe::from(params));
}

double noise(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params) {
  const PointTerms t = point_terms(fields);
  return noise(t, fw.sample(fields.u0.grid), Probe::from(params));
}

double ideal_information(const FieldPair& fields, const OpticalParams& params) {
  return ideal_information(point_terms(fields), Probe::from(params));
}

DetectionBudget budget(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params) {
  const PointTerms t = point_terms(fields);
  return budget(t, fw.sample(fields.u0.grid), Probe::from(params));
}

DdeProfile dde_map(const PointTerms& t, std::span<const double> f, const Probe& probe, const DetectionBudget& b) {
  require_len(f.size(), t.size(), "weighting");
  const double ratio = b.S / b.N;
  const double c1 = 4.0 * probe.k * probe.alpha0 * probe.alpha_signal * ratio / b.I;
  const double c2 = probe.alpha0 * probe.alpha0 * ratio * ratio / b.I;
  DdeProfile p;
  p.dde.resize(t.size());
  simd::dde_combine(f, t.cross, t.p0, c1, c2, p.dde);
  p.integral_check = simd::dot(p.dde, t.weight);
  p.eta = b.eta / b.eta_qe;
  const DdeProfile ideal = ideal_dde(t, probe, b.I);
  p.ideal = ideal.dde;
  p.ideal_integral = ideal.integral_check;
  return p;
}

DdeProfile ideal_dde(const PointTerms& t, const Probe& probe, std::optional<double> information) {
  const double I = information.value_or(ideal_information(t, probe));
  if (!(I > 0.0)) throw DegenerateWeightingError("signal field carries no information (I = 0)");
  const double c = 4.0 * probe.k * probe.k * probe.alpha_signal * probe.alpha_signal / I;
  DdeProfile p;
  p.dde.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) p.dde[i] = c * t.ps[i];
  p.integral_check = simd::dot(p.dde, t.weight);
  p.eta = p.integral_check;
  p.ideal = p.dde;
  p.ideal_integral = p.integral_check;
  return p;
}

LineProfile reduce_over_y(const DdeProfile& p, const CartesianGrid2D& grid) {
  require_len(p.dde.size(), grid.size(), "DDE map");
  LineProfile out;
  out.x = grid.x.nodes();
  out.dde.assign(grid.x.n, 0.0);
  out.ideal.assign(grid.x.n, 0.0);
  const double hy = grid.y.step();
  for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
    for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
      out.dde[ix] += p.dde[grid.index(ix, iy)];
      out.ideal[ix] += p.ideal[grid.index(ix, iy)];
    }
  }
  for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
    out.dde[ix] *= hy;
    out.ideal[ix] *= hy;
  }
  return out;
}

ElementShare element_share(const PointTerms& t, std::span<const double> f, const Probe& probe) {
  return ElementShare{sensitivity(t, f, probe), noise(t, f, probe)};
}

double eta_without(const DetectionBudget& b, const ElementShare& e) {
  const double S = b.S - e.S;
  const double N = b.N - e.N;
  if (!(N > 0.0)) return 0.0;
  return (S * S) / (N * b.I);
}

double dde_by_exclusion(const DetectionBudget& b, const ElementShare& e, double width) {
  if (!(width > 0.0)) throw PreconditionError("element width must be positive");
  return (b.eta / b.eta_qe - eta_without(b, e)) / width;
}

ScanResult scan_1d(const std::function<double(double)>& objective, double lo, double hi, std::size_t n) {
  if (n < 3) throw PreconditionError("scan needs at least 3 samples");
  if (!(hi > lo)) throw PreconditionError("scan range is empty");
  ScanResult r;
  r.xs.resize(n);
  r.fs.resize(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    r.xs[i] = i + 1 == n ? hi : lo + h * static_cast<double>(i);
    r.fs[i] = objective(r.xs[i]);
  }
  const auto best_it = std::max_element(r.fs.begin(), r.fs.end());
  const std::size_t first = static_cast<std::size_t>(best_it - r.fs.begin());
  std::size_t last = first;
  for (std::size_t i = first + 1; i < n; ++i) {
    if (r.fs[i] == *best_it) last = i;
  }
  r.f_best = *best_it;
  if (last != first) {
    const double mid = 0.5 * (r.xs[first] + r.xs[last]);
    r.x_best = mid;
    return r;
  }
  r.x_best = r.xs[first];
  if (first == 0 || first + 1 == n) return r;
  const double fm = r.fs[first - 1];
  const double f0 = r.fs[first];
  const double fp = r.fs[first + 1];
  const double denom = fm - 2.0 * f0 + fp;
  if (!(denom < 0.0)) return r;
  const double offset = 0.5 * (fm - fp) / denom;
  const double xv = r.xs[first] + offset * h;
  const double fv = objective(xv);
  if (fv >= f0) {
    r.x_best = xv;
    r.f_best = fv;
    r.refined = true;
  }
  return r;
}

std::size_t derivative_sign_changes(std::span<const double> values, double tol) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  int prev = 0;
  std::size_t changes = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) <= tol * scale) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace effmap
