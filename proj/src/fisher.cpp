#include "effmap/fisher.hpp"

#include <algorithm>
#include <cmath>

#include "effmap/errors.hpp"
#include "effmap/simd.hpp"

namespace effmap {
namespace {

cplx overlap(const ScalarField& a, const ScalarField& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
  return s * a.grid.cell_area();
}

double power_of(const ScalarField& u) {
  std::vector<double> p(u.values.size());
  simd::abs2(u.values, p);
  return simd::sum(p) * u.grid.cell_area();
}

void check_pair(const FieldPair& f) {
  if (f.u0.values.size() != f.us.values.size() || f.u0.values.size() != f.u0.grid.size()) {
    throw DimensionError("stationary and signal fields must share one grid");
  }
}

}  // namespace

SignalDecomposition decompose(const FieldPair& fields) {
  check_pair(fields);
  SignalDecomposition d;
  d.u0_norm = power_of(fields.u0);
  const cplx raw = overlap(fields.u0, fields.us);
  d.overlap = d.u0_norm > 0.0 ? raw / d.u0_norm : cplx{};
  d.phi_I = d.overlap.imag();
  d.amplitude = d.overlap.real();
  d.us_perp.grid = fields.us.grid;
  d.us_perp.values.resize(fields.us.values.size());
  for (std::size_t i = 0; i < d.us_perp.values.size(); ++i) {
    d.us_perp.values[i] = fields.us.values[i] - d.overlap * fields.u0.values[i];
  }
  d.n_perp = power_of(d.us_perp);
  return d;
}

double SignalDecomposition::reconstruction_error(const FieldPair& fields) const {
  double err = 0.0;
  for (std::size_t i = 0; i < us_perp.values.size(); ++i) {
    err = std::max(err, std::abs(overlap * fields.u0.values[i] + us_perp.values[i] - fields.us.values[i]));
  }
  return err;
}

double SignalDecomposition::orthogonality_error(const FieldPair& fields) const {
  return std::abs(effmap::overlap(fields.u0, us_perp));
}

QfiResult qfi(const SignalDecomposition& d, const OpticalParams& params) {
  const double k = params.k();
  const double scale = 4.0 * k * k * params.alpha * params.alpha;
  QfiResult q;
  q.parallel = scale * std::norm(d.overlap) * d.u0_norm;
  q.perpendicular = scale * d.n_perp;
  q.F_Q = q.parallel + q.perpendicular;
  return q;
}

QfiResult qfi(const FieldPair& fields, const OpticalParams& params) { return qfi(decompose(fields), params); }

double cramer_rao(const QfiResult& q, double tau) {
  if (!(tau > 0.0)) throw PreconditionError("integration time must be positive");
  return 1.0 / (tau * q.F_Q);
}

}  // namespace effmap
