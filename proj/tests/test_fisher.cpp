#include <doctest.h>

#include <cmath>

#include "effmap/errors.hpp"
#include "effmap/fisher.hpp"
#include "effmap/membrane.hpp"

using namespace effmap;

namespace {

FieldPair membrane_pair(int m, int n = 1, std::size_t cells = 128) {
  MembraneConfig cfg;
  cfg.m = m;
  cfg.n = n;
  const CartesianGrid2D g = device_grid(cfg, cells);
  return reflect(gaussian_input(cfg, g), membrane_mode(cfg, g));
}

FieldPair interferometer_pair() {
  MembraneConfig cfg;
  const CartesianGrid2D g = device_grid(cfg, 128);
  return reflect(gaussian_input(cfg, g), RealField{g, std::vector<double>(g.size(), 1.0)});
}

}  // namespace

TEST_CASE("decomposition of membrane fields") {
  for (int m : {2, 4, 10}) {
    const FieldPair f = membrane_pair(m);
    const SignalDecomposition d = decompose(f);
    CAPTURE(m);
    CHECK(std::abs(d.phi_I) < 1e-6);
    CHECK(std::abs(d.amplitude) < 1e-9);
    CHECK(d.orthogonality_error(f) < 1e-9);
    double peak = 0;
    for (const cplx& z : f.us.values) peak = std::max(peak, std::abs(z));
    CHECK(d.reconstruction_error(f) < 1e-9 * peak);
  }
}

TEST_CASE("decomposition of the interferometer and of a null signal") {
  const SignalDecomposition d = decompose(interferometer_pair());
  CHECK(std::abs(d.phi_I - 2.0) < 1e-9);
  CHECK(std::abs(d.n_perp) < 1e-9);

  FieldPair z = interferometer_pair();
  for (cplx& v : z.us.values) v = 0.0;
  const SignalDecomposition d0 = decompose(z);
  CHECK(d0.phi_I == 0.0);
  CHECK(d0.n_perp == 0.0);
}

TEST_CASE("quantum Fisher information against the ideal imprecision") {
  const OpticalParams params{1064e-9, 1.5};
  for (int m : {2, 6, 10}) {
    const FieldPair f = membrane_pair(m);
    const QfiResult q = qfi(f, params);
    const DetectionBudget ideal = ideal_budget(point_terms(f), Probe::from(params));
    CHECK(std::abs(q.F_Q * ideal.S_ideal - 1) < 1e-6);
    CHECK(q.parallel >= 0.0);
    CHECK(q.perpendicular >= 0.0);
    const SignalDecomposition d = decompose(f);
    const double k = params.k();
    const double formula = 4 * k * k * params.alpha * params.alpha * (d.phi_I * d.phi_I + d.n_perp);
    CHECK(std::abs(q.F_Q - formula) <= 1e-9 * q.F_Q);
  }
  const QfiResult qi = qfi(interferometer_pair(), params);
  const double k = params.k();
  CHECK(std::abs(qi.F_Q / (16 * params.alpha * params.alpha * k * k) - 1) < 1e-9);

  const FieldPair f = membrane_pair(4);
  const OpticalParams doubled{1064e-9, 3.0};
  CHECK(std::abs(qfi(f, doubled).F_Q / qfi(f, params).F_Q - 4) < 1e-12);
}

TEST_CASE("Cramer-Rao bound") {
  const OpticalParams params;
  const QfiResult q = qfi(interferometer_pair(), params);
  CHECK(cramer_rao(q, 2.0) == doctest::Approx(cramer_rao(q, 1.0) / 2).epsilon(1e-15));
  CHECK(std::abs(cramer_rao(q, 1.0) / interferometer_benchmark(params).S_imp - 1) < 1e-9);
  CHECK_THROWS_AS(cramer_rao(q, 0.0), PreconditionError);
  CHECK_THROWS_AS(cramer_rao(q, -1.0), PreconditionError);
}

TEST_CASE("measured imprecision respects the bound, with equality only at eta = 1") {
  const OpticalParams params;
  for (int m : {2, 6}) {
    MembraneConfig cfg;
    cfg.m = m;
    const FarFieldSource src(cfg, params, FieldModel::Numeric);
    const QfiResult q = qfi(membrane_pair(m, 1, 256), params);
    const double tau = 0.5;
    const Evaluation e = evaluate(src, WeightFunction::qpd());
    CHECK(e.budget.S_imp / tau >= cramer_rao(q, tau));
    CHECK(e.budget.S_imp / tau > 1.1 * cramer_rao(q, tau));
    const DetectionBudget ideal = ideal_budget(e.terms, src.probe());
    CHECK(std::abs(ideal.S_imp / tau / cramer_rao(q, tau) - 1) < 1e-4);
  }
}

TEST_CASE("mismatched grids are rejected") {
  FieldPair f = membrane_pair(2);
  f.us.values.pop_back();
  CHECK_THROWS_AS(decompose(f), DimensionError);
}
