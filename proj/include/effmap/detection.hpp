#pragma once
// Detection functionals. Everything reduces to four per-node quantities:
// the quadrature weight, Re[u0·us*], |u0|² and |us|². Cartesian planes and
// the collection sphere only differ in how those are built.
//
//   S = 2 k α0 αs ∫ f Re[u0·us*]      N = α0² ∫ f² |u0|²      I = 4 k² αs² ∫ |us|²
//   S_imp = N / S²,  S_ideal = 1 / I,  η = S² / (N I),  S_ba = (ħ/2)² I

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effmap/fields.hpp"
#include "effmap/quadrature.hpp"
#include "effmap/weights.hpp"

namespace effmap {

/// Wavenumber and the two field amplitudes (stationary and signal). Scalar
/// membrane scenarios use the same α for both.
struct Probe {
  double k = 0.0;
  double alpha0 = 1.0;
  double alpha_signal = 1.0;

  static Probe from(const OpticalParams& p) { return Probe{p.k(), p.alpha, p.alpha}; }
};

/// Per-node products, pre-multiplied by the quadrature weight.
struct PointTerms {
  std::vector<double> weight;
  std::vector<double> cross;  // Re[u0·us*]
  std::vector<double> p0;     // |u0|²
  std::vector<double> ps;     // |us|²
  std::vector<double> w_cross;
  std::vector<double> w_p0;
  std::vector<double> w_ps;

  std::size_t size() const { return weight.size(); }

  static PointTerms build(std::vector<double> weight, std::vector<double> cross, std::vector<double> p0,
                          std::vector<double> ps);
};

/// Terms of a Cartesian pair (u0 and us must share the grid).
PointTerms point_terms(const FieldPair& fields);
/// Same, without materialising the 2-D complex fields.
PointTerms point_terms(const SeparablePair& fields);

struct DetectionBudget {
  double S = 0.0;
  double N = 0.0;
  double I = 0.0;
  double S_imp = 0.0;
  double S_ideal = 0.0;
  double eta = 0.0;
  double S_ba = 0.0;
  double eta_qe = 1.0;

  /// S_imp S_ba / ħ²; 1/4 exactly when η = 1.
  double heisenberg_product_over_hbar2() const { return S_imp * S_ba / (kHbar * kHbar); }
};

double sensitivity(const PointTerms& t, std::span<const double> f, const Probe& probe);
double noise(const PointTerms& t, std::span<const double> f, const Probe& probe);
double ideal_information(const PointTerms& t, const Probe& probe);

/// Budget for weighting f. `information` overrides I when part of the light
/// misses the detection domain (the dipole collection cap). Throws
/// DegenerateWeightingError when S vanishes relative to its Cauchy–Schwarz
/// bound or N = 0.
DetectionBudget budget(const PointTerms& t, std::span<const double> f, const Probe& probe,
                       std::optional<double> information = std::nullopt);

/// Ideal homodyne detection on the domain (local oscillator matched to us):
/// S_imp = 1/I_D, η = I_D / I. Reports N = α0² and S = sqrt(N I_D).
DetectionBudget ideal_budget(const PointTerms& t, const Probe& probe, std::optional<double> information = std::nullopt);

/// Scales η by a detector quantum efficiency and S_imp by its inverse.
DetectionBudget with_quantum_efficiency(DetectionBudget b, double eta_qe);

/// Budget from the raw constituents (S, N, I).
DetectionBudget assemble_budget(double S, double N, double I);

// Field-level conveniences for Cartesian planes.
double sensitivity(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params);
double noise(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params);
double ideal_information(const FieldPair& fields, const OpticalParams& params);
DetectionBudget budget(const FieldPair& fields, const WeightFunction& fw, const OpticalParams& params);

enum class DomainTag { Plane, Sphere, Line };

/// dη/da (or dη/dΩ) at every node, its ideal counterpart, and ∫DDE.
struct DdeProfile {
  std::vector<double> dde;
  std::vector<double> ideal;
  double integral_check = 0.0;
  double eta = 0.0;
  double ideal_integral = 0.0;
  DomainTag domain = DomainTag::Plane;

  double residual() const { return std::abs(integral_check - eta); }
};

/// DDE = c1 f Re[u0·us*] − c2 f² |u0|² with c1 = 4kα0αs(S/N)/I, c2 = α0²(S/N)²/I.
DdeProfile dde_map(const PointTerms& t, std::span<const double> f, const Probe& probe, const DetectionBudget& b);
/// |us|² normalised by the total information: 4k²αs²|us|²/I.
DdeProfile ideal_dde(const PointTerms& t, const Probe& probe, std::optional<double> information = std::nullopt);

/// 1-D profile dη/dx = ∫ dη/da dy for both DDE and ideal parts.
struct LineProfile {
  std::vector<double> x;
  std::vector<double> dde;
  std::vector<double> ideal;
};
LineProfile reduce_over_y(const DdeProfile& p, const CartesianGrid2D& grid);

/// Contribution of a detector element to S and N, integrated over the
/// element only (terms and f sampled on an element-local grid).
struct ElementShare {
  double S = 0.0;
  double N = 0.0;
};
ElementShare element_share(const PointTerms& t, std::span<const double> f, const Probe& probe);

/// η with the element removed: (S − dS)² / ((N − dN) I).
double eta_without(const DetectionBudget& b, const ElementShare& e);
/// Finite-difference DDE estimate (η − η_without) / width.
double dde_by_exclusion(const DetectionBudget& b, const ElementShare& e, double width);

struct ScanResult {
  double x_best = 0.0;
  double f_best = 0.0;
  std::vector<double> xs;
  std::vector<double> fs;
  bool refined = false;  // parabolic vertex accepted
};

/// Samples objective at n ≥ 3 evenly spaced points of [lo, hi]. Ties resolve
/// to the midpoint of the first and last tied samples; a unique interior
/// maximum is refined with the parabola through its neighbours and kept when
/// the objective there is at least the sampled maximum.
ScanResult scan_1d(const std::function<double(double)>& objective, double lo, double hi, std::size_t n = 201);

/// Number of sign changes of the discrete derivative, ignoring steps below
/// tol (relative to the largest value).
std::size_t derivative_sign_changes(std::span<const double> values, double tol = 1e-4);

}  // namespace effmap
