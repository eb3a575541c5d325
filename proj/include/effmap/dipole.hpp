#pragma once
// Rayleigh scatterer position detection on the collection sphere. Fields are
// (θ̂, φ̂) vectors; the unscattered beam u∞ and the per-axis signal fields are
// real, so Re[u0·us*] reduces to a plain dot product.

#include <vector>

#include "effmap/detection.hpp"
#include "effmap/quadrature.hpp"
#include "effmap/weights.hpp"

namespace effmap {

enum class DipoleAxis { X0, Y0, Z0 };
const char* axis_name(DipoleAxis a);

struct DipoleConfig {
  double na = 1.0;             // collection numerical aperture
  double alpha0 = 1.0;         // unscattered amplitude, sqrt(photons/s)
  double alpha_dip = 1.0;      // scattered amplitude, sqrt(photons/s)
  double wavelength = 1064e-9;
  DipoleAxis axis = DipoleAxis::Y0;
  double gouy = 1.0;           // enters only the axial signal, which is not modelled
  std::size_t n_theta = 200;   // collection-cap rows
  std::size_t n_phi = 400;     // azimuthal cells per full row

  double k() const;
  void validate() const;
  Probe probe() const { return Probe{k(), alpha0, alpha_dip}; }
};

struct VectorFarField {
  SolidAngleGrid grid;
  std::vector<cplx> theta;  // θ̂ component
  std::vector<cplx> phi;    // φ̂ component
};

/// u∞ = (cos φ θ̂ − sin φ φ̂) sqrt(cos θ) / sqrt(π), forward hemisphere only.
VectorFarField u_infinity(const SolidAngleGrid& grid);
/// u_dip = sqrt(3/8π) (−cos θ cos φ θ̂ + sin φ φ̂).
VectorFarField u_dipole(const SolidAngleGrid& grid);
/// Signal per unit k·displacement: (r̂·ê_axis) u_dip.
VectorFarField u_signal(const SolidAngleGrid& grid, DipoleAxis axis);

struct DipoleFields {
  VectorFarField u0;
  VectorFarField us;
};

/// Throws UnsupportedModeError for the axial coordinate.
DipoleFields build_fields(const DipoleConfig& cfg, const SolidAngleGrid& grid);
PointTerms dipole_terms(const DipoleFields& fields);

/// 4k²α_dip² ∫_{4π} |us|² dΩ by spherical quadrature.
double dipole_information(const DipoleConfig& cfg, std::size_t n_theta = 400, std::size_t n_phi = 400);

/// Closed-form IRP, dη^ideal/dΩ, for the x0 or y0 axis.
double irp_value(double theta, double phi, DipoleAxis axis);
/// IRP sampled on a grid with its integral.
DdeProfile irp(const DipoleConfig& cfg, const SolidAngleGrid& grid);
/// ∫ IRP over the collection cap.
double collection_efficiency(const DipoleConfig& cfg);

struct DipoleEvaluation {
  SolidAngleGrid grid;
  std::vector<double> f;
  PointTerms terms;
  DetectionBudget budget;  // η normalised to the full-sphere information
};
DipoleEvaluation dipole_evaluate(const DipoleConfig& cfg, const SphereWeight& fw);
DetectionBudget dipole_budget(const DipoleConfig& cfg, const SphereWeight& fw);

/// Standard QPD split for the configured axis.
SphereWeight standard_qpd(const DipoleConfig& cfg);

struct EtaFactorization {
  double eta = 0.0;
  double eta_col = 0.0;
  double eta_qpd = 0.0;
};
EtaFactorization eta_factorization(const DipoleConfig& cfg, const SphereWeight& fw);
/// Ideal homodyne detection of everything collected: η = η_col, η_QPD = 1.
EtaFactorization ideal_factorization(const DipoleConfig& cfg);

struct BlockAngleOptimization {
  BlockShape shape = BlockShape::Strip;
  double size_best = 0.0;
  double eta_best = 0.0;
  double eta_standard = 0.0;
  double blocked_fraction = 0.0;  // of the collected stationary power
  ScanResult scan;
  std::vector<double> blocked_fractions;
};

/// Fraction of the collected u∞ power that the block removes.
double dipole_blocked_fraction(const DipoleConfig& cfg, const SphereWeight& fw);

/// Scans the block size over [0, 0.95 θ_max] (cap, radians) or [0, 0.95 NA]
/// (strip).
BlockAngleOptimization block_angle_optimization(const DipoleConfig& cfg, BlockShape shape, std::size_t n = 201);

}  // namespace effmap
