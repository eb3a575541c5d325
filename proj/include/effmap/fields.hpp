#pragma once
// Scalar optical mode functions for the membrane scenarios. The output field
// of the device is u0 + k A us to first order in the mode amplitude A; us is
// kept unnormalised and carries the 1/k so that every functional picks up k
// explicitly.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "effmap/quadrature.hpp"

namespace effmap {

using cplx = std::complex<double>;

inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Warnings raised by numerics that still return a value (far-field condition,
/// grating limit). The default handler writes to stderr.
void set_warning_handler(std::function<void(const std::string&)> handler);
void warn(const std::string& message);

struct OpticalParams {
  double wavelength = 1064e-9;  // m
  double alpha = 1.0;           // sqrt(photons/s)

  double k() const;
  void validate() const;
};

/// Rectangular membrane, Gaussian spot and detection distance. k_m and k_n
/// are always derived from the mode indices.
struct MembraneConfig {
  double Lx = 1.5e-3;
  double Ly = 3.5e-3;
  int m = 2;
  int n = 1;
  double w0 = 100e-6;
  double z_d = 0.3;

  double km() const;
  double kn() const;
  double w_d(double k) const { return z_d / (k * w0); }
  /// Distance at which the far-field waist equals w_d.
  static double z_for_waist(double w_d, double k, double w0) { return w_d * k * w0; }

  void validate() const;
  /// QPD-sensitive family only: m even, n odd.
  void require_qpd_mode() const;
};

enum class Plane { Device, FarField, Image };
const char* plane_name(Plane p);

struct ScalarField {
  CartesianGrid2D grid;
  std::vector<cplx> values;
};

struct RealField {
  CartesianGrid2D grid;
  std::vector<double> values;
};

struct FieldPair {
  ScalarField u0;
  ScalarField us;
  Plane plane = Plane::Device;
};

/// f(x, y) = scale * fx(x) * fy(y). Every membrane field is of this form, which
/// turns the Fraunhofer integral into two 1-D transforms.
struct SeparableField {
  Axis x;
  Axis y;
  std::vector<cplx> fx;
  std::vector<cplx> fy;
  cplx scale{1.0, 0.0};

  ScalarField expand() const;
  cplx at(std::size_t ix, std::size_t iy) const { return scale * fx[ix] * fy[iy]; }
};

struct SeparablePair {
  SeparableField u0;
  SeparableField us;
  Plane plane = Plane::Device;

  FieldPair expand() const;
};

/// ∫|u|² da.
double power(const ScalarField& u);

ScalarField gaussian_input(const MembraneConfig& cfg, const CartesianGrid2D& grid);
RealField membrane_mode(const MembraneConfig& cfg, const CartesianGrid2D& grid);

/// Device-plane pair: u0 = u_in, us = 2i ψ u_in.
FieldPair reflect(const ScalarField& u_in, const RealField& psi);
/// Image plane behind a π/2 phase plate: u0 = i u_in, us = 2i ψ u_in.
FieldPair phase_contrast_image(const ScalarField& u_in, const RealField& psi);

struct FirstOrderIntensity {
  std::vector<double> stationary;   // α²|u0|²
  std::vector<double> coefficient;  // 2kα² Re[u0* us], the term linear in A
};
FirstOrderIntensity first_order_intensity(const FieldPair& fields, const OpticalParams& params);

/// Default device grid: ±6 w0 on both axes.
CartesianGrid2D device_grid(const MembraneConfig& cfg, std::size_t n = 256);

/// Separable device-plane pair (u_in, 2iψ u_in) sampled on ±6 w0 with n cells.
SeparablePair device_fields(const MembraneConfig& cfg, std::size_t n = 256);

/// Default far-field window ±(k_m w0 + 6) w_d by ±6 w_d.
CartesianGrid2D far_grid(const MembraneConfig& cfg, double k, std::size_t nx = 1024, std::size_t ny = 256);

/// Fraunhofer propagation to z_d with kernel e^{ikz}/(iλz) e^{ik(xx'+yy')/z}.
/// Throws DomainError if the output window misses the first diffraction
/// orders (max |x| < z_d k_m/k + 4 w_d); warns if z_d < k w0².
ScalarField fraunhofer(const ScalarField& field, const MembraneConfig& cfg, double k,
                       const CartesianGrid2D& out);
/// Separable form; with check_window = false the output axes may be any
/// sub-window (element-local grids).
SeparableField fraunhofer(const SeparableField& field, const MembraneConfig& cfg, double k,
                          const Axis& out_x, const Axis& out_y, bool check_window = true);
SeparablePair fraunhofer(const SeparablePair& pair, const MembraneConfig& cfg, double k,
                         const Axis& out_x, const Axis& out_y, bool check_window = true);

/// Tilting-mirror limit: u0 = −i e^{ikz} Gaussian(w_d), us = −2 k_m w0 (x/w_d) u0.
/// Throws LimitInvalidError when k_m w0 exceeds `threshold`.
SeparablePair optical_lever_fields(const MembraneConfig& cfg, double k, const Axis& x, const Axis& y,
                                   double threshold = 0.1);

}  // namespace effmap
