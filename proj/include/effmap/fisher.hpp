#pragma once
// Quantum Fisher information of the reflected field, as a cross-check on the
// ideal imprecision: split us into a part along u0 and a part orthogonal to it.

#include <vector>

#include "effmap/fields.hpp"

namespace effmap {

struct SignalDecomposition {
  cplx overlap{};          // c = ∫u0* us / ∫|u0|²
  double phi_I = 0.0;      // Im c, the interferometric phase sensitivity
  double amplitude = 0.0;  // Re c, zero for pure phase modulation
  double u0_norm = 0.0;    // ∫|u0|², 1 for a normalised stationary field
  ScalarField us_perp;     // us − c u0
  double n_perp = 0.0;     // ∫|us_perp|²

  /// max |c u0 + us_perp − us|, the reconstruction error.
  double reconstruction_error(const FieldPair& fields) const;
  /// |∫u0* us_perp|.
  double orthogonality_error(const FieldPair& fields) const;
};

SignalDecomposition decompose(const FieldPair& fields);

struct QfiResult {
  double F_Q = 0.0;
  double parallel = 0.0;       // 4k²α²|c|²∫|u0|²
  double perpendicular = 0.0;  // 4k²α² n_perp
};

QfiResult qfi(const SignalDecomposition& d, const OpticalParams& params);
QfiResult qfi(const FieldPair& fields, const OpticalParams& params);

/// Lower bound 1/(τ F_Q) on the displacement variance after integrating for τ
/// seconds. τ <= 0 throws PreconditionError.
double cramer_rao(const QfiResult& q, double tau);

}  // namespace effmap
