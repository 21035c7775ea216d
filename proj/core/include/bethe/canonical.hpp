#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bethe/tensor.hpp"

namespace bethe {

/// Gamma/lambda form of a translation-invariant tree state: one fully
/// symmetric order-q tensor Gamma^s per spin value and the Schmidt
/// coefficients lambda shared by every bond.
struct CanonicalState {
  Index q = 0;
  Index bond_dim = 0;
  std::vector<DenseTensor> gamma;
  Vector lambda;

  /// Shapes, lambda descending and non-negative. Throws on violation.
  void validate() const;
};

struct CanonicalReport {
  double norm_defect = 0.0;   ///< |sum lambda^2 - 1|
  /// ||X - 1||_F with X the one-leg-open contraction. The Frobenius norm keeps
  /// the defect invariant under orthogonal rotations of the bond basis.
  double ortho_defect = 0.0;
  bool pass = false;
};

/// Checks the canonical normalization conditions:
///   sum_a lambda_a^2 = 1,
///   sum_s sum_{a_1..a_{q-1}} Gamma^s[a_1.., m'] lambda^2_{a_1}..lambda^2_{a_{q-1}} Gamma^s[a_1.., m]
///     = delta_{m m'}.
/// For fully symmetric Gamma the choice of open leg does not matter.
CanonicalReport verify_canonical(const CanonicalState& cs, double tol);

// Same layout as the ITTNState snapshot with magic "bethe-canonical",
// followed by a "lambda" line and D values.
void write_canonical(std::ostream& out, const CanonicalState& cs);
CanonicalState read_canonical(std::istream& in);
CanonicalState load_canonical(const std::filesystem::path& path);
void save_canonical(const std::filesystem::path& path, const CanonicalState& cs);

}  // namespace bethe
