#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bethe/state.hpp"
#include "bethe/tensor.hpp"

namespace bethe {

/// Fixed point of the branch recursion of an ITTNState.
///
/// R[a, b] is the contraction of an infinite branch hanging off one bond,
/// with the bra (top layer) bond index a and the ket (bottom layer) index b
/// left open. It satisfies f(R) = lambda1 * R, where f closes q - 1 legs of
/// sum_s A^s (x) A^s with copies of R.
struct Environment {
  Matrix R;                  ///< D x D, symmetric, unit Frobenius norm
  double lambda1 = 0.0;      ///< ||f(R)||_F for the normalized R
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;     ///< ||R_n - R_{n-1}||_F at the last iteration

  Index bond_dim() const noexcept { return static_cast<Index>(R.rows()); }
};

struct EnvironmentOptions {
  double tol = 1e-12;
  std::size_t max_iter = 10000;
  /// Initial iterate; identity / ||identity|| when empty. Must be D x D.
  std::optional<Matrix> seed;
  /// History length for Anderson mixing of the power iterates; 0 runs the
  /// plain power method. Mixing changes the path, not the fixed point or the
  /// stopping rule.
  std::size_t anderson_depth = 0;
};

class EnvironmentConvergenceError : public ConvergenceError {
 public:
  EnvironmentConvergenceError(const std::string& what, Environment last, bool stalled)
      : ConvergenceError(what, last.iterations, last.residual),
        last_(std::move(last)),
        stalled_(stalled) {}

  const Environment& last_iterate() const noexcept { return last_; }
  /// True when the residual stopped decreasing (oscillation or a degenerate
  /// leading eigenvalue) rather than just decreasing slowly.
  bool stalled() const noexcept { return stalled_; }

 private:
  Environment last_;
  bool stalled_;
};

/// One unnormalized application of the recursion,
///   f(R)[c, c'] = sum_s sum A^s[a_1..a_{q-1}, c] A^s[b_1..b_{q-1}, c'] prod_k R[a_k, b_k],
/// evaluated by closing one leg at a time, O(d q D^{q+1}) arithmetic.
Matrix environment_map(const ITTNState& state, const Matrix& R);

/// Generalized power iteration R <- f(R) / ||f(R)||_F until successive
/// iterates differ by less than options.tol. Iterates are symmetrized and
/// sign-fixed (largest-magnitude entry positive).
/// Throws EnvironmentConvergenceError after options.max_iter iterations.
Environment leading_environment(const ITTNState& state, const EnvironmentOptions& options = {});

/// Seeded random symmetric positive-definite D x D matrix with unit norm.
Matrix random_psd_seed(Index bond_dim, std::uint64_t seed);

/// <O> on a single site: every leg of the site closed with R, normalized by
/// the identity insertion.
double expect_site(const ITTNState& state, const Environment& env, const Matrix& op);

/// <O1_i O2_j> for nearest neighbours i ~ j.
double expect_bond(const ITTNState& state, const Environment& env, const Matrix& op1,
                   const Matrix& op2);

/// Largest bond dimension accepted by correlation_spectrum (the transfer
/// matrix is D^2 x D^2 and diagonalized densely).
inline constexpr Index kMaxSpectrumBondDim = 64;

struct CorrelationSpectrum {
  double lambda1 = 1.0;       ///< normalized leading eigenvalue (always 1)
  double lambda2 = 0.0;       ///< |second eigenvalue| / |leading eigenvalue|
  double xi = 0.0;            ///< -1 / ln(lambda2), 0 when lambda2 == 0
  double raw_lambda1 = 0.0;   ///< leading eigenvalue before normalization
};

/// Transfer matrix along a tree path: q - 2 legs of sum_s A^s (x) A^s closed
/// with R, the remaining two doubled legs form the D^2 x D^2 matrix M with
/// row index (c, c') and column index (b, b') flattened row-major.
Matrix path_transfer_matrix(const ITTNState& state, const Environment& env);

/// Two largest-magnitude eigenvalues of path_transfer_matrix and the
/// correlation length in units of tree edges.
CorrelationSpectrum correlation_spectrum(const ITTNState& state, const Environment& env);

struct EnvironmentHealth {
  double asymmetry = 0.0;     ///< max |R - R^T|
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;

  /// min eigenvalue >= -rel_tol * max eigenvalue.
  bool positive_semidefinite(double rel_tol = 1e-10) const noexcept {
    return min_eigenvalue >= -rel_tol * max_eigenvalue;
  }
};

EnvironmentHealth environment_health(const Environment& env);

namespace pauli {
Matrix identity();
Matrix x();
Matrix z();
}  // namespace pauli

}  // namespace bethe
