#pragma once

// Brute-force reference implementations. Every routine here materializes the
// full doubled-layer tensor or the full Hilbert-space operator and is only
// meant for tiny instances in tests and `bethe selftest`.

#include <cstddef>

#include "bethe/state.hpp"
#include "bethe/tensor.hpp"

namespace bethe::oracle {

/// E[(a_1 b_1), .., (a_q b_q)] = sum_s A^s[a] A^s[b], each mode of size D^2
/// with the doubled index flattened as a * D + b.
DenseTensor dense_transfer_tensor(const ITTNState& state);

/// E_O with sum_{s s'} O(s, s') A^s (x) A^{s'}.
DenseTensor dense_transfer_tensor(const ITTNState& state, const Matrix& op);

struct DenseEnvironment {
  Vector r;  ///< length D^2, unit norm, largest-magnitude entry positive
  double scale = 0.0;
  std::size_t iterations = 0;
};

/// r <- E x_1 r x_2 r .. x_{q-1} r, normalized, by explicit loops over E.
DenseEnvironment dense_leading_environment(const ITTNState& state, double tol,
                                           std::size_t max_iter);

/// <r|E_O|r..r> / <r|E|r..r>.
double dense_expect_site(const ITTNState& state, const DenseEnvironment& env, const Matrix& op);

/// Two transfer tensors joined on one doubled bond, all other legs closed with r.
double dense_expect_bond(const ITTNState& state, const DenseEnvironment& env, const Matrix& op1,
                         const Matrix& op2);

/// E with its first q - 2 modes closed by r, as a D^2 x D^2 matrix.
Matrix dense_path_matrix(const ITTNState& state, const DenseEnvironment& env);

/// |lambda_2| / |lambda_1| of dense_path_matrix.
double dense_lambda2_ratio(const ITTNState& state, const DenseEnvironment& env);

/// Product-state energy per site on the tree,
/// E(theta) = -(q/2) J sin^2(theta) - h cos(theta).
double product_state_energy(Index q, double J, double h, double theta);

/// <sigma_x> = sin(theta*) at the minimizer of product_state_energy over
/// theta in [0, pi/2], by grid scan followed by golden-section refinement.
double product_state_mx(Index q, double J, double h);

}  // namespace bethe::oracle
