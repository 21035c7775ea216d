#pragma once

#include "bethe/tensor.hpp"

namespace bethe {

/// Axis of the nearest-neighbour coupling. Only XX is implemented; YY and ZZ
/// follow from the same construction after a basis rotation of the coupling
/// axis and are reserved here so callers can name them.
enum class Coupling { XX, YY, ZZ };

/// One second-order Trotter step exp(dt/2 h Sz) exp(dt J Sxx) exp(dt/2 h Sz)
/// of H = -J sum_{i~j} sx_i sx_j - h sum_i sz_i, written as a site-local
/// transfer tensor on a tree with coordination number q.
struct GateSet {
  double J = 0.0;
  double h = 0.0;
  double dt = 0.0;
  Index q = 0;

  Vector v;        ///< (sqrt(cosh(J dt)), sqrt(sinh(J dt)))
  Vector u;        ///< (exp(h dt / 2), exp(-h dt / 2))
  Vector v_tilde;  ///< sigma_z v
  Vector u_tilde;  ///< sigma_z u

  /// Order q + 2: Q[s', s, a_1, .., a_q] = v_{a_1}..v_{a_q} u_s u_{s'} when
  /// s + s' + sum a_k is even, 0 otherwise.
  DenseTensor Q;

  /// 1D MPO matrices at epsilon = J dt: C0 = diag(cosh, sinh),
  /// C1 = offdiag(sqrt(cosh sinh)).
  Matrix C0;
  Matrix C1;
};

/// Requires J dt > 0, h >= 0, dt > 0, q >= 2.
GateSet build_gate_set(double J, double h, double dt, Index q, Coupling coupling = Coupling::XX);

/// 1/2 (u o u o v o .. o v + u~ o u~ o v~ o .. o v~), equal to Q entrywise.
DenseTensor rank_two_transfer_tensor(const GateSet& gates);

/// Smallest and largest periodic chain handled by the dense MPO check.
inline constexpr Index kMinOracleChain = 2;
inline constexpr Index kMaxOracleChain = 6;

/// sum_k Tr(C^{k_1} .. C^{k_N}) X^{k_1} (x) .. (x) X^{k_N} on a periodic chain
/// of N sites, with X^k = exp(delta sz) sx^k exp(delta sz), delta = h dt / 2.
/// Site 0 is the most significant tensor factor. Accepts dt = 0.
Matrix mpo_chain_operator(double J, double h, double dt, Index N);

/// exp(dt/2 h Sz) exp(dt J Sxx) exp(dt/2 h Sz) on the same periodic chain,
/// with Sxx = sum_i sx_i sx_{i+1 mod N}, built by dense matrix exponentiation.
Matrix exact_split_propagator(double J, double h, double dt, Index N);

/// max |mpo_chain_operator - exact_split_propagator|.
double mpo_oracle_check(double J, double h, double dt, Index N);

}  // namespace bethe
