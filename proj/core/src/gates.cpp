#include "bethe/gates.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "bethe/environment.hpp"

namespace bethe {

namespace {

Vector twist(const Vector& a) {
  Vector t = a;
  t(1) = -t(1);
  return t;
}

Matrix kron_chain(const std::vector<Matrix>& factors) {
  Matrix acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    acc = Eigen::kroneckerProduct(acc, factors[i]).eval();
  }
  return acc;
}

// Single-site operator `op` acting on `site` of an N-site chain.
Matrix embed(const Matrix& op, Index site, Index N) {
  std::vector<Matrix> f(N, pauli::identity());
  f[site] = op;
  return kron_chain(f);
}

void require_chain(Index N) {
  if (N < kMinOracleChain || N > kMaxOracleChain) {
    throw InvalidArgument("chain length " + std::to_string(N) + " outside [" +
                          std::to_string(kMinOracleChain) + ", " +
                          std::to_string(kMaxOracleChain) + "]");
  }
}

void require_oracle_params(double J, double h, double dt) {
  if (dt < 0.0 || J * dt < 0.0 || h < 0.0) {
    throw InvalidArgument("MPO check needs dt >= 0, J dt >= 0 and h >= 0");
  }
}

Matrix mpo_matrix(double eps, int k) {
  Matrix c = Matrix::Zero(2, 2);
  if (k == 0) {
    c(0, 0) = std::cosh(eps);
    c(1, 1) = std::sinh(eps);
  } else {
    c(0, 1) = c(1, 0) = std::sqrt(std::cosh(eps) * std::sinh(eps));
  }
  return c;
}

}  // namespace

GateSet build_gate_set(double J, double h, double dt, Index q, Coupling coupling) {
  if (coupling != Coupling::XX) {
    throw InvalidArgument("only the sigma_x sigma_x coupling is implemented");
  }
  if (!(dt > 0.0) || !(J * dt > 0.0)) {
    throw InvalidArgument("J*dt must be positive: antiferromagnetic or negative step unsupported");
  }
  if (h < 0.0) throw InvalidArgument("transverse field must be non-negative");
  if (q < 2) throw InvalidArgument("coordination number must be at least 2");

  GateSet g;
  g.J = J;
  g.h = h;
  g.dt = dt;
  g.q = q;
  const double eps = J * dt;
  const double delta = h * dt / 2.0;
  g.v = Vector(2);
  g.v << std::sqrt(std::cosh(eps)), std::sqrt(std::sinh(eps));
  g.u = Vector(2);
  g.u << std::exp(delta), std::exp(-delta);
  g.v_tilde = twist(g.v);
  g.u_tilde = twist(g.u);
  g.C0 = mpo_matrix(eps, 0);
  g.C1 = mpo_matrix(eps, 1);

  g.Q = DenseTensor(std::vector<Index>(q + 2, 2));
  std::vector<Index> idx(q + 2);
  for (Index flat = 0; flat < g.Q.size(); ++flat) {
    g.Q.unravel(flat, idx);
    Index parity = 0;
    for (Index k : idx) parity += k;
    if (parity % 2 != 0) continue;
    double value = g.u(static_cast<Eigen::Index>(idx[0])) * g.u(static_cast<Eigen::Index>(idx[1]));
    for (Index k = 2; k < q + 2; ++k) value *= g.v(static_cast<Eigen::Index>(idx[k]));
    g.Q[flat] = value;
  }
  return g;
}

DenseTensor rank_two_transfer_tensor(const GateSet& gates) {
  std::vector<Vector> plain{gates.u, gates.u};
  std::vector<Vector> twisted{gates.u_tilde, gates.u_tilde};
  for (Index k = 0; k < gates.q; ++k) {
    plain.push_back(gates.v);
    twisted.push_back(gates.v_tilde);
  }
  DenseTensor q = outer(plain) + outer(twisted);
  q *= 0.5;
  return q;
}

Matrix mpo_chain_operator(double J, double h, double dt, Index N) {
  require_chain(N);
  require_oracle_params(J, h, dt);
  const double eps = J * dt;
  const double delta = h * dt / 2.0;
  const Matrix c[2] = {mpo_matrix(eps, 0), mpo_matrix(eps, 1)};

  Matrix half_field = Matrix::Zero(2, 2);
  half_field(0, 0) = std::exp(delta);
  half_field(1, 1) = std::exp(-delta);
  const Matrix x[2] = {half_field * half_field, half_field * pauli::x() * half_field};

  const auto dim = static_cast<Eigen::Index>(1) << N;
  Matrix total = Matrix::Zero(dim, dim);
  std::vector<Matrix> factors(N);
  for (Index mask = 0; mask < (Index{1} << N); ++mask) {
    Matrix chain = Matrix::Identity(2, 2);
    for (Index i = 0; i < N; ++i) {
      const int k = static_cast<int>((mask >> (N - 1 - i)) & 1U);
      chain = chain * c[k];
      factors[i] = x[k];
    }
    const double weight = chain.trace();
    if (weight != 0.0) total += weight * kron_chain(factors);
  }
  return total;
}

Matrix exact_split_propagator(double J, double h, double dt, Index N) {
  require_chain(N);
  require_oracle_params(J, h, dt);
  const auto dim = static_cast<Eigen::Index>(1) << N;
  Matrix sz = Matrix::Zero(dim, dim);
  Matrix sxx = Matrix::Zero(dim, dim);
  for (Index i = 0; i < N; ++i) {
    sz += embed(pauli::z(), i, N);
    sxx += embed(pauli::x(), i, N) * embed(pauli::x(), (i + 1) % N, N);
  }
  const Matrix field = (0.5 * dt * h * sz).exp();
  const Matrix coupling = (dt * J * sxx).exp();
  return field * coupling * field;
}

double mpo_oracle_check(double J, double h, double dt, Index N) {
  return (mpo_chain_operator(J, h, dt, N) - exact_split_propagator(J, h, dt, N))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace bethe
