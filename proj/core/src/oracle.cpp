#include "bethe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bethe/environment.hpp"

namespace bethe::oracle {

namespace {

// Sum over the first `closed` modes of E against r, leaving the trailing
// modes open; the result is flattened row-major over the open modes.
std::vector<double> close_with(const DenseTensor& e, const Vector& r, Index closed) {
  const Index n = e.order();
  const Index dd = e.dims()[0];
  Index open = 1;
  for (Index k = closed; k < n; ++k) open *= dd;
  std::vector<double> out(open, 0.0);
  std::vector<Index> idx(n);
  for (Index flat = 0; flat < e.size(); ++flat) {
    e.unravel(flat, idx);
    double w = e[flat];
    for (Index k = 0; k < closed; ++k) w *= r(static_cast<Eigen::Index>(idx[k]));
    Index tail = 0;
    for (Index k = closed; k < n; ++k) tail = tail * dd + idx[k];
    out[tail] += w;
  }
  return out;
}

}  // namespace

DenseTensor dense_transfer_tensor(const ITTNState& state) {
  return dense_transfer_tensor(state, pauli::identity());
}

DenseTensor dense_transfer_tensor(const ITTNState& state, const Matrix& op) {
  const Index q = state.q();
  const Index D = state.bond_dim();
  DenseTensor e = DenseTensor::cube(q, D * D);
  std::vector<Index> idx(q), top(q), bottom(q);
  for (Index flat = 0; flat < e.size(); ++flat) {
    e.unravel(flat, idx);
    for (Index k = 0; k < q; ++k) {
      top[k] = idx[k] / D;
      bottom[k] = idx[k] % D;
    }
    double v = 0.0;
    for (Index s = 0; s < state.phys_dim(); ++s) {
      for (Index sp = 0; sp < state.phys_dim(); ++sp) {
        const double w = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(sp));
        if (w != 0.0) v += w * state.tensor(s)(top) * state.tensor(sp)(bottom);
      }
    }
    e[flat] = v;
  }
  return e;
}

DenseEnvironment dense_leading_environment(const ITTNState& state, double tol,
                                           std::size_t max_iter) {
  const DenseTensor e = dense_transfer_tensor(state);
  const Index D = state.bond_dim();
  DenseEnvironment env;
  env.r = Vector::Zero(static_cast<Eigen::Index>(D * D));
  for (Index a = 0; a < D; ++a) env.r(static_cast<Eigen::Index>(a * D + a)) = 1.0;
  env.r.normalize();

  for (env.iterations = 1; env.iterations <= max_iter; ++env.iterations) {
    const auto raw = close_with(e, env.r, state.q() - 1);
    Vector next = Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size()));
    env.scale = next.norm();
    next /= env.scale;
    Eigen::Index at = 0;
    next.cwiseAbs().maxCoeff(&at);
    if (next(at) < 0.0) next = -next;
    const double change = (next - env.r).norm();
    env.r = next;
    if (change < tol) return env;
  }
  throw ConvergenceError("dense environment did not converge", max_iter, 0.0);
}

double dense_expect_site(const ITTNState& state, const DenseEnvironment& env, const Matrix& op) {
  const auto num = close_with(dense_transfer_tensor(state, op), env.r, state.q());
  const auto den = close_with(dense_transfer_tensor(state), env.r, state.q());
  return num[0] / den[0];
}

double dense_expect_bond(const ITTNState& state, const DenseEnvironment& env, const Matrix& op1,
                         const Matrix& op2) {
  const Index q = state.q();
  const auto v1 = close_with(dense_transfer_tensor(state, op1), env.r, q - 1);
  const auto v2 = close_with(dense_transfer_tensor(state, op2), env.r, q - 1);
  const auto v0 = close_with(dense_transfer_tensor(state), env.r, q - 1);
  double num = 0.0, den = 0.0;
  for (Index c = 0; c < v0.size(); ++c) {
    num += v1[c] * v2[c];
    den += v0[c] * v0[c];
  }
  return num / den;
}

Matrix dense_path_matrix(const ITTNState& state, const DenseEnvironment& env) {
  const auto reduced = close_with(dense_transfer_tensor(state), env.r, state.q() - 2);
  const Index dd = state.bond_dim() * state.bond_dim();
  Matrix m(static_cast<Eigen::Index>(dd), static_cast<Eigen::Index>(dd));
  for (Index b = 0; b < dd; ++b) {
    for (Index c = 0; c < dd; ++c) {
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b)) = reduced[b * dd + c];
    }
  }
  return m;
}

double dense_lambda2_ratio(const ITTNState& state, const DenseEnvironment& env) {
  const Matrix m = dense_path_matrix(state, env);
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags.size() > 1 ? mags[1] / mags[0] : 0.0;
}

double product_state_energy(Index q, double J, double h, double theta) {
  const double s = std::sin(theta);
  return -0.5 * static_cast<double>(q) * J * s * s - h * std::cos(theta);
}

double product_state_mx(Index q, double J, double h) {
  const double hi = std::numbers::pi / 2.0;
  constexpr int kGrid = 20000;
  int best = 0;
  double best_e = product_state_energy(q, J, h, 0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double e = product_state_energy(q, J, h, hi * i / kGrid);
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  double a = hi * std::max(0, best - 1) / kGrid;
  double b = hi * std::min(kGrid, best + 1) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (product_state_energy(q, J, h, c) < product_state_energy(q, J, h, d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::sin(0.5 * (a + b));
}

}  // namespace bethe::oracle
