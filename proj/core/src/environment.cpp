#include "bethe/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

namespace bethe {

namespace {

Index ipow(Index base, Index exp) {
  Index r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

void require_env_matches(const ITTNState& state, const Environment& env) {
  if (env.bond_dim() != state.bond_dim() || env.R.cols() != env.R.rows()) {
    throw DimensionError("environment is " + std::to_string(env.R.rows()) + "x" +
                         std::to_string(env.R.cols()) + " but the state has bond dimension " +
                         std::to_string(state.bond_dim()));
  }
  if (!env.converged) {
    throw InvalidArgument("environment has not converged");
  }
}

void require_operator(const Matrix& op) {
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("local operator must be 2x2");
}

// Closes modes [0, count) of `a` with R: the top-layer index a_k is summed
// against R[a_k, b_k], leaving the bottom-layer index b_k in its place.
DenseTensor close_legs(const DenseTensor& a, const Matrix& R, Index count) {
  const Matrix Rt = R.transpose();
  DenseTensor cur = a;
  for (Index k = 0; k < count; ++k) cur = mode_mul_matrix(cur, k, Rt);
  return cur;
}

Eigen::Map<const RowMatrix> as_matrix(const DenseTensor& t, Index rows, Index cols) {
  return Eigen::Map<const RowMatrix>(t.data(), static_cast<Eigen::Index>(rows),
                                     static_cast<Eigen::Index>(cols));
}

// Per-spin branch tensors with q - 1 legs closed, each viewed as a
// D^{q-1} x D matrix (open top leg last).
std::vector<DenseTensor> closed_branches(const ITTNState& state, const Matrix& R) {
  std::vector<DenseTensor> out;
  out.reserve(state.phys_dim());
  for (const auto& a : state.tensors()) out.push_back(close_legs(a, R, state.q() - 1));
  return out;
}

// F^{ss'} = sum over q-1 closed legs of A^s (top) and A^{s'} (bottom):
// a D x D matrix indexed by the open top and bottom legs.
Matrix site_matrix(const ITTNState& state, const std::vector<DenseTensor>& branches, Index s,
                   Index sp) {
  const Index D = state.bond_dim();
  const Index rows = ipow(D, state.q() - 1);
  return as_matrix(branches[s], rows, D).transpose() * as_matrix(state.tensor(sp), rows, D);
}

Matrix weighted_site_matrix(const ITTNState& state, const std::vector<DenseTensor>& branches,
                            const Matrix& op) {
  const Index D = state.bond_dim();
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (Index s = 0; s < state.phys_dim(); ++s) {
    for (Index sp = 0; sp < state.phys_dim(); ++sp) {
      const double w = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(sp));
      if (w != 0.0) g += w * site_matrix(state, branches, s, sp);
    }
  }
  return g;
}

void fix_sign(Matrix& m) {
  Eigen::Index r = 0, c = 0;
  m.cwiseAbs().maxCoeff(&r, &c);
  if (m(r, c) < 0.0) m = -m;
}

}  // namespace

Matrix environment_map(const ITTNState& state, const Matrix& R) {
  const Index D = state.bond_dim();
  if (static_cast<Index>(R.rows()) != D || static_cast<Index>(R.cols()) != D) {
    throw DimensionError("environment iterate must be " + std::to_string(D) + "x" +
                         std::to_string(D));
  }
  // Each pass closes the leading mode and appends the bottom index at the
  // back, so every leg costs one (D^{q-1} x D) x (D x D) product. After q - 1
  // passes the buffer holds (c, b_1 .. b_{q-1}), which is then contracted
  // with A^s viewed as (b_1 .. b_{q-1}) x c'.
  const auto d = static_cast<Eigen::Index>(D);
  const auto rows = static_cast<Eigen::Index>(ipow(D, state.q() - 1));
  std::vector<double> front(static_cast<std::size_t>(rows * d));
  std::vector<double> back(front.size());
  Matrix out = Matrix::Zero(d, d);
  for (const auto& a : state.tensors()) {
    const double* src = a.data();
    for (Index k = 0; k + 1 < state.q(); ++k) {
      Eigen::Map<RowMatrix>(front.data(), rows, d).noalias() =
          Eigen::Map<const RowMatrix>(src, d, rows).transpose() * R;
      std::swap(front, back);
      src = back.data();
    }
    out.noalias() += Eigen::Map<const RowMatrix>(src, d, rows) * as_matrix(a, rows, D);
  }
  return out;
}

Matrix random_psd_seed(Index bond_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(bond_dim);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Matrix psd = g * g.transpose() + Matrix::Identity(n, n);
  return psd / psd.norm();
}

namespace {

// One power step: f(R), symmetrized, normalized and sign-fixed.
Matrix power_step(const ITTNState& state, const Matrix& R, double& scale) {
  Matrix next = environment_map(state, R);
  next = 0.5 * (next + next.transpose()).eval();
  scale = next.norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("environment recursion collapsed to zero (scale " +
                          std::to_string(scale) + ")");
  }
  next /= scale;
  fix_sign(next);
  return next;
}

Eigen::Map<const Vector> flat(const Matrix& m) { return {m.data(), m.size()}; }

// Anderson mixing over the last `depth` power steps.
class AndersonMixer {
 public:
  explicit AndersonMixer(std::size_t depth) : depth_(depth) {}

  void reset() {
    df_.clear();
    dg_.clear();
    has_previous_ = false;
  }

  // Given iterate x and its power step g, returns the next iterate.
  Matrix next(const Matrix& x, const Matrix& g) {
    const Vector f = flat(g) - flat(x);
    if (has_previous_) {
      df_.push_back(f - f_prev_);
      dg_.push_back(flat(g) - g_prev_);
      if (df_.size() > depth_) {
        df_.erase(df_.begin());
        dg_.erase(dg_.begin());
      }
    }
    f_prev_ = f;
    g_prev_ = flat(g);
    has_previous_ = true;
    if (df_.empty()) return g;

    const auto m = static_cast<Eigen::Index>(df_.size());
    Matrix dF(f.size(), m), dG(f.size(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      dF.col(j) = df_[static_cast<std::size_t>(j)];
      dG.col(j) = dg_[static_cast<std::size_t>(j)];
    }
    const Vector gamma = dF.colPivHouseholderQr().solve(f);
    if (!gamma.allFinite()) {
      reset();
      return g;
    }
    Vector mixed = flat(g) - dG * gamma;
    Matrix out = Eigen::Map<const Matrix>(mixed.data(), g.rows(), g.cols());
    out = 0.5 * (out + out.transpose()).eval();
    const double n = out.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      reset();
      return g;
    }
    out /= n;
    fix_sign(out);
    return out;
  }

 private:
  std::size_t depth_;
  std::vector<Vector> df_, dg_;
  Vector f_prev_, g_prev_;
  bool has_previous_ = false;
};

}  // namespace

Environment leading_environment(const ITTNState& state, const EnvironmentOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("environment tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(state.bond_dim());

  Matrix x;
  if (options.seed) {
    if (options.seed->rows() != n || options.seed->cols() != n) {
      throw DimensionError("environment seed has the wrong shape");
    }
    x = *options.seed;
  } else {
    x = Matrix::Identity(n, n);
  }
  const double seed_norm = x.norm();
  if (seed_norm == 0.0) throw InvalidArgument("environment seed is zero");
  x /= seed_norm;

  Environment env;
  AndersonMixer mixer(options.anderson_depth);
  // Best residual seen so far and when; used to tell slow convergence from a stall.
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    double scale = 0.0;
    Matrix g = power_step(state, x, scale);
    env.residual = (g - x).norm();
    env.lambda1 = scale;
    env.iterations = it;
    if (env.residual < options.tol) {
      env.R = std::move(g);
      env.converged = true;
      return env;
    }
    if (env.residual < best) {
      best = env.residual;
      best_at = it;
    }
    if (options.anderson_depth == 0) {
      x = g;
    } else {
      // Restart the history when mixing has drifted far from the best iterate.
      if (env.residual > 1e3 * best) mixer.reset();
      x = mixer.next(x, g);
    }
    env.R = std::move(g);
  }
  const bool stalled = best_at + options.max_iter / 10 < options.max_iter;
  throw EnvironmentConvergenceError(
      "environment did not converge in " + std::to_string(options.max_iter) +
          " iterations (residual " + std::to_string(env.residual) +
          (stalled ? ", stalled" : "") + ")",
      std::move(env), stalled);
}

double expect_site(const ITTNState& state, const Environment& env, const Matrix& op) {
  require_env_matches(state, env);
  require_operator(op);
  const auto branches = closed_branches(state, env.R);
  const double num = weighted_site_matrix(state, branches, op).cwiseProduct(env.R).sum();
  const double den = weighted_site_matrix(state, branches, pauli::identity()).cwiseProduct(env.R).sum();
  return num / den;
}

double expect_bond(const ITTNState& state, const Environment& env, const Matrix& op1,
                   const Matrix& op2) {
  require_env_matches(state, env);
  require_operator(op1);
  require_operator(op2);
  const auto branches = closed_branches(state, env.R);
  const Matrix g1 = weighted_site_matrix(state, branches, op1);
  const Matrix g2 = weighted_site_matrix(state, branches, op2);
  const Matrix g0 = weighted_site_matrix(state, branches, pauli::identity());
  return g1.cwiseProduct(g2).sum() / g0.cwiseProduct(g0).sum();
}

Matrix path_transfer_matrix(const ITTNState& state, const Environment& env) {
  require_env_matches(state, env);
  const Index D = state.bond_dim();
  if (D > kMaxSpectrumBondDim) {
    throw InvalidArgument("path transfer matrix limited to D <= " +
                          std::to_string(kMaxSpectrumBondDim));
  }
  const Index closed = state.q() - 2;
  const Index rows = ipow(D, closed);
  const auto dd = static_cast<Eigen::Index>(D * D);

  // tmp[(b, c), (b', c')]: open legs b, c on top and b', c' on the bottom.
  Matrix tmp = Matrix::Zero(dd, dd);
  for (const auto& a : state.tensors()) {
    const DenseTensor c = close_legs(a, env.R, closed);
    tmp.noalias() += as_matrix(c, rows, D * D).transpose() * as_matrix(a, rows, D * D);
  }
  Matrix m(dd, dd);
  for (Index b = 0; b < D; ++b) {
    for (Index c = 0; c < D; ++c) {
      for (Index bp = 0; bp < D; ++bp) {
        for (Index cp = 0; cp < D; ++cp) {
          m(static_cast<Eigen::Index>(c * D + cp), static_cast<Eigen::Index>(b * D + bp)) =
              tmp(static_cast<Eigen::Index>(b * D + c), static_cast<Eigen::Index>(bp * D + cp));
        }
      }
    }
  }
  return m;
}

CorrelationSpectrum correlation_spectrum(const ITTNState& state, const Environment& env) {
  const Matrix m = path_transfer_matrix(state, env);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  std::vector<double> mags(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());

  CorrelationSpectrum out;
  out.raw_lambda1 = mags.front();
  if (out.raw_lambda1 == 0.0) throw InvalidArgument("path transfer matrix vanishes");
  out.lambda2 = mags.size() > 1 ? mags[1] / mags[0] : 0.0;
  if (out.lambda2 <= 0.0) {
    out.xi = 0.0;
  } else if (out.lambda2 >= 1.0) {
    out.xi = std::numeric_limits<double>::infinity();
  } else {
    out.xi = -1.0 / std::log(out.lambda2);
  }
  return out;
}

EnvironmentHealth environment_health(const Environment& env) {
  EnvironmentHealth h;
  h.asymmetry = (env.R - env.R.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (env.R + env.R.transpose()),
                                           Eigen::EigenvaluesOnly);
  h.min_eigenvalue = es.eigenvalues().minCoeff();
  h.max_eigenvalue = es.eigenvalues().maxCoeff();
  return h;
}

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

}  // namespace bethe
