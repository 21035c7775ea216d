#include <gtest/gtest.h>

#include <cmath>

#include "bethe/environment.hpp"
#include "bethe/oracle.hpp"
#include "support/generators.hpp"

namespace bethe {
namespace {

constexpr double kTight = 1e-14;

Environment tight_environment(const ITTNState& s) {
  EnvironmentOptions opt;
  opt.tol = kTight;
  return leading_environment(s, opt);
}

// Staged contraction against the explicit doubled-layer tensor on random
// symmetric states.
TEST(Environment, StagedMatchesDenseOracle) {
  for (std::uint64_t c = 0; c < 12; ++c) {
    testing::Generator g(500 + c);
    const Index q = g.pick(3, 4);
    const Index D = g.pick(2, 3);
    const ITTNState s = g.symmetric_state(q, D);
    const Environment env = tight_environment(s);
    const auto dense = oracle::dense_leading_environment(s, kTight, 200000);

    Matrix r_dense(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (Index a = 0; a < D; ++a) {
      for (Index b = 0; b < D; ++b) {
        r_dense(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            dense.r(static_cast<Eigen::Index>(a * D + b));
      }
    }
    EXPECT_LT((env.R - r_dense).cwiseAbs().maxCoeff(), 1e-12) << "case " << c;
    EXPECT_NEAR(env.lambda1, dense.scale, 1e-12 * dense.scale) << "case " << c;
    for (const Matrix& op : {pauli::x(), pauli::z()}) {
      EXPECT_NEAR(expect_site(s, env, op), oracle::dense_expect_site(s, dense, op), 1e-12);
    }
    EXPECT_NEAR(expect_bond(s, env, pauli::x(), pauli::x()),
                oracle::dense_expect_bond(s, dense, pauli::x(), pauli::x()), 1e-12);
    EXPECT_NEAR(correlation_spectrum(s, env).lambda2, oracle::dense_lambda2_ratio(s, dense), 1e-12);
  }
}

TEST(Environment, AndersonMixingReachesTheSameFixedPoint) {
  for (std::uint64_t c = 0; c < 6; ++c) {
    const ITTNState s = random_symmetric_state(3, 3, 900 + c);
    EnvironmentOptions plain, mixed;
    plain.tol = mixed.tol = kTight;
    mixed.anderson_depth = 6;
    const Environment a = leading_environment(s, plain);
    const Environment b = leading_environment(s, mixed);
    EXPECT_LT((a.R - b.R).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.lambda1, b.lambda1, 1e-12 * a.lambda1);
  }
}

TEST(Environment, FixedPointSatisfiesTheRecursion) {
  const ITTNState s = random_symmetric_state(4, 3, 3);
  const Environment env = tight_environment(s);
  const Matrix f = environment_map(s, env.R);
  EXPECT_LT((f - env.lambda1 * env.R).cwiseAbs().maxCoeff(), 1e-12 * env.lambda1);
  EXPECT_NEAR(env.R.norm(), 1.0, 1e-14);
  const EnvironmentHealth health = environment_health(env);
  EXPECT_LT(health.asymmetry, 1e-15);
  EXPECT_TRUE(health.positive_semidefinite());
}

TEST(Environment, ProductStateIsTrivial) {
  const ITTNState s = init_product(3, 0.4);
  const Environment env = leading_environment(s);
  EXPECT_NEAR(env.R(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(expect_bond(s, env, pauli::x(), pauli::x()), std::pow(std::sin(0.4), 2), 1e-14);
  const CorrelationSpectrum cs = correlation_spectrum(s, env);
  EXPECT_DOUBLE_EQ(cs.lambda2, 0.0);
  EXPECT_DOUBLE_EQ(cs.xi, 0.0);
}

// A^s = a_s w o w o w makes the doubled-layer tensor rank one, so the fixed
// point is R = w w^T / |w|^2 from any generic seed.
TEST(Environment, RankOneTransferTensorHasOuterProductFixedPoint) {
  testing::Generator g(31);
  const Vector w = g.vector(3);
  const ITTNState s(3, 3, {0.8 * outer({w, w, w}), 0.6 * outer({w, w, w})});
  const Matrix expected = w * w.transpose() / w.squaredNorm();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    EnvironmentOptions opt;
    opt.seed = random_psd_seed(3, seed);
    const Environment env = leading_environment(s, opt);
    EXPECT_LT((env.R - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Environment, RandomSeedsConverge) {
  const ITTNState s = random_symmetric_state(3, 3, 12);
  const Environment ref = tight_environment(s);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EnvironmentOptions opt;
    opt.tol = kTight;
    opt.seed = random_psd_seed(3, seed);
    const Environment env = leading_environment(s, opt);
    EXPECT_LT((env.R - ref.R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Environment, ReportsNonConvergenceWithLastIterate) {
  const ITTNState s = random_symmetric_state(3, 3, 5);
  EnvironmentOptions opt;
  opt.tol = 1e-300;
  opt.max_iter = 3;
  try {
    leading_environment(s, opt);
    FAIL() << "expected EnvironmentConvergenceError";
  } catch (const EnvironmentConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().iterations, 3u);
    EXPECT_EQ(e.last_iterate().R.rows(), 3);
  }
}

TEST(Environment, RejectsBadInput) {
  const ITTNState s = random_symmetric_state(3, 2, 5);
  EnvironmentOptions opt;
  opt.seed = Matrix::Identity(3, 3);
  EXPECT_THROW(leading_environment(s, opt), DimensionError);
  opt.seed = Matrix::Zero(2, 2);
  EXPECT_THROW(leading_environment(s, opt), InvalidArgument);
  const Environment env = leading_environment(s);
  EXPECT_THROW(expect_site(s, env, Matrix::Identity(3, 3)), DimensionError);
}

}  // namespace
}  // namespace bethe
