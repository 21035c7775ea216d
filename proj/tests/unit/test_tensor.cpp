#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bethe/tensor.hpp"
#include "support/generators.hpp"

namespace bethe {
namespace {

using testing::Generator;
using testing::product;
using testing::unravel;

DenseTensor brute_mode_matrix(const DenseTensor& t, Index mode, const Matrix& m) {
  std::vector<Index> dims = t.dims();
  dims[mode] = static_cast<Index>(m.rows());
  DenseTensor out(dims);
  for (Index flat = 0; flat < out.size(); ++flat) {
    auto idx = unravel(flat, dims);
    double acc = 0.0;
    for (Index b = 0; b < t.dim(mode); ++b) {
      auto src = idx;
      src[mode] = b;
      acc += t(src) * m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(b));
    }
    out[flat] = acc;
  }
  return out;
}

TEST(DenseTensor, FlatIndexRoundTrip) {
  DenseTensor t({2, 3, 4});
  std::vector<Index> idx(3);
  for (Index flat = 0; flat < t.size(); ++flat) {
    t.unravel(flat, idx);
    EXPECT_EQ(t.flat_index(idx), flat);
  }
  EXPECT_EQ(t.flat_index(std::vector<Index>{1, 2, 3}), 1u * 12 + 2 * 4 + 3);
}

TEST(DenseTensor, RejectsBadShapes) {
  EXPECT_THROW(DenseTensor({2, 0}), DimensionError);
  EXPECT_THROW(DenseTensor({2, 2}, std::vector<double>(3)), DimensionError);
  DenseTensor a({2, 2}), b({2, 3});
  EXPECT_THROW(a += b, DimensionError);
  EXPECT_THROW(max_abs_difference(a, b), DimensionError);
}

TEST(ModeProducts, MatrixMatchesBruteForceOnRandomShapes) {
  for (std::uint64_t c = 0; c < 25; ++c) {
    Generator g(100 + c);
    const Index order = g.pick(1, 4);
    std::vector<Index> dims(order);
    for (auto& d : dims) d = g.pick(1, 4);
    const DenseTensor t = g.tensor(dims);
    const Index mode = g.pick(0, order - 1);
    const Matrix m = g.matrix(g.pick(1, 5), dims[mode]);
    EXPECT_LT(max_abs_difference(mode_mul_matrix(t, mode, m), brute_mode_matrix(t, mode, m)),
              1e-13)
        << "case " << c;
  }
}

TEST(ModeProducts, VectorRemovesTheMode) {
  Generator g(7);
  const DenseTensor t = g.tensor({3, 2, 4});
  const Vector v = g.vector(2);
  const DenseTensor r = mode_mul_vector(t, 1, v);
  ASSERT_EQ(r.dims(), (std::vector<Index>{3, 4}));
  for (Index a = 0; a < 3; ++a) {
    for (Index c = 0; c < 4; ++c) {
      EXPECT_NEAR(r({a, c}), t({a, 0, c}) * v(0) + t({a, 1, c}) * v(1), 1e-15);
    }
  }
  EXPECT_THROW(mode_mul_vector(t, 3, v), DimensionError);
  EXPECT_THROW(mode_mul_vector(t, 0, v), DimensionError);
}

TEST(ModeProducts, OrderOneVectorGivesScalar) {
  const DenseTensor t({3}, {1.0, 2.0, 3.0});
  const DenseTensor r = mode_mul_vector(t, 0, Vector::Ones(3));
  EXPECT_EQ(r.order(), 0u);
  EXPECT_DOUBLE_EQ(r[0], 6.0);
}

TEST(Outer, MatchesProductOfEntries) {
  Generator g(11);
  const Vector a = g.vector(2), b = g.vector(3), c = g.vector(2);
  const DenseTensor t = outer({a, b, c});
  for (Index flat = 0; flat < t.size(); ++flat) {
    auto i = unravel(flat, t.dims());
    EXPECT_DOUBLE_EQ(t[flat], a(static_cast<Eigen::Index>(i[0])) *
                                  b(static_cast<Eigen::Index>(i[1])) *
                                  c(static_cast<Eigen::Index>(i[2])));
  }
}

TEST(Outer, NormIsMultiplicative) {
  for (std::uint64_t c = 0; c < 10; ++c) {
    Generator g(20 + c);
    const Vector u = g.vector(g.pick(1, 4)), v = g.vector(g.pick(1, 4)), w = g.vector(g.pick(1, 4));
    EXPECT_NEAR(outer({u, v, w}).frobenius_norm(), u.norm() * v.norm() * w.norm(), 1e-14);
  }
}

TEST(Permute, MovesModes) {
  Generator g(3);
  const DenseTensor t = g.tensor({2, 3, 4});
  const std::vector<Index> perm{2, 0, 1};
  const DenseTensor p = permute(t, perm);
  EXPECT_EQ(p.dims(), (std::vector<Index>{3, 4, 2}));
  EXPECT_THROW(permute(t, std::vector<Index>{0, 0, 1}), DimensionError);
}

TEST(Symmetrize, IsIdempotentAndSymmetric) {
  for (std::uint64_t c = 0; c < 10; ++c) {
    Generator g(200 + c);
    const Index order = g.pick(2, 4);
    const Index dim = g.pick(1, 3);
    const DenseTensor t = g.tensor(std::vector<Index>(order, dim));
    const DenseTensor s = symmetrize(t);
    EXPECT_LT(symmetry_defect(s), 1e-15);
    EXPECT_LT(max_abs_difference(symmetrize(s), s), 1e-15);
  }
  EXPECT_EQ(all_permutations(3).size(), 6u);
  EXPECT_THROW(symmetrize(DenseTensor({2, 3})), DimensionError);
}

TEST(Symmetrize, PartialDefectSeesOnlyTheRange) {
  DenseTensor t({2, 2, 2});
  t({0, 0, 1}) = 1.0;  // symmetric in modes 0 and 1 only
  t({0, 1, 0}) = 0.0;
  EXPECT_EQ(symmetry_defect(t, 0, 2), 0.0);
  EXPECT_GT(symmetry_defect(t), 0.5);
}

TEST(RankOne, RecoversExactRankOne) {
  Generator g(5);
  const Vector a = g.unit_vector(3), b = g.unit_vector(4), c = g.unit_vector(2);
  const DenseTensor t = 2.5 * outer({a, b, c});
  const auto r = best_rank_one(t);
  EXPECT_NEAR(r.lambda, 2.5, 1e-12);
  EXPECT_LT(r.residual, 1e-12);
}

TEST(RankOne, SymmetricCubeOfAUnitVector) {
  Generator g(6);
  const Vector u = g.unit_vector(3);
  const auto r = best_rank_one(2.0 * outer({u, u, u}));
  EXPECT_NEAR(r.lambda, 2.0, 1e-12);
  for (const auto& f : r.factors) EXPECT_NEAR(std::abs(f.dot(u)), 1.0, 1e-12);
}

TEST(RankOne, SymmetricOrderThreeAgreesWithGridSearch) {
  // Oracle: for a symmetric 2x2x2 tensor the best symmetric rank-one
  // approximation is lambda = max_phi |T(u, u, u)|, u = (cos phi, sin phi).
  for (std::uint64_t c = 0; c < 8; ++c) {
    Generator g(300 + c);
    const Vector u0 = g.unit_vector(2);
    DenseTensor t = 3.0 * outer({u0, u0, u0});
    DenseTensor noise = symmetrize(g.tensor({2, 2, 2}));
    noise *= 0.1;
    t += noise;
    double best = 0.0;
    constexpr int kGrid = 200000;
    for (int k = 0; k < kGrid; ++k) {
      const double phi = std::numbers::pi * k / kGrid;
      const Vector u{{std::cos(phi), std::sin(phi)}};
      double val = 0.0;
      for (Index f = 0; f < 8; ++f) {
        auto i = unravel(f, {2, 2, 2});
        val += t[f] * u(static_cast<Eigen::Index>(i[0])) * u(static_cast<Eigen::Index>(i[1])) *
               u(static_cast<Eigen::Index>(i[2]));
      }
      best = std::max(best, std::abs(val));
    }
    const auto r = best_rank_one(t);
    EXPECT_NEAR(r.lambda, best, 1e-8) << "case " << c;
  }
}

TEST(RankOne, ReportsNonConvergence) {
  Generator g(9);
  const DenseTensor t = g.tensor({3, 3, 3});
  EXPECT_THROW(best_rank_one(t, 1e-300, 1), RankOneConvergenceError);
}

}  // namespace
}  // namespace bethe
