#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bethe/error.hpp"

namespace bethe {

using Index = std::size_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Order-n dense real tensor stored in row-major order (last mode fastest).
///
/// Mode indices are zero-based throughout the library: mode 0 is the
/// leftmost index. An order-0 tensor holds a single scalar.
class DenseTensor {
 public:
  DenseTensor() = default;

  /// Zero tensor with the given mode dimensions. Every dimension must be positive.
  explicit DenseTensor(std::vector<Index> dims);

  /// Tensor with explicit row-major entries; `entries.size()` must match.
  DenseTensor(std::vector<Index> dims, std::vector<double> entries);

  /// Zero tensor of the given order with every mode of dimension `dim`.
  static DenseTensor cube(Index order, Index dim);

  Index order() const noexcept { return dims_.size(); }
  const std::vector<Index>& dims() const noexcept { return dims_; }
  Index dim(Index mode) const;
  Index size() const noexcept { return entries_.size(); }

  std::span<double> entries() noexcept { return entries_; }
  std::span<const double> entries() const noexcept { return entries_; }
  double* data() noexcept { return entries_.data(); }
  const double* data() const noexcept { return entries_.data(); }

  double& operator[](Index flat) noexcept { return entries_[flat]; }
  double operator[](Index flat) const noexcept { return entries_[flat]; }

  double& operator()(std::span<const Index> index) { return entries_[flat_index(index)]; }
  double operator()(std::span<const Index> index) const { return entries_[flat_index(index)]; }
  double& operator()(std::initializer_list<Index> index) {
    return entries_[flat_index(std::span<const Index>(index.begin(), index.size()))];
  }
  double operator()(std::initializer_list<Index> index) const {
    return entries_[flat_index(std::span<const Index>(index.begin(), index.size()))];
  }

  Index flat_index(std::span<const Index> index) const;
  /// Inverse of flat_index; `index` must have order() elements.
  void unravel(Index flat, std::span<Index> index) const;

  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  DenseTensor& operator*=(double s) noexcept;
  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);

  bool operator==(const DenseTensor&) const = default;

 private:
  std::vector<Index> dims_;
  std::vector<double> entries_{0.0};
};

DenseTensor operator*(double s, DenseTensor t);
DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);

/// max_i |a_i - b_i|; dims must agree.
double max_abs_difference(const DenseTensor& a, const DenseTensor& b);

/// Contracts mode `mode` with `v`; the result has order one less and keeps
/// the remaining modes in their original order.
DenseTensor mode_mul_vector(const DenseTensor& t, Index mode, const Vector& v);

/// result[..a..] = sum_b t[..b..] * m(a, b). Mode `mode` changes dimension
/// from m.cols() to m.rows().
DenseTensor mode_mul_matrix(const DenseTensor& t, Index mode, const Matrix& m);

/// (v_1 o v_2 o ... o v_n)[a_1..a_n] = prod_k v_k[a_k].
DenseTensor outer(std::span<const Vector> vectors);
DenseTensor outer(std::initializer_list<Vector> vectors);

/// result[a_0..a_{n-1}] = t[a_{perm[0]}, .., a_{perm[n-1]}] for tensors with
/// equal mode dimensions; for general dims result.dims()[perm[k]] = t.dims()[k].
DenseTensor permute(const DenseTensor& t, std::span<const Index> perm);

/// All n! permutations of {0, .., n-1} in lexicographic order.
std::vector<std::vector<Index>> all_permutations(Index n);

/// Average over all mode permutations. Requires equal mode dimensions.
DenseTensor symmetrize(const DenseTensor& t);

/// max over permutations of max |t - perm(t)|; zero iff t is fully symmetric.
double symmetry_defect(const DenseTensor& t);

/// Same as symmetry_defect, restricted to the contiguous modes
/// [first, first + count).
double symmetry_defect(const DenseTensor& t, Index first, Index count);

struct RankOneApproximation {
  double lambda = 0.0;
  std::vector<Vector> factors;  ///< unit vectors, one per mode
  std::size_t iterations = 0;
  double residual = 0.0;        ///< || t - lambda * outer(factors) ||_F
};

class RankOneConvergenceError : public ConvergenceError {
 public:
  RankOneConvergenceError(const std::string& what, RankOneApproximation last)
      : ConvergenceError(what, last.iterations, last.residual), last_(std::move(last)) {}
  const RankOneApproximation& last_iterate() const noexcept { return last_; }

 private:
  RankOneApproximation last_;
};

/// Best rank-one approximation by alternating (higher-order) power iteration,
/// started from the leading left singular vector of every unfolding.
/// Stops when lambda changes by less than tol * max(1, lambda) between sweeps.
RankOneApproximation best_rank_one(const DenseTensor& t, double tol = 1e-12,
                                   std::size_t max_iter = 10000);

}  // namespace bethe
