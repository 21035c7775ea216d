#include "bethe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace bethe {

namespace {

Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

void require_positive(const std::vector<Index>& dims) {
  for (Index k = 0; k < dims.size(); ++k) {
    if (dims[k] == 0) {
      throw DimensionError("mode " + std::to_string(k) + " has dimension 0");
    }
  }
}

void require_same_dims(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) {
    throw DimensionError("tensor dimensions differ");
  }
}

void require_mode(const DenseTensor& t, Index mode) {
  if (mode >= t.order()) {
    throw DimensionError("mode " + std::to_string(mode) + " out of range for order " +
                         std::to_string(t.order()));
  }
}

bool equal_dims(const DenseTensor& t) {
  const auto& d = t.dims();
  return std::adjacent_find(d.begin(), d.end(), std::not_equal_to<>()) == d.end();
}

// Extent of the modes strictly before / after `mode`.
std::pair<Index, Index> outer_inner(const std::vector<Index>& dims, Index mode) {
  const std::span<const Index> all(dims);
  return {product(all.first(mode)), product(all.subspan(mode + 1))};
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> dims) : dims_(std::move(dims)) {
  require_positive(dims_);
  entries_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(std::vector<Index> dims, std::vector<double> entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
  require_positive(dims_);
  if (entries_.size() != product(dims_)) {
    throw DimensionError("entry count " + std::to_string(entries_.size()) +
                         " does not match product of dims " + std::to_string(product(dims_)));
  }
}

DenseTensor DenseTensor::cube(Index order, Index dim) {
  return DenseTensor(std::vector<Index>(order, dim));
}

Index DenseTensor::dim(Index mode) const {
  require_mode(*this, mode);
  return dims_[mode];
}

Index DenseTensor::flat_index(std::span<const Index> index) const {
  if (index.size() != dims_.size()) {
    throw DimensionError("index has " + std::to_string(index.size()) + " components, tensor order is " +
                         std::to_string(dims_.size()));
  }
  Index flat = 0;
  for (Index k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) {
      throw DimensionError("index " + std::to_string(index[k]) + " out of range in mode " +
                           std::to_string(k));
    }
    flat = flat * dims_[k] + index[k];
  }
  return flat;
}

void DenseTensor::unravel(Index flat, std::span<Index> index) const {
  for (Index k = dims_.size(); k-- > 0;) {
    index[k] = flat % dims_[k];
    flat /= dims_[k];
  }
}

double DenseTensor::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double x : entries_) s += x * x;
  return std::sqrt(s);
}

double DenseTensor::max_abs() const noexcept {
  double m = 0.0;
  for (double x : entries_) m = std::max(m, std::abs(x));
  return m;
}

bool DenseTensor::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](double x) { return std::isfinite(x); });
}

DenseTensor& DenseTensor::operator*=(double s) noexcept {
  for (double& x : entries_) x *= s;
  return *this;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  require_same_dims(*this, other);
  for (Index i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  require_same_dims(*this, other);
  for (Index i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

DenseTensor operator*(double s, DenseTensor t) {
  t *= s;
  return t;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) {
  a += b;
  return a;
}

DenseTensor operator-(DenseTensor a, const DenseTensor& b) {
  a -= b;
  return a;
}

double max_abs_difference(const DenseTensor& a, const DenseTensor& b) {
  require_same_dims(a, b);
  double m = 0.0;
  for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

DenseTensor mode_mul_vector(const DenseTensor& t, Index mode, const Vector& v) {
  require_mode(t, mode);
  if (static_cast<Index>(v.size()) != t.dims()[mode]) {
    throw DimensionError("mode " + std::to_string(mode) + " has dimension " +
                         std::to_string(t.dims()[mode]) + " but vector has length " +
                         std::to_string(v.size()));
  }
  std::vector<Index> dims = t.dims();
  dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(mode));
  DenseTensor result(dims);

  const auto [outer, inner] = outer_inner(t.dims(), mode);
  const Index n = t.dims()[mode];
  for (Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix> block(t.data() + o * n * inner, static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(inner));
    Eigen::Map<Eigen::RowVectorXd> out(result.data() + o * inner, static_cast<Eigen::Index>(inner));
    out.noalias() = v.transpose() * block;
  }
  return result;
}

DenseTensor mode_mul_matrix(const DenseTensor& t, Index mode, const Matrix& m) {
  require_mode(t, mode);
  if (static_cast<Index>(m.cols()) != t.dims()[mode]) {
    throw DimensionError("mode " + std::to_string(mode) + " has dimension " +
                         std::to_string(t.dims()[mode]) + " but matrix has " +
                         std::to_string(m.cols()) + " columns");
  }
  if (m.rows() == 0) {
    throw DimensionError("matrix has no rows");
  }
  std::vector<Index> dims = t.dims();
  dims[mode] = static_cast<Index>(m.rows());
  DenseTensor result(dims);

  const auto [outer, inner] = outer_inner(t.dims(), mode);
  const Index n = t.dims()[mode];
  const Index rows = static_cast<Index>(m.rows());
  for (Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix> block(t.data() + o * n * inner, static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(inner));
    Eigen::Map<RowMatrix> out(result.data() + o * rows * inner, static_cast<Eigen::Index>(rows),
                              static_cast<Eigen::Index>(inner));
    out.noalias() = m * block;
  }
  return result;
}

DenseTensor outer(std::span<const Vector> vectors) {
  if (vectors.empty()) {
    throw DimensionError("outer product of an empty list");
  }
  std::vector<Index> dims;
  for (const auto& v : vectors) {
    if (v.size() == 0) throw DimensionError("outer product with an empty vector");
    dims.push_back(static_cast<Index>(v.size()));
  }
  DenseTensor result(dims);
  std::vector<Index> idx(dims.size());
  for (Index flat = 0; flat < result.size(); ++flat) {
    result.unravel(flat, idx);
    double p = 1.0;
    for (Index k = 0; k < idx.size(); ++k) p *= vectors[k][static_cast<Eigen::Index>(idx[k])];
    result[flat] = p;
  }
  return result;
}

DenseTensor outer(std::initializer_list<Vector> vectors) {
  return outer(std::span<const Vector>(vectors.begin(), vectors.size()));
}

DenseTensor permute(const DenseTensor& t, std::span<const Index> perm) {
  const Index n = t.order();
  if (perm.size() != n) {
    throw DimensionError("permutation length does not match tensor order");
  }
  std::vector<bool> seen(n, false);
  for (Index p : perm) {
    if (p >= n || seen[p]) throw DimensionError("not a permutation");
    seen[p] = true;
  }
  std::vector<Index> dims(n);
  for (Index k = 0; k < n; ++k) dims[perm[k]] = t.dims()[k];
  DenseTensor result(dims);

  std::vector<Index> src(n), dst(n);
  for (Index flat = 0; flat < t.size(); ++flat) {
    t.unravel(flat, src);
    for (Index k = 0; k < n; ++k) dst[perm[k]] = src[k];
    result(dst) = t[flat];
  }
  return result;
}

std::vector<std::vector<Index>> all_permutations(Index n) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  std::vector<std::vector<Index>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

DenseTensor symmetrize(const DenseTensor& t) {
  if (!equal_dims(t)) throw DimensionError("symmetrize requires equal mode dimensions");
  const auto perms = all_permutations(t.order());
  DenseTensor acc(t.dims());
  for (const auto& p : perms) acc += permute(t, p);
  acc *= 1.0 / static_cast<double>(perms.size());
  return acc;
}

double symmetry_defect(const DenseTensor& t) {
  if (!equal_dims(t)) throw DimensionError("symmetry_defect requires equal mode dimensions");
  return symmetry_defect(t, 0, t.order());
}

double symmetry_defect(const DenseTensor& t, Index first, Index count) {
  if (first + count > t.order()) throw DimensionError("mode range out of bounds");
  for (Index k = first + 1; k < first + count; ++k) {
    if (t.dims()[k] != t.dims()[first]) {
      throw DimensionError("symmetry_defect requires equal dimensions on the permuted modes");
    }
  }
  const Index n = t.order();
  std::vector<Index> idx(n), moved(n);
  double defect = 0.0;
  for (const auto& p : all_permutations(count)) {
    for (Index flat = 0; flat < t.size(); ++flat) {
      t.unravel(flat, idx);
      moved = idx;
      for (Index k = 0; k < count; ++k) moved[first + k] = idx[first + p[k]];
      defect = std::max(defect, std::abs(t[flat] - t(moved)));
    }
  }
  return defect;
}

namespace {

// Contract every mode except `keep` with the corresponding factor.
Vector contract_all_but(const DenseTensor& t, const std::vector<Vector>& factors, Index keep) {
  DenseTensor cur = t;
  for (Index k = t.order(); k-- > 0;) {
    if (k == keep) continue;
    cur = mode_mul_vector(cur, k, factors[k]);
  }
  return Eigen::Map<const Vector>(cur.data(), static_cast<Eigen::Index>(cur.size()));
}

// Leading left singular vector of the mode-k unfolding.
Vector leading_mode_vector(const DenseTensor& t, Index mode) {
  const Index n = t.dims()[mode];
  Matrix gram = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto [outer, inner] = outer_inner(t.dims(), mode);
  for (Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix> block(t.data() + o * n * inner, static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(inner));
    gram.noalias() += block * block.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  return es.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);
}

}  // namespace

RankOneApproximation best_rank_one(const DenseTensor& t, double tol, std::size_t max_iter) {
  const double norm = t.frobenius_norm();
  if (norm == 0.0) throw InvalidArgument("best_rank_one of the zero tensor");
  if (t.order() == 0) throw DimensionError("best_rank_one of an order-0 tensor");

  RankOneApproximation out;
  out.factors.reserve(t.order());
  for (Index k = 0; k < t.order(); ++k) out.factors.push_back(leading_mode_vector(t, k));

  auto residual_of = [norm](double lambda) {
    return std::sqrt(std::max(0.0, norm * norm - lambda * lambda));
  };

  double previous = -1.0;
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    for (Index k = 0; k < t.order(); ++k) {
      Vector next = contract_all_but(t, out.factors, k);
      const double len = next.norm();
      if (len == 0.0) {
        // Started orthogonal to the tensor's support; fall back to a unit axis.
        next = Vector::Unit(next.size(), 0);
      } else {
        next /= len;
      }
      out.factors[k] = std::move(next);
      out.lambda = len;
    }
    out.residual = residual_of(out.lambda);
    if (std::abs(out.lambda - previous) <= tol * std::max(1.0, out.lambda)) {
      return out;
    }
    previous = out.lambda;
  }
  out.iterations = max_iter;
  throw RankOneConvergenceError("best_rank_one did not converge in " + std::to_string(max_iter) +
                                    " sweeps",
                                std::move(out));
}

}  // namespace bethe
