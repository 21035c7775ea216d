#pragma once

// Seeded generators for the property tests. Each case index maps to a fixed
// seed, so a failing case can be re-run in isolation.

#include <cstdint>
#include <random>
#include <vector>

#include "bethe/state.hpp"
#include "bethe/tensor.hpp"

namespace bethe::testing {

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  Index pick(Index lo, Index hi) {  // inclusive
    return std::uniform_int_distribution<Index>(lo, hi)(rng_);
  }
  std::uint64_t next_seed() { return rng_(); }

  DenseTensor tensor(std::vector<Index> dims) {
    DenseTensor t(std::move(dims));
    for (auto& x : t.entries()) x = uniform();
    return t;
  }
  Matrix matrix(Index rows, Index cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform();
    return m;
  }
  Vector vector(Index n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform();
    return v;
  }
  Vector unit_vector(Index n) {
    Vector v = vector(n);
    return v / v.norm();
  }
  ITTNState symmetric_state(Index q, Index bond_dim) {
    return random_symmetric_state(q, bond_dim, next_seed());
  }

 private:
  std::mt19937_64 rng_;
};

/// Row-major multi-index iteration helper for brute-force loops.
inline std::vector<Index> unravel(Index flat, const std::vector<Index>& dims) {
  std::vector<Index> idx(dims.size());
  for (Index k = dims.size(); k-- > 0;) {
    idx[k] = flat % dims[k];
    flat /= dims[k];
  }
  return idx;
}

inline Index product(const std::vector<Index>& dims) {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

}  // namespace bethe::testing
