#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "bethe/tensor.hpp"

namespace bethe {

/// Translation-invariant infinite tree tensor network on the Bethe lattice
/// with coordination number q: one order-q tensor A^s (all modes of
/// dimension D) per physical spin value s. The tensors are expected to be
/// fully symmetric; the constructor checks shapes only, symmetry_defect()
/// reports the deviation.
///
/// Physical basis: s = 0 is sigma_z = +1, s = 1 is sigma_z = -1.
class ITTNState {
 public:
  static constexpr Index kPhysicalDim = 2;

  ITTNState(Index q, Index bond_dim, std::vector<DenseTensor> tensors);

  Index q() const noexcept { return q_; }
  Index bond_dim() const noexcept { return bond_dim_; }
  Index phys_dim() const noexcept { return tensors_.size(); }

  const DenseTensor& tensor(Index s) const { return tensors_.at(s); }
  std::span<const DenseTensor> tensors() const noexcept { return tensors_; }

  /// Multiplies every A^s by `factor` (a gauge change for all observables).
  ITTNState scaled(double factor) const;

  /// max_s symmetry_defect(A^s).
  double symmetry_defect() const;

  /// max_s max |A^s|.
  double max_abs() const;

  bool operator==(const ITTNState&) const = default;

 private:
  Index q_;
  Index bond_dim_;
  std::vector<DenseTensor> tensors_;
};

/// D = 1 product state cos(theta/2)|0> + sin(theta/2)|1> on every site:
/// <sigma_z> = cos(theta), <sigma_x> = sin(theta).
ITTNState init_product(Index q, double theta);

/// Zero-pads every A^s into the leading block of a bond_dim-dimensional
/// tensor. With noise_amplitude > 0, uniform noise in
/// [-noise_amplitude, noise_amplitude] is added to the padded entries and
/// symmetrized, so the result stays fully symmetric.
ITTNState embed_pad(const ITTNState& state, Index bond_dim, double noise_amplitude = 0.0,
                    std::uint64_t seed = 0);

/// Fully symmetric state with entries drawn uniformly from [0, 1] and then
/// symmetrized over all mode permutations. Non-negative entries keep the
/// environment recursion away from competing or oscillating fixed points,
/// which tensors with mixed signs produce for a sizeable fraction of seeds.
ITTNState random_symmetric_state(Index q, Index bond_dim, std::uint64_t seed);

// Text snapshot:
//   bethe-ittn
//   version 1
//   q <q>
//   D <D>
//   d <d>
//   tensor <s>          (repeated d times)
//   <D^q entries, row-major, 17 significant digits, whitespace separated>
// Reading back a written snapshot reproduces every entry bit-for-bit.
inline constexpr int kStateFormatVersion = 1;

void write_state(std::ostream& out, const ITTNState& state);
ITTNState read_state(std::istream& in);
void save_state(const std::filesystem::path& path, const ITTNState& state);
ITTNState load_state(const std::filesystem::path& path);

}  // namespace bethe
