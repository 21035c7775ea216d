#include "bethe/state.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "serialization.hpp"

namespace bethe {

ITTNState::ITTNState(Index q, Index bond_dim, std::vector<DenseTensor> tensors)
    : q_(q), bond_dim_(bond_dim), tensors_(std::move(tensors)) {
  if (q_ < 2) throw InvalidArgument("coordination number must be at least 2");
  if (bond_dim_ < 1) throw InvalidArgument("bond dimension must be at least 1");
  if (tensors_.size() != kPhysicalDim) {
    throw DimensionError("expected " + std::to_string(kPhysicalDim) + " site tensors, got " +
                         std::to_string(tensors_.size()));
  }
  const std::vector<Index> expected(q_, bond_dim_);
  bool nonzero = false;
  for (Index s = 0; s < tensors_.size(); ++s) {
    if (tensors_[s].dims() != expected) {
      throw DimensionError("site tensor " + std::to_string(s) + " is not an order-" +
                           std::to_string(q_) + " tensor with all dimensions " +
                           std::to_string(bond_dim_));
    }
    if (!tensors_[s].all_finite()) {
      throw InvalidArgument("site tensor " + std::to_string(s) + " has non-finite entries");
    }
    nonzero = nonzero || tensors_[s].max_abs() > 0.0;
  }
  if (!nonzero) throw InvalidArgument("all site tensors are zero");
}

ITTNState ITTNState::scaled(double factor) const {
  std::vector<DenseTensor> t = tensors_;
  for (auto& a : t) a *= factor;
  return ITTNState(q_, bond_dim_, std::move(t));
}

double ITTNState::symmetry_defect() const {
  double d = 0.0;
  for (const auto& a : tensors_) d = std::max(d, bethe::symmetry_defect(a));
  return d;
}

double ITTNState::max_abs() const {
  double m = 0.0;
  for (const auto& a : tensors_) m = std::max(m, a.max_abs());
  return m;
}

ITTNState init_product(Index q, double theta) {
  std::vector<DenseTensor> t;
  DenseTensor up = DenseTensor::cube(q, 1);
  DenseTensor down = DenseTensor::cube(q, 1);
  up[0] = std::cos(theta / 2.0);
  down[0] = std::sin(theta / 2.0);
  t.push_back(std::move(up));
  t.push_back(std::move(down));
  return ITTNState(q, 1, std::move(t));
}

ITTNState embed_pad(const ITTNState& state, Index bond_dim, double noise_amplitude,
                    std::uint64_t seed) {
  const Index d_old = state.bond_dim();
  if (bond_dim < d_old) {
    throw InvalidArgument("embed_pad: target bond dimension " + std::to_string(bond_dim) +
                          " is smaller than " + std::to_string(d_old));
  }
  const Index q = state.q();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-noise_amplitude, noise_amplitude);

  std::vector<DenseTensor> out;
  std::vector<Index> idx(q);
  for (const auto& a : state.tensors()) {
    DenseTensor padded = DenseTensor::cube(q, bond_dim);
    DenseTensor noise = DenseTensor::cube(q, bond_dim);
    for (Index flat = 0; flat < padded.size(); ++flat) {
      padded.unravel(flat, idx);
      const bool inside = std::all_of(idx.begin(), idx.end(), [d_old](Index i) { return i < d_old; });
      if (inside) {
        padded[flat] = a(idx);
      } else if (noise_amplitude > 0.0) {
        noise[flat] = uniform(rng);
      }
    }
    if (noise_amplitude > 0.0) padded += symmetrize(noise);
    out.push_back(std::move(padded));
  }
  return ITTNState(q, bond_dim, std::move(out));
}

ITTNState random_symmetric_state(Index q, Index bond_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<DenseTensor> out;
  for (Index s = 0; s < ITTNState::kPhysicalDim; ++s) {
    DenseTensor a = DenseTensor::cube(q, bond_dim);
    for (double& x : a.entries()) x = uniform(rng);
    out.push_back(symmetrize(a));
  }
  return ITTNState(q, bond_dim, std::move(out));
}

namespace detail {

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) {
    throw InvalidArgument("snapshot: expected '" + token + "', found '" + got + "'");
  }
}

namespace {

Index read_count(std::istream& in, const std::string& key) {
  expect_token(in, key);
  long long v = 0;
  if (!(in >> v) || v < 0) throw InvalidArgument("snapshot: bad value for '" + key + "'");
  return static_cast<Index>(v);
}

}  // namespace

void write_header(std::ostream& out, const std::string& magic, const SnapshotHeader& header) {
  out << magic << '\n'
      << "version " << header.version << '\n'
      << "q " << header.q << '\n'
      << "D " << header.bond_dim << '\n'
      << "d " << header.phys_dim << '\n';
}

SnapshotHeader read_header(std::istream& in, const std::string& magic) {
  expect_token(in, magic);
  SnapshotHeader h;
  h.version = static_cast<int>(read_count(in, "version"));
  if (h.version != kStateFormatVersion) {
    throw InvalidArgument("snapshot: unsupported format version " + std::to_string(h.version));
  }
  h.q = read_count(in, "q");
  h.bond_dim = read_count(in, "D");
  h.phys_dim = read_count(in, "d");
  if (h.q < 2 || h.bond_dim < 1 || h.phys_dim < 1) {
    throw InvalidArgument("snapshot: invalid header values");
  }
  return h;
}

void write_values(std::ostream& out, std::span<const double> values) {
  char buf[32];
  for (Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << buf << ((i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ');
  }
}

std::vector<double> read_values(std::istream& in, Index count) {
  std::vector<double> values(count);
  std::string token;
  for (Index i = 0; i < count; ++i) {
    if (!(in >> token)) throw InvalidArgument("snapshot: truncated value block");
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, values[i]);
    if (ec != std::errc() || ptr != last) {
      throw InvalidArgument("snapshot: cannot parse value '" + token + "'");
    }
  }
  return values;
}

void write_tensors(std::ostream& out, std::span<const DenseTensor> tensors) {
  for (Index s = 0; s < tensors.size(); ++s) {
    out << "tensor " << s << '\n';
    write_values(out, tensors[s].entries());
  }
}

std::vector<DenseTensor> read_tensors(std::istream& in, const SnapshotHeader& header) {
  std::vector<DenseTensor> tensors;
  Index count = 1;
  for (Index k = 0; k < header.q; ++k) count *= header.bond_dim;
  for (Index s = 0; s < header.phys_dim; ++s) {
    if (read_count(in, "tensor") != s) throw InvalidArgument("snapshot: tensors out of order");
    tensors.emplace_back(std::vector<Index>(header.q, header.bond_dim), read_values(in, count));
  }
  return tensors;
}

}  // namespace detail

void write_state(std::ostream& out, const ITTNState& state) {
  detail::write_header(out, "bethe-ittn",
                       {kStateFormatVersion, state.q(), state.bond_dim(), state.phys_dim()});
  detail::write_tensors(out, state.tensors());
}

ITTNState read_state(std::istream& in) {
  const auto header = detail::read_header(in, "bethe-ittn");
  return ITTNState(header.q, header.bond_dim, detail::read_tensors(in, header));
}

void save_state(const std::filesystem::path& path, const ITTNState& state) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_state(out, state);
}

ITTNState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_state(in);
}

}  // namespace bethe
